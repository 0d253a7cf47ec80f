import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from pursuitlab.errors import StateIntegrityError
from pursuitlab.geometry import Pose
from pursuitlab.kinematics import (
    VehicleParams,
    VehicleState,
    WheelCommand,
    apply_handicap,
    step,
)

DUTY = st.floats(min_value=-1.0, max_value=1.0)
ANGLE = st.floats(min_value=-math.pi, max_value=math.pi)


def implied_radius(cmd: WheelCommand, track: float) -> float:
    mean = 0.5 * (cmd.left + cmd.right)
    half_diff = 0.5 * (cmd.right - cmd.left)
    if half_diff == 0.0:
        return math.inf
    return abs(mean) * track / (2.0 * abs(half_diff))


class TestHandicap:
    def test_pivot_command_shrunk_to_radius(self):
        # (0, 1) against a 0.2 m minimum radius on a 0.1 m track
        params = VehicleParams(speed_cap_fraction=1.0, min_turn_radius=0.2)
        out = apply_handicap(WheelCommand(0.0, 1.0), params)
        assert out.left == pytest.approx(0.375, abs=1e-12)
        assert out.right == pytest.approx(0.625, abs=1e-12)
        assert 0.5 * (out.left + out.right) == 0.5
        assert implied_radius(out, params.track_width) == pytest.approx(0.2, rel=1e-12)

    def test_speed_cap_clamps_each_wheel(self):
        params = VehicleParams(speed_cap_fraction=0.5)
        out = apply_handicap(WheelCommand(0.8, -0.9), params)
        assert out == WheelCommand(0.5, -0.5)

    def test_no_handicap_is_identity(self):
        cmd = WheelCommand(-0.3, 0.7)
        assert apply_handicap(cmd, VehicleParams()) == cmd

    def test_gentle_turn_unchanged(self):
        # implied radius 0.45 m already beats the 0.2 m floor
        params = VehicleParams(min_turn_radius=0.2)
        cmd = WheelCommand(0.8, 1.0)
        assert apply_handicap(cmd, params) == cmd

    @given(DUTY, DUTY)
    def test_idempotent(self, left, right):
        params = VehicleParams(speed_cap_fraction=0.7, min_turn_radius=0.15)
        once = apply_handicap(WheelCommand(left, right), params)
        twice = apply_handicap(once, params)
        assert twice.left == pytest.approx(once.left, abs=1e-12)
        assert twice.right == pytest.approx(once.right, abs=1e-12)

    @given(DUTY, DUTY)
    def test_radius_floor_enforced(self, left, right):
        params = VehicleParams(speed_cap_fraction=0.8, min_turn_radius=0.25)
        out = apply_handicap(WheelCommand(left, right), params)
        assert abs(out.left) <= params.speed_cap_fraction + 1e-12
        assert abs(out.right) <= params.speed_cap_fraction + 1e-12
        r = implied_radius(out, params.track_width)
        assert r == math.inf or r >= params.min_turn_radius * (1 - 1e-9)

    @given(DUTY, DUTY)
    def test_mean_duty_preserved_by_radius_handicap(self, left, right):
        # cap at 1.0 so only the radius handicap acts
        params = VehicleParams(speed_cap_fraction=1.0, min_turn_radius=0.3)
        cmd = WheelCommand(left, right)
        out = apply_handicap(cmd, params)
        assert 0.5 * (out.left + out.right) == pytest.approx(
            0.5 * (cmd.left + cmd.right), abs=1e-12
        )


class TestStep:
    def test_straight_line(self):
        params = VehicleParams()
        state = VehicleState(Pose(1.0, 2.0, math.pi / 2))
        out = step(state, WheelCommand(0.5, 0.5), params, dt=0.02)
        assert out.pose.x == pytest.approx(1.0, abs=1e-15)
        assert out.pose.y == pytest.approx(2.0 + 0.5 * 0.3 * 0.02)
        assert out.pose.heading == math.pi / 2
        assert out.tick == 1

    def test_equal_duties_heading_bit_exact(self):
        params = VehicleParams()
        state = VehicleState(Pose(0.0, 0.0, 0.7345))
        for _ in range(500):
            state = step(state, WheelCommand(0.61, 0.61), params, dt=0.02)
        assert state.pose.heading == 0.7345

    def test_pivot_in_place_zero_drift(self):
        params = VehicleParams()
        state = VehicleState(Pose(3.0, -2.0, 0.1))
        for _ in range(1000):
            state = step(state, WheelCommand(-0.8, 0.8), params, dt=0.02)
        assert abs(state.pose.x - 3.0) < 1e-12
        assert abs(state.pose.y + 2.0) < 1e-12

    def test_quarter_circle(self):
        # pick wheel speeds for R = 0.5 m, then turn 90 degrees exactly
        params = VehicleParams(track_width=0.1, max_wheel_speed=1.0)
        radius = 0.5
        v = 0.4
        omega = v / radius
        half_diff = omega * params.track_width / 2.0
        cmd = WheelCommand(v - half_diff, v + half_diff)
        dt = (math.pi / 2) / omega
        out = step(VehicleState(Pose(0.0, 0.0, 0.0)), cmd, params, dt)
        assert out.pose.x == pytest.approx(radius, rel=1e-12)
        assert out.pose.y == pytest.approx(radius, rel=1e-12)
        assert out.pose.heading == pytest.approx(math.pi / 2, rel=1e-12)

    def test_heading_stays_wrapped(self):
        params = VehicleParams()
        state = VehicleState(Pose(0.0, 0.0, 3.0))
        for _ in range(200):
            state = step(state, WheelCommand(-1.0, 1.0), params, dt=0.05)
            assert -math.pi < state.pose.heading <= math.pi

    @settings(max_examples=60)
    @given(DUTY, DUTY, ANGLE)
    def test_half_step_composition(self, left, right, heading):
        params = VehicleParams()
        cmd = WheelCommand(left, right)
        state = VehicleState(Pose(0.0, 0.0, heading))
        whole = step(state, cmd, params, dt=0.02)
        halves = step(step(state, cmd, params, dt=0.01), cmd, params, dt=0.01)
        assert whole.pose.x == pytest.approx(halves.pose.x, abs=1e-12)
        assert whole.pose.y == pytest.approx(halves.pose.y, abs=1e-12)
        assert math.sin(whole.pose.heading) == pytest.approx(
            math.sin(halves.pose.heading), abs=1e-12
        )

    def test_rejects_non_finite(self):
        params = VehicleParams()
        state = VehicleState(Pose(0.0, 0.0, 0.0))
        with pytest.raises(StateIntegrityError):
            step(state, WheelCommand(math.nan, 0.0), params, dt=0.02)
        with pytest.raises(StateIntegrityError):
            step(state, WheelCommand(0.0, 0.0), params, dt=-0.02)
        with pytest.raises(StateIntegrityError):
            step(VehicleState(Pose(math.inf, 0.0, 0.0)), WheelCommand(0.1, 0.1), params, 0.02)


def test_params_validate():
    with pytest.raises(StateIntegrityError):
        VehicleParams(track_width=0.0).validate()
    with pytest.raises(StateIntegrityError):
        VehicleParams(speed_cap_fraction=0.0).validate()
    with pytest.raises(StateIntegrityError):
        VehicleParams(speed_cap_fraction=1.5).validate()
    with pytest.raises(StateIntegrityError):
        VehicleParams(min_turn_radius=-0.1).validate()
    VehicleParams().validate()


def test_step_matches_euler_sample():
    """Spot check against a brute-force integrator; the full-scale version
    runs in the acceptance suite."""
    from oracles import euler_endpoints

    rng = random.Random(11)
    params = VehicleParams()
    commands = [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(25)]
    poses = [
        (rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-math.pi, math.pi))
        for _ in range(25)
    ]
    expected = euler_endpoints(commands, poses, params.max_wheel_speed,
                               params.track_width, duration=1.0, dt=1e-6)
    for (cmd, pose, ref) in zip(commands, poses, expected):
        out = step(VehicleState(Pose(*pose)), WheelCommand(*cmd), params, dt=1.0)
        assert out.pose.x == pytest.approx(ref[0], abs=1e-6)
        assert out.pose.y == pytest.approx(ref[1], abs=1e-6)
