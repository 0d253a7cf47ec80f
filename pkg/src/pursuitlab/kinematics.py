"""Differential-drive vehicle model with exact constant-twist integration.

Wheel duties in [-1, 1] scale a vehicle's maximum wheel surface speed.
For constant wheel speeds over one timestep the body moves along a
circular arc of radius R = v / omega, which integrates in closed form:

    x' = x + R * (sin(heading + omega*dt) - sin(heading))
    y' = y - R * (cos(heading + omega*dt) - cos(heading))
    heading' = heading + omega*dt

with v = (v_l + v_r) / 2 and omega = (v_r - v_l) / track_width.  The
straight-line limit is taken explicitly when |omega|*dt is tiny, so
equal wheel speeds never touch the arc formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import StateIntegrityError
from .geometry import Pose, wrap_angle

# below this rotation per step the arc is numerically a straight line
_STRAIGHT_EPS = 1e-9


@dataclass(frozen=True)
class WheelCommand:
    """Normalized duty for the left and right wheel, each in [-1, 1]."""

    left: float
    right: float


@dataclass
class VehicleParams:
    """Physical dimensions plus the software handicaps applied on top."""

    track_width: float = 0.10        # m, distance between wheel contact lines
    body_radius: float = 0.06        # m, collision footprint radius
    max_wheel_speed: float = 0.30    # m/s, wheel surface speed at duty 1.0
    speed_cap_fraction: float = 1.0  # duty magnitudes are clamped to this
    min_turn_radius: float = 0.0     # m, 0 disables the turning handicap

    def validate(self) -> None:
        if not (self.track_width > 0 and math.isfinite(self.track_width)):
            raise StateIntegrityError(f"track_width must be positive, got {self.track_width}")
        if not (self.body_radius > 0 and math.isfinite(self.body_radius)):
            raise StateIntegrityError(f"body_radius must be positive, got {self.body_radius}")
        if not (self.max_wheel_speed > 0 and math.isfinite(self.max_wheel_speed)):
            raise StateIntegrityError(
                f"max_wheel_speed must be positive, got {self.max_wheel_speed}"
            )
        if not (0.0 < self.speed_cap_fraction <= 1.0):
            raise StateIntegrityError(
                f"speed_cap_fraction must be in (0, 1], got {self.speed_cap_fraction}"
            )
        if self.min_turn_radius < 0 or not math.isfinite(self.min_turn_radius):
            raise StateIntegrityError(
                f"min_turn_radius must be >= 0, got {self.min_turn_radius}"
            )


@dataclass
class VehicleState:
    """Pose plus the tick counter that produced it."""

    pose: Pose
    tick: int = 0


def _check_finite(cmd: WheelCommand, pose: Pose, dt: float) -> None:
    for name, value in (
        ("left duty", cmd.left),
        ("right duty", cmd.right),
        ("x", pose.x),
        ("y", pose.y),
        ("heading", pose.heading),
        ("dt", dt),
    ):
        if not math.isfinite(value):
            raise StateIntegrityError(f"non-finite {name}: {value}")
    if dt <= 0:
        raise StateIntegrityError(f"dt must be positive, got {dt}")


def apply_handicap(cmd: WheelCommand, params: VehicleParams) -> WheelCommand:
    """Apply the software speed cap and minimum-turn-radius handicap.

    The cap clamps each duty magnitude to speed_cap_fraction.  The turning
    handicap then shrinks the wheel differential, preserving the mean duty,
    until the implied turn radius |v / omega| reaches min_turn_radius (or
    the differential hits zero).  Applying it twice changes nothing.
    """
    cap = params.speed_cap_fraction
    left = min(max(cmd.left, -cap), cap)
    right = min(max(cmd.right, -cap), cap)

    r_min = params.min_turn_radius
    if r_min > 0:
        mean = 0.5 * (left + right)
        half_diff = 0.5 * (right - left)
        if half_diff != 0.0:
            # implied radius: |v/omega| = |mean| * track_width / (2 * |half_diff|)
            max_half_diff = abs(mean) * params.track_width / (2.0 * r_min)
            if abs(half_diff) > max_half_diff:
                half_diff = math.copysign(max_half_diff, half_diff)
            left = mean - half_diff
            right = mean + half_diff
    return WheelCommand(left, right)


def step(state: VehicleState, cmd: WheelCommand, params: VehicleParams, dt: float) -> VehicleState:
    """Advance one timestep along the exact arc for constant wheel speeds."""
    pose = state.pose
    _check_finite(cmd, pose, dt)

    v_left = cmd.left * params.max_wheel_speed
    v_right = cmd.right * params.max_wheel_speed
    v = 0.5 * (v_left + v_right)
    omega = (v_right - v_left) / params.track_width

    theta = pose.heading
    if abs(omega) * dt < _STRAIGHT_EPS:
        x = pose.x + v * dt * math.cos(theta)
        y = pose.y + v * dt * math.sin(theta)
        # rotation is below float noise but keeping it preserves step composition
        heading = wrap_angle(theta + omega * dt)
    else:
        radius = v / omega
        theta_next = theta + omega * dt
        x = pose.x + radius * (math.sin(theta_next) - math.sin(theta))
        y = pose.y - radius * (math.cos(theta_next) - math.cos(theta))
        heading = wrap_angle(theta_next)

    return VehicleState(pose=Pose(x, y, heading), tick=state.tick + 1)
