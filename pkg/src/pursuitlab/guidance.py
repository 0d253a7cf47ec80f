"""Steering policies: light seeking, pursuit, intercept, and command guidance.

All policies emit a GuidanceCommand holding normalized wheel duties plus a
mode tag for telemetry.  Handicaps are applied later by the engine, so
policies express intent, not the capped output.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateGeometryError, StateIntegrityError
from .geometry import Pose, Vec2, relative_bearing, separation, wrap_angle
from .kinematics import VehicleParams, VehicleState, WheelCommand
from .sensing import SensorReading

MODE_TRACK = "track"
MODE_SEARCH = "search"
MODE_HOLD = "hold"
MODE_TAIL_CHASE = "tail_chase"
MODE_INTERCEPT = "intercept"
MODE_PURSUIT_FALLBACK = "pursuit_fallback"
MODE_COMMAND_HOLD = "command_hold"


def _clamp(value: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return min(max(value, lo), hi)


@dataclass(frozen=True)
class GuidanceCommand:
    """Wheel duties plus the policy mode that produced them."""

    wheel: WheelCommand
    mode_tag: str


# ---------------------------------------------------------------------------
# light seeking


def light_follow(
    reading: SensorReading,
    gain: float = 6.0,
    base_duty: float = 0.6,
    search: str = "crawl",
) -> GuidanceCommand:
    """Steer toward the brighter cell; fall back to a search behavior.

    While the reading is differentiable the wheels are split around
    base_duty by gain * (0.5 - fused), slowing the wheel on the brighter
    side.  When it is not, `search` selects either a straight crawl at
    base_duty or a full stop.
    """
    if search not in ("crawl", "stop"):
        raise StateIntegrityError(f"unknown search behavior: {search!r}")
    if not reading.differentiable:
        if search == "stop":
            return GuidanceCommand(WheelCommand(0.0, 0.0), MODE_HOLD)
        return GuidanceCommand(WheelCommand(base_duty, base_duty), MODE_SEARCH)
    steer = 0.5 - reading.fused
    left = _clamp(base_duty - gain * steer)
    right = _clamp(base_duty + gain * steer)
    return GuidanceCommand(WheelCommand(left, right), MODE_TRACK)


# ---------------------------------------------------------------------------
# pursuit and intercept


def _steer_toward(
    pose: Pose,
    point: Vec2,
    k_turn: float,
    duty: float,
    params: VehicleParams,
    mode_tag: str,
) -> GuidanceCommand:
    """Proportional heading control toward a world point about a mean duty."""
    bearing = relative_bearing(pose, point)
    omega = k_turn * bearing
    half_diff = omega * params.track_width / (2.0 * params.max_wheel_speed)
    headroom = 1.0 - abs(duty)
    half_diff = _clamp(half_diff, -headroom, headroom)
    return GuidanceCommand(WheelCommand(duty - half_diff, duty + half_diff), mode_tag)


def tail_chase(
    pose: Pose,
    target_pos: Vec2,
    k_turn: float = 4.0,
    duty: float = 0.8,
    params: VehicleParams | None = None,
) -> GuidanceCommand:
    """Aim at the target's current position (pure pursuit)."""
    return _steer_toward(pose, target_pos, k_turn, duty, params or VehicleParams(), MODE_TAIL_CHASE)


@dataclass(frozen=True)
class InterceptSolution:
    """Result of the constant-velocity intercept triangle."""

    feasible: bool
    time: float | None = None
    point: Vec2 | None = None  # relative to the shooter


def intercept_solve(rel_pos: Vec2, rel_vel: Vec2, speed: float) -> InterceptSolution:
    """Earliest time a runner at `speed` meets a constant-velocity target.

    Solves |rel_pos + rel_vel * t| = speed * t for the smallest t > 0:

        (|v|^2 - s^2) t^2 + 2 (r . v) t + |r|^2 = 0

    Returns an infeasible solution when no positive root exists.
    """
    if not (speed > 0.0 and math.isfinite(speed)):
        raise StateIntegrityError(f"speed must be positive and finite, got {speed}")
    rx, ry = rel_pos
    vx, vy = rel_vel
    if not all(math.isfinite(c) for c in (rx, ry, vx, vy)):
        raise StateIntegrityError("non-finite intercept geometry")
    rr = rx * rx + ry * ry
    if rr < 1e-24:
        raise DegenerateGeometryError("shooter and target are already collocated")

    a = vx * vx + vy * vy - speed * speed
    b = 2.0 * (rx * vx + ry * vy)
    c = rr

    roots: list[float] = []
    if abs(a) < 1e-12 * max(speed * speed, 1.0):
        # equal speeds: the quadratic degenerates to a line
        if b < 0.0:
            roots.append(-c / b)
    else:
        disc = b * b - 4.0 * a * c
        if disc >= 0.0:
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b))
            if q != 0.0:
                roots.append(c / q)
            if a != 0.0:
                roots.append(q / a)

    best = min((t for t in roots if t > 0.0), default=None)
    if best is None:
        return InterceptSolution(feasible=False)
    point = (rx + vx * best, ry + vy * best)
    return InterceptSolution(feasible=True, time=best, point=point)


def direct_intercept(
    pose: Pose,
    target_pos: Vec2,
    target_vel: Vec2,
    k_turn: float = 4.0,
    duty: float = 0.8,
    params: VehicleParams | None = None,
) -> GuidanceCommand:
    """Steer at the predicted meeting point; degrade to pure pursuit.

    The commandable straight-line speed is duty * max_wheel_speed.  When the
    intercept triangle has no solution the policy falls back to tail chase
    and tags the command so telemetry shows the degraded mode.
    """
    params = params or VehicleParams()
    rel = (target_pos[0] - pose.x, target_pos[1] - pose.y)
    speed = abs(duty) * params.max_wheel_speed
    solution = intercept_solve(rel, target_vel, speed)
    if solution.feasible and solution.point is not None:
        aim = (pose.x + solution.point[0], pose.y + solution.point[1])
        return _steer_toward(pose, aim, k_turn, duty, params, MODE_INTERCEPT)
    return _steer_toward(pose, target_pos, k_turn, duty, params, MODE_PURSUIT_FALLBACK)


class VelocityEstimator:
    """Two-point finite difference over the last two observed positions."""

    def __init__(self, dt: float):
        if dt <= 0:
            raise StateIntegrityError(f"dt must be positive, got {dt}")
        self.dt = dt
        self._prev: Vec2 | None = None
        self._estimate: Vec2 = (0.0, 0.0)

    def update(self, pos: Vec2) -> Vec2:
        if self._prev is not None:
            self._estimate = (
                (pos[0] - self._prev[0]) / self.dt,
                (pos[1] - self._prev[1]) / self.dt,
            )
        self._prev = pos
        return self._estimate

    @property
    def estimate(self) -> Vec2:
        return self._estimate


# ---------------------------------------------------------------------------
# scripted evaders


class EvaderPolicy(Enum):
    STRAIGHT = "straight"
    ZIGZAG = "zigzag"
    CIRCLE = "circle"
    TURN_AND_RUN = "turn_and_run"


@dataclass
class EvaderConfig:
    """Tuning knobs for the scripted evader policies."""

    duty: float = 0.5            # mean duty for straight/zigzag/circle
    steer: float = 1.0           # wheel split fraction for zigzag/circle
    period_s: float = 2.6        # zigzag leg duration
    cruise_duty: float = 0.5     # turn_and_run: duty before being threatened
    trigger_range: float = 0.508  # turn_and_run: pursuer distance that arms the escape
    clear_range: float = 0.55    # turn_and_run: gap required before turning
    turn_radius: float = 0.28    # turn_and_run: chosen 180-degree turn radius


@dataclass
class EvaderMemory:
    """Mutable state for stateful evader scripts (turn_and_run phases)."""

    phase: str = "cruise"
    turn_accum: float = 0.0
    prev_heading: float | None = None


def _turn_wheels_for_radius(radius: float, params: VehicleParams) -> WheelCommand:
    # full-duty outer wheel, inner reduced to hold the requested radius
    mean = 1.0 / (1.0 + params.track_width / (2.0 * radius))
    half_diff = 1.0 - mean
    return WheelCommand(mean - half_diff, mean + half_diff)


def evader(
    policy: EvaderPolicy,
    state: VehicleState,
    tick: int,
    params: VehicleParams,
    *,
    dt: float = 0.02,
    config: EvaderConfig | None = None,
    pursuer_pose: Pose | None = None,
    memory: EvaderMemory | None = None,
) -> GuidanceCommand:
    """Deterministic scripted leader commands.

    STRAIGHT holds a constant duty.  ZIGZAG alternates the wheel split every
    period_s, sweeping arcs left and right.  CIRCLE holds a constant split.
    TURN_AND_RUN flees straight while the pursuer is close behind, then makes
    a 180-degree turn at its escape radius and runs flat out; the turn offset
    carries it off the pursuer's line.
    """
    cfg = config or EvaderConfig()
    if policy is EvaderPolicy.STRAIGHT:
        return GuidanceCommand(WheelCommand(cfg.duty, cfg.duty), policy.value)

    if policy is EvaderPolicy.ZIGZAG:
        leg = int(tick * dt / cfg.period_s)
        direction = 1.0 if leg % 2 == 0 else -1.0
        left = _clamp(cfg.duty * (1.0 - cfg.steer * direction))
        right = _clamp(cfg.duty * (1.0 + cfg.steer * direction))
        return GuidanceCommand(WheelCommand(left, right), policy.value)

    if policy is EvaderPolicy.CIRCLE:
        left = _clamp(cfg.duty * (1.0 - cfg.steer))
        right = _clamp(cfg.duty * (1.0 + cfg.steer))
        return GuidanceCommand(WheelCommand(left, right), policy.value)

    if policy is EvaderPolicy.TURN_AND_RUN:
        mem = memory if memory is not None else EvaderMemory()
        pose = state.pose
        if mem.phase == "cruise":
            if pursuer_pose is not None:
                gap = separation(pose.position(), pursuer_pose.position())
                behind = abs(relative_bearing(pose, pursuer_pose.position())) > 0.5 * math.pi
                if gap <= cfg.trigger_range and behind:
                    mem.phase = "flee"
            if mem.phase == "cruise":
                return GuidanceCommand(
                    WheelCommand(cfg.cruise_duty, cfg.cruise_duty), f"{policy.value}/cruise"
                )
        if mem.phase == "flee":
            gap = (
                separation(pose.position(), pursuer_pose.position())
                if pursuer_pose is not None
                else math.inf
            )
            if gap < cfg.clear_range:
                return GuidanceCommand(WheelCommand(1.0, 1.0), f"{policy.value}/flee")
            mem.phase = "turn"
            mem.turn_accum = 0.0
            mem.prev_heading = pose.heading
        if mem.phase == "turn":
            if mem.prev_heading is not None:
                mem.turn_accum += abs(wrap_angle(pose.heading - mem.prev_heading))
            mem.prev_heading = pose.heading
            if mem.turn_accum < math.pi:
                radius = max(cfg.turn_radius, params.min_turn_radius)
                return GuidanceCommand(
                    _turn_wheels_for_radius(radius, params), f"{policy.value}/turn"
                )
            mem.phase = "run"
        return GuidanceCommand(WheelCommand(1.0, 1.0), f"{policy.value}/run")

    raise StateIntegrityError(f"unknown evader policy: {policy}")


# ---------------------------------------------------------------------------
# command guidance over a lossy link


@dataclass
class LinkModel:
    """Constant-latency, independently-dropping message channel model."""

    latency_ticks: int = 0
    drop_probability: float = 0.0

    def validate(self) -> None:
        if self.latency_ticks < 0:
            raise StateIntegrityError(f"latency_ticks must be >= 0, got {self.latency_ticks}")
        if not (0.0 <= self.drop_probability <= 1.0):
            raise StateIntegrityError(
                f"drop_probability must be in [0, 1], got {self.drop_probability}"
            )


class DelayLink:
    """FIFO channel applying a LinkModel.  Drop draws come from the engine RNG."""

    def __init__(self, model: LinkModel):
        model.validate()
        self.model = model
        self._queue: deque[tuple[int, object]] = deque()
        self.dropped = 0

    def send(self, tick: int, payload: object, rng: random.Random | None = None) -> bool:
        """Queue a message; returns False if the channel dropped it."""
        if self.model.drop_probability > 0.0:
            if rng is None:
                raise StateIntegrityError("drop_probability > 0 requires an RNG")
            if rng.random() < self.model.drop_probability:
                self.dropped += 1
                return False
        self._queue.append((tick + self.model.latency_ticks, payload))
        return True

    def receive(self, tick: int) -> list[object]:
        """All messages whose delivery tick has arrived, in send order."""
        out: list[object] = []
        while self._queue and self._queue[0][0] <= tick:
            out.append(self._queue.popleft()[1])
        return out


@dataclass(frozen=True)
class TrackReport:
    """Missile-to-ground downlink: everything the ground needs to steer it.

    Carries the measured target kinematics in absolute coordinates so the
    ground-side solution is bit-identical to an onboard one; bearing and
    range are the radar-style derived quantities.
    """

    issued_tick: int
    missile_pose: Pose
    bearing: float
    target_range: float
    target_pos: Vec2
    target_vel: Vec2


def make_track_report(
    tick: int, missile_pose: Pose, target_pos: Vec2, target_vel: Vec2
) -> TrackReport:
    return TrackReport(
        issued_tick=tick,
        missile_pose=missile_pose,
        bearing=relative_bearing(missile_pose, target_pos),
        target_range=separation(missile_pose.position(), target_pos),
        target_pos=target_pos,
        target_vel=target_vel,
    )


def ground_command(
    report: TrackReport,
    k_turn: float = 4.0,
    duty: float = 0.8,
    params: VehicleParams | None = None,
) -> GuidanceCommand:
    """Ground-station steering computed purely from a downlinked report."""
    return direct_intercept(
        report.missile_pose,
        report.target_pos,
        report.target_vel,
        k_turn=k_turn,
        duty=duty,
        params=params,
    )
