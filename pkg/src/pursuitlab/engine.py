"""Episode engine: deterministic tick loop over two vehicles.

Each tick runs five phases in a fixed order:

  1. SENSE      photoresistor rig sampled against the beacon (informational)
  2. DECIDE     both policies pick raw wheel commands (cognitive)
  3. TRANSMIT   delayed/dropped radio exchange, human drive ingress (social)
  4. ACT        handicaps applied, closed-form pose integration (physical)
  5. EVENTS     separation, capture, timeout (physical)

A single random stream drives everything nondeterministic-looking, with a
fixed draw order per tick: sensor noise first (only when a rig with positive
noise_sigma is present), then the downlink drop draw, then the uplink drop
draw.  Nothing else touches the stream, so episodes replay bit-exactly from
the seed alone.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ScenarioError, StateIntegrityError
from .geometry import Pose, separation
from .guidance import (
    DelayLink,
    EvaderConfig,
    EvaderMemory,
    EvaderPolicy,
    GuidanceCommand,
    LinkModel,
    VelocityEstimator,
    direct_intercept,
    ground_command,
    light_follow,
    make_track_report,
    tail_chase,
)
from .kinematics import VehicleParams, VehicleState, WheelCommand, apply_handicap, step
from .scenario import Scenario, place_follower_behind
from .sensing import SensorReading, sense

DEADMAN_S = 0.5  # human drive older than this coasts to a stop


@dataclass
class TickRecord:
    """Everything observable about one completed tick.

    Poses are post-integration; the sensor reading and commands are the ones
    that produced that integration.  `domains` annotates the phases by the
    kind of coupling they exercise, which keeps log analysis honest about
    where a behavior came from.
    """

    tick: int
    t: float
    leader_pose: Pose
    follower_pose: Pose
    leader_command: WheelCommand
    follower_command: WheelCommand
    leader_mode: str
    follower_mode: str
    reading: SensorReading | None
    separation: float
    events: tuple[str, ...]
    domains: dict[str, Any]


@dataclass
class EpisodeResult:
    outcome: str  # "capture" | "timeout"
    time_s: float
    time_to_capture: float | None
    ticks: int
    min_separation: float
    final_separation: float
    leader_pose: Pose
    follower_pose: Pose
    seed: int
    log_path: str | None = None


def capture_check(leader_pose: Pose, follower_pose: Pose,
                  leader_params: VehicleParams, follower_params: VehicleParams,
                  override: float | None = None) -> bool:
    """True iff the bodies touch: separation <= capture radius, inclusive."""
    radius = override if override is not None else (
        leader_params.body_radius + follower_params.body_radius
    )
    return separation(leader_pose.position(), follower_pose.position()) <= radius


@dataclass
class SweepRow:
    distance_m: float
    capture_rate: float
    mean_time_s: float  # nan when nothing was captured
    runs: int


class _HumanDrive:
    """Latest drive command from an operator, with a wall-clock dead-man."""

    def __init__(self, now_fn: Callable[[], float]):
        self._now = now_fn
        self._command = WheelCommand(0.0, 0.0)
        self._stamp: float | None = None

    def set(self, command: WheelCommand) -> None:
        self._command = command
        self._stamp = self._now()

    def current(self) -> WheelCommand:
        if self._stamp is None or self._now() - self._stamp > DEADMAN_S:
            return WheelCommand(0.0, 0.0)
        return self._command


class _LeaderRuntime:
    def __init__(self, policy: dict[str, Any], params: VehicleParams, dt: float,
                 now_fn: Callable[[], float]):
        self.name = policy["name"]
        self.params = params
        self.dt = dt
        self.human: _HumanDrive | None = None
        self.memory = EvaderMemory()
        if self.name == "human":
            self.human = _HumanDrive(now_fn)
            self.config = EvaderConfig()
        elif self.name == "turn_and_run":
            self.config = EvaderConfig(
                cruise_duty=policy["cruise_duty"],
                trigger_range=policy["trigger_range"],
                clear_range=policy["clear_range"],
                turn_radius=policy["turn_radius"],
            )
        elif self.name == "zigzag":
            self.config = EvaderConfig(
                duty=policy["duty"], steer=policy["steer"], period_s=policy["period_s"]
            )
        elif self.name == "circle":
            self.config = EvaderConfig(duty=policy["duty"], steer=policy["steer"])
        else:
            self.config = EvaderConfig(duty=policy["duty"])

    def decide(self, state: VehicleState, tick: int, pursuer: Pose) -> GuidanceCommand:
        if self.human is not None:
            return GuidanceCommand(self.human.current(), "human")
        from .guidance import evader

        return evader(
            EvaderPolicy(self.name),
            state,
            tick,
            self.params,
            dt=self.dt,
            config=self.config,
            pursuer_pose=pursuer,
            memory=self.memory,
        )


class _FollowerRuntime:
    def __init__(self, policy: dict[str, Any], params: VehicleParams, dt: float):
        self.name = policy["name"]
        self.params = params
        self.policy = policy
        self.estimator = VelocityEstimator(dt)
        self.downlink: DelayLink | None = None
        self.uplink: DelayLink | None = None
        self.held = WheelCommand(0.0, 0.0)
        self.held_mode = "command_hold"
        if self.name == "command_guided":
            self.downlink = DelayLink(LinkModel(**policy["downlink"]))
            self.uplink = DelayLink(LinkModel(**policy["uplink"]))

    def decide(self, state: VehicleState, reading: SensorReading | None,
               leader_pose: Pose) -> GuidanceCommand:
        if self.name == "light_follow":
            if reading is None:
                raise StateIntegrityError("light_follow needs a sensor rig")
            return light_follow(
                reading,
                gain=self.policy["gain"],
                base_duty=self.policy["base_duty"],
                search=self.policy["search"],
            )
        if self.name == "tail_chase":
            return tail_chase(
                state.pose,
                leader_pose.position(),
                k_turn=self.policy["k_turn"],
                duty=self.policy["duty"],
                params=self.params,
            )
        if self.name == "direct_intercept":
            velocity = self.estimator.update(leader_pose.position())
            return direct_intercept(
                state.pose,
                leader_pose.position(),
                velocity,
                k_turn=self.policy["k_turn"],
                duty=self.policy["duty"],
                params=self.params,
            )
        # command_guided: the local vehicle only replays the last uplinked
        # command; the actual solution runs on the ground side in TRANSMIT.
        return GuidanceCommand(self.held, self.held_mode)


class World:
    """One live episode.  Construct, then call step() until done() or run()."""

    def __init__(self, scenario: Scenario, seed: int | None = None,
                 now_fn: Callable[[], float] | None = None):
        import time

        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.rng = random.Random(self.seed)
        self.dt = scenario.dt
        self.tick = 0
        self.max_ticks = math.ceil(scenario.timeout_s / scenario.dt)
        self.capture_radius = scenario.effective_capture_radius()
        now = now_fn if now_fn is not None else time.monotonic
        self.leader = VehicleState(scenario.leader.pose)
        self.follower = VehicleState(scenario.follower.pose)
        self._leader_rt = _LeaderRuntime(scenario.leader.policy, scenario.leader.params, self.dt, now)
        self._follower_rt = _FollowerRuntime(scenario.follower.policy, scenario.follower.params, self.dt)
        self.outcome: str | None = None
        sep0 = separation(self.leader.pose.position(), self.follower.pose.position())
        self.min_separation = sep0
        if sep0 <= self.capture_radius:
            self.outcome = "capture"

    @property
    def human_drive(self) -> _HumanDrive | None:
        return self._leader_rt.human

    def done(self) -> bool:
        return self.outcome is not None or self.tick >= self.max_ticks

    def set_follower_policy(self, name: str) -> None:
        """Swap the follower's policy mid-session, using that policy's defaults."""
        from .scenario import _POLICY_DEFAULTS, FOLLOWER_POLICIES

        if name not in FOLLOWER_POLICIES:
            raise ScenarioError(
                f"unknown follower policy {name!r}; choose one of {', '.join(FOLLOWER_POLICIES)}"
            )
        if name == "light_follow" and self.scenario.follower.rig is None:
            raise ScenarioError("scenario has no sensor rig; light_follow unavailable")
        import copy

        policy = {"name": name, **copy.deepcopy(_POLICY_DEFAULTS[name])}
        self._follower_rt = _FollowerRuntime(policy, self.scenario.follower.params, self.dt)

    def initial_record(self) -> TickRecord:
        """Tick 0: starting poses before anything has sensed or moved."""
        sep = separation(self.leader.pose.position(), self.follower.pose.position())
        zero = WheelCommand(0.0, 0.0)
        events = ("capture",) if self.outcome == "capture" else ()
        return TickRecord(
            tick=0,
            t=0.0,
            leader_pose=self.leader.pose,
            follower_pose=self.follower.pose,
            leader_command=zero,
            follower_command=zero,
            leader_mode="init",
            follower_mode="init",
            reading=None,
            separation=sep,
            events=events,
            domains={
                "informational": None,
                "cognitive": None,
                "social": None,
                "physical": {"separation": sep},
            },
        )

    def step(self) -> TickRecord:
        if self.done():
            raise StateIntegrityError("step() called on a finished episode")
        scenario = self.scenario
        domains: dict[str, Any] = {}

        # SENSE (informational): the beacon as seen from the follower deck
        reading: SensorReading | None = None
        rig = scenario.follower.rig
        if rig is not None:
            beacon_pos = scenario.leader.beacon.world_position(self.leader.pose)
            reading = sense(
                beacon_pos,
                scenario.leader.beacon.intensity,
                self.follower.pose,
                rig,
                rng=self.rng if rig.noise_sigma > 0.0 else None,
            )
            domains["informational"] = {
                "fused": reading.fused,
                "differentiable": reading.differentiable,
            }
        else:
            domains["informational"] = None

        # DECIDE (cognitive): raw commands before any link or handicap
        lead_cmd = self._leader_rt.decide(self.leader, self.tick, self.follower.pose)
        follow_cmd = self._follower_rt.decide(self.follower, reading, self.leader.pose)
        domains["cognitive"] = {"leader": lead_cmd.mode_tag, "follower": follow_cmd.mode_tag}

        # TRANSMIT (social): radio exchange for command guidance
        social: dict[str, Any] = {}
        rt = self._follower_rt
        if rt.name == "command_guided":
            velocity = rt.estimator.update(self.leader.pose.position())
            report = make_track_report(
                self.tick, self.follower.pose, self.leader.pose.position(), velocity
            )
            sent = rt.downlink.send(self.tick, report, self.rng)
            social["downlink"] = "sent" if sent else "dropped"
            uplink_status = "idle"
            for arrived in rt.downlink.receive(self.tick):
                ground = ground_command(
                    arrived,
                    k_turn=rt.policy["k_turn"],
                    duty=rt.policy["duty"],
                    params=rt.params,
                )
                ok = rt.uplink.send(self.tick, ground, self.rng)
                uplink_status = "sent" if ok else "dropped"
            social["uplink"] = uplink_status
            for command in rt.uplink.receive(self.tick):
                rt.held = command.wheel
                rt.held_mode = command.mode_tag
            follow_cmd = GuidanceCommand(rt.held, rt.held_mode)
        domains["social"] = social or None

        # ACT (physical): handicap, then exact constant-twist integration
        lead_applied = apply_handicap(lead_cmd.wheel, scenario.leader.params)
        follow_applied = apply_handicap(follow_cmd.wheel, scenario.follower.params)
        self.leader = step(self.leader, lead_applied, scenario.leader.params, self.dt)
        self.follower = step(self.follower, follow_applied, scenario.follower.params, self.dt)
        if scenario.arena_half_extent > 0.0:
            self.leader = _clamp_to_arena(self.leader, scenario.arena_half_extent)
            self.follower = _clamp_to_arena(self.follower, scenario.arena_half_extent)

        # EVENTS (physical): range bookkeeping and terminal conditions
        self.tick += 1
        sep = separation(self.leader.pose.position(), self.follower.pose.position())
        self.min_separation = min(self.min_separation, sep)
        events: list[str] = []
        if sep <= self.capture_radius:
            self.outcome = "capture"
            events.append("capture")
        elif self.tick >= self.max_ticks:
            self.outcome = "timeout"
            events.append("timeout")
        domains["physical"] = {"separation": sep}

        return TickRecord(
            tick=self.tick,
            t=self.tick * self.dt,
            leader_pose=self.leader.pose,
            follower_pose=self.follower.pose,
            leader_command=lead_applied,
            follower_command=follow_applied,
            leader_mode=lead_cmd.mode_tag,
            follower_mode=follow_cmd.mode_tag,
            reading=reading,
            separation=sep,
            events=tuple(events),
            domains=domains,
        )


def _clamp_to_arena(state: VehicleState, half_extent: float) -> VehicleState:
    x = min(max(state.pose.x, -half_extent), half_extent)
    y = min(max(state.pose.y, -half_extent), half_extent)
    if x == state.pose.x and y == state.pose.y:
        return state
    return VehicleState(Pose(x, y, state.pose.heading), state.tick)


def run(scenario: Scenario, seed: int | None = None,
        on_record: Callable[[TickRecord], None] | None = None,
        world: World | None = None) -> EpisodeResult:
    """Run one episode to capture or timeout.

    `on_record` sees every TickRecord as it happens, starting with the tick-0
    snapshot (used for logging and figure data); pass a prebuilt `world` to
    observe one mid-flight.  A policy failure mid-episode emits a diagnostic
    record before the error propagates.
    """
    if world is None:
        world = World(scenario, seed=seed)
    if on_record is not None:
        on_record(world.initial_record())
    while not world.done():
        try:
            record = world.step()
        except Exception as exc:
            if on_record is not None:
                on_record(_diagnostic_record(world, exc))
            raise
        if on_record is not None:
            on_record(record)
    outcome = world.outcome or "timeout"
    time_s = world.tick * world.dt
    return EpisodeResult(
        outcome=outcome,
        time_s=time_s,
        time_to_capture=time_s if outcome == "capture" else None,
        ticks=world.tick,
        min_separation=world.min_separation,
        final_separation=separation(
            world.leader.pose.position(), world.follower.pose.position()
        ),
        leader_pose=world.leader.pose,
        follower_pose=world.follower.pose,
        seed=world.seed,
    )


def _diagnostic_record(world: World, exc: Exception) -> TickRecord:
    """Terminal record written when a policy blows up mid-episode."""
    sep = separation(world.leader.pose.position(), world.follower.pose.position())
    zero = WheelCommand(0.0, 0.0)
    return TickRecord(
        tick=world.tick + 1,
        t=(world.tick + 1) * world.dt,
        leader_pose=world.leader.pose,
        follower_pose=world.follower.pose,
        leader_command=zero,
        follower_command=zero,
        leader_mode="abort",
        follower_mode="abort",
        reading=None,
        separation=sep,
        events=("abort",),
        domains={
            "informational": None,
            "cognitive": {"error": f"{type(exc).__name__}: {exc}"},
            "social": None,
            "physical": {"separation": sep},
        },
    )


def sweep(template: Scenario, distances: list[float], repeats: int) -> list[SweepRow]:
    """Repeat the template across start separations.

    Run i of distance index d uses seed `template.seed + d*repeats + i`, so
    individual runs can be replayed without rerunning the sweep.
    """
    if repeats < 1:
        raise ScenarioError(f"repeats must be >= 1, got {repeats}")
    if not distances:
        raise ScenarioError("at least one distance is required")
    rows: list[SweepRow] = []
    run_index = 0
    for distance in distances:
        scenario = place_follower_behind(template, distance)
        captures = 0
        total_time = 0.0
        for _ in range(repeats):
            result = run(scenario, seed=template.seed + run_index)
            run_index += 1
            if result.outcome == "capture":
                captures += 1
                total_time += result.time_s
        rows.append(
            SweepRow(
                distance_m=distance,
                capture_rate=captures / repeats,
                mean_time_s=(total_time / captures) if captures else math.nan,
                runs=repeats,
            )
        )
    return rows
