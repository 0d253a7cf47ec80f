"""Scenario documents: nested key/value files describing one episode.

A scenario pins everything an episode needs: timestep, timeout, seed, both
vehicles with their policies, the beacon, and the sensor rig.  Any field can
be omitted to take its default, but unknown fields are hard errors that name
the offending key, so typos cannot silently change an experiment.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import yaml

from .errors import ScenarioError
from .geometry import Pose
from .kinematics import VehicleParams
from .sensing import Beacon, PhotoCell, SensorRig

LEADER_POLICIES = ("straight", "zigzag", "circle", "turn_and_run", "human")
FOLLOWER_POLICIES = ("light_follow", "tail_chase", "direct_intercept", "command_guided")

_LINK_DEFAULTS = {"latency_ticks": 0, "drop_probability": 0.0}

# per-policy knobs and their defaults; scenario fields outside these are rejected
_POLICY_DEFAULTS: dict[str, dict[str, Any]] = {
    "straight": {"duty": 0.5},
    "zigzag": {"duty": 0.2, "steer": 1.0, "period_s": 2.6},
    "circle": {"duty": 0.5, "steer": 0.5},
    "turn_and_run": {
        "cruise_duty": 0.5,
        "trigger_range": 0.508,
        "clear_range": 0.55,
        "turn_radius": 0.28,
    },
    "human": {},
    "light_follow": {"gain": 6.0, "base_duty": 0.6, "search": "crawl"},
    "tail_chase": {"k_turn": 4.0, "duty": 0.8},
    "direct_intercept": {"k_turn": 4.0, "duty": 0.8},
    "command_guided": {
        "k_turn": 4.0,
        "duty": 0.8,
        "downlink": dict(_LINK_DEFAULTS),
        "uplink": dict(_LINK_DEFAULTS),
    },
}

_PARAM_FIELDS = (
    "track_width",
    "body_radius",
    "max_wheel_speed",
    "speed_cap_fraction",
    "min_turn_radius",
)
_CELL_FIELDS = ("mount_angle", "half_angle", "gamma", "r_ref", "r_dark")


def _require_mapping(value: Any, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ScenarioError(f"'{path}' must be a mapping, got {type(value).__name__}")
    return dict(value)


def _check_known(mapping: Mapping[str, Any], allowed: tuple[str, ...], path: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ScenarioError(f"unknown field '{path}.{key}'")


def _number(mapping: Mapping[str, Any], key: str, default: float, path: str) -> float:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"'{path}.{key}' must be a number, got {value!r}")
    if not math.isfinite(float(value)):
        raise ScenarioError(f"'{path}.{key}' must be finite, got {value!r}")
    return float(value)


def _integer(mapping: Mapping[str, Any], key: str, default: int, path: str) -> int:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"'{path}.{key}' must be an integer, got {value!r}")
    return int(value)


def _parse_pose(raw: Any, path: str) -> Pose:
    data = _require_mapping(raw, path)
    _check_known(data, ("x", "y", "heading"), path)
    return Pose(
        x=_number(data, "x", 0.0, path),
        y=_number(data, "y", 0.0, path),
        heading=_number(data, "heading", 0.0, path),
    )


def _parse_params(raw: Any, path: str) -> VehicleParams:
    data = _require_mapping(raw, path)
    _check_known(data, _PARAM_FIELDS, path)
    defaults = VehicleParams()
    params = VehicleParams(
        track_width=_number(data, "track_width", defaults.track_width, path),
        body_radius=_number(data, "body_radius", defaults.body_radius, path),
        max_wheel_speed=_number(data, "max_wheel_speed", defaults.max_wheel_speed, path),
        speed_cap_fraction=_number(
            data, "speed_cap_fraction", defaults.speed_cap_fraction, path
        ),
        min_turn_radius=_number(data, "min_turn_radius", defaults.min_turn_radius, path),
    )
    try:
        params.validate()
    except Exception as exc:
        raise ScenarioError(f"invalid '{path}': {exc}") from exc
    return params


def _parse_policy(raw: Any, allowed_names: tuple[str, ...], path: str) -> dict[str, Any]:
    data = _require_mapping(raw, path)
    name = data.get("name")
    if name not in allowed_names:
        raise ScenarioError(
            f"'{path}.name' must be one of {', '.join(allowed_names)}, got {name!r}"
        )
    defaults = _POLICY_DEFAULTS[name]
    _check_known(data, ("name",) + tuple(defaults), path)
    policy: dict[str, Any] = {"name": name}
    for key, default in defaults.items():
        if isinstance(default, dict):  # nested link model
            sub = _require_mapping(data.get(key), f"{path}.{key}")
            _check_known(sub, tuple(default), f"{path}.{key}")
            policy[key] = {
                "latency_ticks": _integer(sub, "latency_ticks", 0, f"{path}.{key}"),
                "drop_probability": _number(sub, "drop_probability", 0.0, f"{path}.{key}"),
            }
        elif key == "search":
            value = data.get(key, default)
            if value not in ("crawl", "stop"):
                raise ScenarioError(f"'{path}.search' must be 'crawl' or 'stop', got {value!r}")
            policy[key] = value
        else:
            policy[key] = _number(data, key, default, path)
    return policy


def _parse_beacon(raw: Any, path: str) -> Beacon:
    data = _require_mapping(raw, path)
    _check_known(data, ("intensity", "mount_offset"), path)
    offset = data.get("mount_offset", [0.0, 0.0])
    if not (isinstance(offset, (list, tuple)) and len(offset) == 2):
        raise ScenarioError(f"'{path}.mount_offset' must be a [x, y] pair")
    beacon = Beacon(
        intensity=_number(data, "intensity", Beacon().intensity, path),
        mount_offset=(float(offset[0]), float(offset[1])),
    )
    if beacon.intensity <= 0:
        raise ScenarioError(f"'{path}.intensity' must be positive")
    return beacon


def _parse_cell(raw: Any, default: PhotoCell, path: str) -> PhotoCell:
    data = _require_mapping(raw, path)
    _check_known(data, _CELL_FIELDS, path)
    return PhotoCell(
        mount_angle=_number(data, "mount_angle", default.mount_angle, path),
        half_angle=_number(data, "half_angle", default.half_angle, path),
        gamma=_number(data, "gamma", default.gamma, path),
        r_ref=_number(data, "r_ref", default.r_ref, path),
        r_dark=_number(data, "r_dark", default.r_dark, path),
    )


def _parse_rig(raw: Any, path: str) -> SensorRig:
    data = _require_mapping(raw, path)
    _check_known(data, ("left", "right", "ambient", "noise_sigma", "dead_band"), path)
    defaults = SensorRig()
    rig = SensorRig(
        left=_parse_cell(data.get("left"), defaults.left, f"{path}.left"),
        right=_parse_cell(data.get("right"), defaults.right, f"{path}.right"),
        ambient=_number(data, "ambient", defaults.ambient, path),
        noise_sigma=_number(data, "noise_sigma", defaults.noise_sigma, path),
        dead_band=_number(data, "dead_band", defaults.dead_band, path),
    )
    try:
        rig.validate()
    except Exception as exc:
        raise ScenarioError(f"invalid '{path}': {exc}") from exc
    return rig


@dataclass
class LeaderSpec:
    pose: Pose = field(default_factory=lambda: Pose(0.0, 0.0, 0.0))
    params: VehicleParams = field(default_factory=VehicleParams)
    policy: dict[str, Any] = field(default_factory=lambda: {"name": "straight", "duty": 0.5})
    beacon: Beacon = field(default_factory=Beacon)


@dataclass
class FollowerSpec:
    pose: Pose = field(default_factory=lambda: Pose(-0.5, 0.0, 0.0))
    params: VehicleParams = field(default_factory=VehicleParams)
    policy: dict[str, Any] = field(
        default_factory=lambda: dict(_POLICY_DEFAULTS["light_follow"], name="light_follow")
    )
    rig: SensorRig | None = field(default_factory=SensorRig)


@dataclass
class Scenario:
    """Complete, validated description of one episode."""

    dt: float = 0.02
    timeout_s: float = 120.0
    seed: int = 2020
    arena_half_extent: float = 0.0  # 0 disables the square boundary
    capture_radius: float | None = None  # None: sum of body radii
    leader: LeaderSpec = field(default_factory=LeaderSpec)
    follower: FollowerSpec = field(default_factory=FollowerSpec)

    def effective_capture_radius(self) -> float:
        if self.capture_radius is not None:
            return self.capture_radius
        return self.leader.params.body_radius + self.follower.params.body_radius


def parse_scenario(data: Any) -> Scenario:
    """Validate a raw mapping (parsed YAML/JSON) into a Scenario."""
    top = _require_mapping(data, "scenario")
    _check_known(
        top,
        (
            "dt",
            "timeout_s",
            "seed",
            "arena_half_extent",
            "capture_radius",
            "leader",
            "follower",
        ),
        "scenario",
    )
    dt = _number(top, "dt", 0.02, "scenario")
    timeout_s = _number(top, "timeout_s", 120.0, "scenario")
    if dt <= 0:
        raise ScenarioError(f"'scenario.dt' must be positive, got {dt}")
    if timeout_s <= dt:
        raise ScenarioError(f"'scenario.timeout_s' must exceed dt, got {timeout_s}")
    seed = _integer(top, "seed", 2020, "scenario")
    arena = _number(top, "arena_half_extent", 0.0, "scenario")
    if arena < 0:
        raise ScenarioError(f"'scenario.arena_half_extent' must be >= 0, got {arena}")
    capture_radius: float | None
    if top.get("capture_radius") is None:
        capture_radius = None
    else:
        capture_radius = _number(top, "capture_radius", 0.0, "scenario")
        if capture_radius <= 0:
            raise ScenarioError("'scenario.capture_radius' must be positive when set")

    leader_raw = _require_mapping(top.get("leader"), "leader")
    _check_known(leader_raw, ("pose", "params", "policy", "beacon"), "leader")
    leader = LeaderSpec(
        pose=_parse_pose(leader_raw.get("pose"), "leader.pose"),
        params=_parse_params(leader_raw.get("params"), "leader.params"),
        policy=_parse_policy(leader_raw.get("policy", {"name": "straight"}), LEADER_POLICIES, "leader.policy"),
        beacon=_parse_beacon(leader_raw.get("beacon"), "leader.beacon"),
    )

    follower_raw = _require_mapping(top.get("follower"), "follower")
    _check_known(follower_raw, ("pose", "params", "policy", "rig"), "follower")
    policy = _parse_policy(
        follower_raw.get("policy", {"name": "light_follow"}), FOLLOWER_POLICIES, "follower.policy"
    )
    default_pose = FollowerSpec().pose
    rig: SensorRig | None
    if "rig" in follower_raw or policy["name"] == "light_follow":
        rig = _parse_rig(follower_raw.get("rig"), "follower.rig")
    else:
        rig = None
    follower = FollowerSpec(
        pose=_parse_pose(follower_raw.get("pose", {"x": default_pose.x}), "follower.pose"),
        params=_parse_params(follower_raw.get("params"), "follower.params"),
        policy=policy,
        rig=rig,
    )
    return Scenario(
        dt=dt,
        timeout_s=timeout_s,
        seed=seed,
        arena_half_extent=arena,
        capture_radius=capture_radius,
        leader=leader,
        follower=follower,
    )


def load_scenario(path: str) -> Scenario:
    """Load and validate a YAML scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ScenarioError(f"could not parse scenario file {path}: {exc}") from exc
    return parse_scenario(raw)


def _pose_dict(pose: Pose) -> dict[str, float]:
    return {"x": pose.x, "y": pose.y, "heading": pose.heading}


def _params_dict(params: VehicleParams) -> dict[str, float]:
    return {name: getattr(params, name) for name in _PARAM_FIELDS}


def _cell_dict(cell: PhotoCell) -> dict[str, float]:
    return {name: getattr(cell, name) for name in _CELL_FIELDS}


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Fully-defaulted plain mapping; the canonical form used for hashing."""
    follower: dict[str, Any] = {
        "pose": _pose_dict(scenario.follower.pose),
        "params": _params_dict(scenario.follower.params),
        "policy": copy.deepcopy(scenario.follower.policy),
    }
    if scenario.follower.rig is not None:
        rig = scenario.follower.rig
        follower["rig"] = {
            "left": _cell_dict(rig.left),
            "right": _cell_dict(rig.right),
            "ambient": rig.ambient,
            "noise_sigma": rig.noise_sigma,
            "dead_band": rig.dead_band,
        }
    return {
        "dt": scenario.dt,
        "timeout_s": scenario.timeout_s,
        "seed": scenario.seed,
        "arena_half_extent": scenario.arena_half_extent,
        "capture_radius": scenario.capture_radius,
        "leader": {
            "pose": _pose_dict(scenario.leader.pose),
            "params": _params_dict(scenario.leader.params),
            "policy": copy.deepcopy(scenario.leader.policy),
            "beacon": {
                "intensity": scenario.leader.beacon.intensity,
                "mount_offset": list(scenario.leader.beacon.mount_offset),
            },
        },
        "follower": follower,
    }


def scenario_hash(scenario: Scenario) -> str:
    canonical = json.dumps(scenario_to_dict(scenario), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(scenario), fh, sort_keys=False)


def place_follower_behind(scenario: Scenario, distance: float) -> Scenario:
    """Copy of the scenario with the follower on the leader's axis, behind it."""
    if distance <= 0:
        raise ScenarioError(f"placement distance must be positive, got {distance}")
    out = copy.deepcopy(scenario)
    lead = scenario.leader.pose
    out.follower.pose = Pose(
        x=lead.x - distance * math.cos(lead.heading),
        y=lead.y - distance * math.sin(lead.heading),
        heading=lead.heading,
    )
    return out
