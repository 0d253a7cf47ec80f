"""Deterministic pursuit-guidance simulator.

Two differential-drive vehicles on a plane: a leader carrying a light beacon
and a follower that senses it through a pair of angled photoresistors, plus
range-style guidance laws (tail chase, direct intercept, command guidance)
and a requisite-variety audit for response repertoires.
"""

from .engine import EpisodeResult, SweepRow, TickRecord, World, capture_check, run, sweep
from .errors import (
    DegenerateGeometryError,
    ReplayMismatchError,
    ScenarioError,
    SimulationError,
    StateIntegrityError,
)
from .geometry import Pose, relative_bearing, separation, wrap_angle
from .guidance import (
    DelayLink,
    GuidanceCommand,
    InterceptSolution,
    LinkModel,
    TrackReport,
    VelocityEstimator,
    direct_intercept,
    intercept_solve,
    light_follow,
    tail_chase,
)
from .kinematics import VehicleParams, VehicleState, WheelCommand, apply_handicap, step
from .scenario import Scenario, load_scenario, parse_scenario, save_scenario, scenario_hash
from .sensing import Beacon, PhotoCell, SensorReading, SensorRig, sense
from .variety import VarietyAudit, VarietyTable, audit_sets, build_table, variety_audit

__version__ = "0.1.0"

__all__ = [
    "Beacon",
    "DegenerateGeometryError",
    "DelayLink",
    "EpisodeResult",
    "GuidanceCommand",
    "InterceptSolution",
    "LinkModel",
    "PhotoCell",
    "Pose",
    "ReplayMismatchError",
    "Scenario",
    "ScenarioError",
    "SensorReading",
    "SensorRig",
    "SimulationError",
    "StateIntegrityError",
    "SweepRow",
    "TickRecord",
    "TrackReport",
    "VarietyAudit",
    "VarietyTable",
    "VehicleParams",
    "VehicleState",
    "VelocityEstimator",
    "WheelCommand",
    "World",
    "apply_handicap",
    "audit_sets",
    "build_table",
    "capture_check",
    "direct_intercept",
    "intercept_solve",
    "light_follow",
    "load_scenario",
    "parse_scenario",
    "relative_bearing",
    "run",
    "save_scenario",
    "scenario_hash",
    "sense",
    "separation",
    "step",
    "sweep",
    "tail_chase",
    "variety_audit",
    "wrap_angle",
    "__version__",
]
