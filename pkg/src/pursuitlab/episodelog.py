"""Episode logs: one JSON object per line, replayable byte for byte.

The first line is a header embedding the complete scenario (defaults filled
in) plus the seed, so a log file alone is enough to re-run the episode.  A
replay re-simulates from that header and compares every serialized line to
the file; any difference is reported with its line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Any, Iterator

from .engine import TickRecord, World
from .errors import ReplayMismatchError, ScenarioError
from .scenario import Scenario, parse_scenario, scenario_hash, scenario_to_dict

LOG_VERSION = 1


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def header_line(scenario: Scenario, seed: int) -> str:
    return _dumps(
        {
            "kind": "header",
            "v": LOG_VERSION,
            "seed": seed,
            "scenario_hash": scenario_hash(scenario),
            "scenario": scenario_to_dict(scenario),
        }
    )


def record_line(record: TickRecord) -> str:
    reading = None
    if record.reading is not None:
        reading = {
            "fused": record.reading.fused,
            "e_left": record.reading.e_left,
            "e_right": record.reading.e_right,
            "differentiable": record.reading.differentiable,
        }
    return _dumps(
        {
            "kind": "tick",
            "tick": record.tick,
            "t": record.t,
            "leader": {
                "x": record.leader_pose.x,
                "y": record.leader_pose.y,
                "heading": record.leader_pose.heading,
                "left": record.leader_command.left,
                "right": record.leader_command.right,
                "mode": record.leader_mode,
            },
            "follower": {
                "x": record.follower_pose.x,
                "y": record.follower_pose.y,
                "heading": record.follower_pose.heading,
                "left": record.follower_command.left,
                "right": record.follower_command.right,
                "mode": record.follower_mode,
            },
            "sensor": reading,
            "separation": record.separation,
            "events": list(record.events),
            "domains": record.domains,
        }
    )


class LogWriter:
    """Streams header + tick lines to an open text file."""

    def __init__(self, fh: IO[str], scenario: Scenario, seed: int):
        self._fh = fh
        fh.write(header_line(scenario, seed) + "\n")

    def append(self, record: TickRecord) -> None:
        self._fh.write(record_line(record) + "\n")


def read_log(path: str) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """Parse a log file into its header dict and tick dicts."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ScenarioError(f"log file {path} is empty")
    header = json.loads(lines[0])
    if header.get("kind") != "header":
        raise ScenarioError(f"log file {path} does not start with a header line")
    records = [json.loads(line) for line in lines[1:] if line]
    return header, records


@dataclass
class ReplayReport:
    ok: bool
    ticks_checked: int
    first_divergence: int | None  # 1-based line number in the file


def replay(path: str, strict: bool = False) -> ReplayReport:
    """Re-simulate from the header and byte-compare every line.

    With strict=True a divergence raises ReplayMismatchError instead of
    being reported in the return value.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ScenarioError(f"log file {path} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"log header is not valid JSON: {exc}") from exc
    if header.get("kind") != "header":
        raise ScenarioError(f"log file {path} does not start with a header line")
    scenario = parse_scenario(header["scenario"])
    seed = int(header["seed"])

    expected_header = header_line(scenario, seed)
    if expected_header != lines[0]:
        if strict:
            raise ReplayMismatchError("header does not round-trip at line 1")
        return ReplayReport(ok=False, ticks_checked=0, first_divergence=1)

    world = World(scenario, seed=seed)
    checked = 0
    aborted = False
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line_no == 2:
            produced = record_line(world.initial_record())
        elif aborted or world.done():
            if strict:
                raise ReplayMismatchError(
                    f"log has extra lines after the episode ended (line {line_no})"
                )
            return ReplayReport(ok=False, ticks_checked=checked, first_divergence=line_no)
        else:
            try:
                produced = record_line(world.step())
            except Exception as exc:
                from .engine import _diagnostic_record

                produced = record_line(_diagnostic_record(world, exc))
                aborted = True
        checked += 1
        if produced != line:
            if strict:
                raise ReplayMismatchError(f"replay diverged at line {line_no}")
            return ReplayReport(ok=False, ticks_checked=checked, first_divergence=line_no)
    if not world.done() and not aborted:
        if strict:
            raise ReplayMismatchError("log ends before the episode does")
        return ReplayReport(ok=False, ticks_checked=checked, first_divergence=len(lines) + 1)
    return ReplayReport(ok=True, ticks_checked=checked, first_divergence=None)


def iter_poses(records: list[dict[str, Any]], role: str) -> Iterator[tuple[float, float]]:
    for rec in records:
        body = rec[role]
        yield body["x"], body["y"]
