"""Requisite-variety audit for a controller facing a disturbance set.

A regulator can hold its essential variable only if it has at least as many
distinct responses as there are disturbances, and every disturbance is
actually covered by some response.  The audit checks both conditions and
reports the margin (responses minus disturbances) and any uncovered
disturbances by label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class VarietyTable:
    """Labelled disturbance set, response set, and coverage mapping."""

    disturbances: tuple[str, ...]
    responses: tuple[str, ...]
    mapping: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class VarietyAudit:
    stable: bool
    margin: int  # len(responses) - len(disturbances)
    uncovered: tuple[str, ...]


def build_table(
    disturbances: Sequence[str],
    responses: Sequence[str],
    mapping: Mapping[str, Sequence[str]],
) -> VarietyTable:
    if len(set(disturbances)) != len(disturbances):
        raise ValueError("duplicate disturbance labels")
    if len(set(responses)) != len(responses):
        raise ValueError("duplicate response labels")
    d_set = set(disturbances)
    r_set = set(responses)
    clean: dict[str, tuple[str, ...]] = {}
    for dist, reps in mapping.items():
        if dist not in d_set:
            raise ValueError(f"mapping key {dist!r} is not a listed disturbance")
        for rep in reps:
            if rep not in r_set:
                raise ValueError(f"mapping value {rep!r} is not a listed response")
        clean[dist] = tuple(reps)
    return VarietyTable(tuple(disturbances), tuple(responses), clean)


def variety_audit(table: VarietyTable) -> VarietyAudit:
    uncovered = tuple(
        d for d in table.disturbances if not table.mapping.get(d)
    )
    margin = len(table.responses) - len(table.disturbances)
    stable = margin >= 0 and not uncovered
    return VarietyAudit(stable=stable, margin=margin, uncovered=uncovered)


def audit_sets(
    disturbances: Sequence[str],
    responses: Sequence[str],
    mapping: Mapping[str, Sequence[str]],
) -> VarietyAudit:
    """One-call convenience: validate the table, then audit it."""
    return variety_audit(build_table(disturbances, responses, mapping))
