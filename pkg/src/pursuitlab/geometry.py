"""Planar geometry helpers shared by kinematics, sensing, and guidance.

Conventions: world frame is right-handed with headings measured
counterclockwise from +x.  A positive bearing is to the vehicle's left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec2 = tuple[float, float]


def wrap_angle(theta: float) -> float:
    """Normalize an angle in radians to the half-open interval (-pi, pi]."""
    w = math.remainder(theta, math.tau)
    if w <= -math.pi:
        w += math.tau
    return w


@dataclass(frozen=True)
class Pose:
    """Position and heading of a vehicle in the world frame."""

    x: float
    y: float
    heading: float

    def position(self) -> Vec2:
        return (self.x, self.y)


def separation(a: Vec2, b: Vec2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(b[0] - a[0], b[1] - a[1])


def relative_bearing(pose: Pose, point: Vec2) -> float:
    """Bearing from a pose to a point, in (-pi, pi], positive to the left."""
    return wrap_angle(math.atan2(point[1] - pose.y, point[0] - pose.x) - pose.heading)
