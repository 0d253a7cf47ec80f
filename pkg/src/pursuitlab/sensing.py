"""Beacon illuminance and the two-photoresistor voltage-divider fusion.

The follower carries two angled photoresistors wired as a voltage divider,
so the single fused value in [0, 1] is the divider ratio R_l / (R_l + R_r).
Illuminance at a cell falls off with the inverse square of distance and the
cosine of the angle off the cell boresight, on top of an ambient floor:

    E = ambient + intensity * max(0, cos(theta)) / d**2     (theta <= half_angle)
    E = ambient                                             (otherwise)

Cell resistance follows a power law R = r_ref * E**(-gamma), clamped between
r_ref / 100 and the dark resistance r_dark.  The dark clamp matters: once both
cells are clamped the divider reads exactly 0.5 and carries no direction
information, which gives the rig a hard detection floor.  With the default
calibration that floor sits at 0.30 m, and the steering signal clears the
dead band out to roughly 0.26 m, so differentiation fails beyond about ten
inches of separation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import DegenerateGeometryError, StateIntegrityError
from .geometry import Pose, Vec2, separation, wrap_angle

# divider ratio at which a resistance hits the bright clamp
_BRIGHT_CLAMP_DIVISOR = 100.0


@dataclass
class Beacon:
    """Omnidirectional light source mounted on the leader."""

    intensity: float = 0.00185   # lux-like units at 1 m on boresight
    mount_offset: Vec2 = (0.0, 0.0)  # body frame, rotates with the leader

    def world_position(self, pose: Pose) -> Vec2:
        ox, oy = self.mount_offset
        c = math.cos(pose.heading)
        s = math.sin(pose.heading)
        return (pose.x + c * ox - s * oy, pose.y + s * ox + c * oy)


@dataclass
class PhotoCell:
    """One photoresistor with its mounting angle and response curve."""

    mount_angle: float            # rad relative to vehicle heading, left > 0
    half_angle: float = math.radians(60.0)
    gamma: float = 0.8            # resistance falls as E**(-gamma)
    r_ref: float = 10_000.0       # ohms at unit illuminance
    r_dark: float = 130_000.0     # ohms, full-dark clamp


@dataclass
class SensorRig:
    """Left/right photocell pair plus the fusion calibration."""

    left: PhotoCell = field(default_factory=lambda: PhotoCell(math.radians(30.0)))
    right: PhotoCell = field(default_factory=lambda: PhotoCell(-math.radians(30.0)))
    ambient: float = 0.02
    noise_sigma: float = 0.005
    dead_band: float = 0.02

    def validate(self) -> None:
        if not (self.left.mount_angle > 0.0 > self.right.mount_angle):
            raise StateIntegrityError(
                "cell mount angles must satisfy left > 0 > right, got "
                f"{self.left.mount_angle} and {self.right.mount_angle}"
            )
        for cell in (self.left, self.right):
            if not (0.0 < cell.half_angle <= math.pi):
                raise StateIntegrityError(f"half_angle out of range: {cell.half_angle}")
            if cell.gamma <= 0:
                raise StateIntegrityError(f"gamma must be positive: {cell.gamma}")
            if not (0.0 < cell.r_ref < cell.r_dark):
                raise StateIntegrityError(
                    f"need 0 < r_ref < r_dark, got {cell.r_ref}, {cell.r_dark}"
                )
        if self.ambient < 0 or self.noise_sigma < 0:
            raise StateIntegrityError("ambient and noise_sigma must be >= 0")
        if not (0.0 <= self.dead_band < 0.5):
            raise StateIntegrityError(f"dead_band out of range: {self.dead_band}")


@dataclass(frozen=True)
class SensorReading:
    """One fused sample: divider ratio, raw illuminances, and usability."""

    fused: float
    e_left: float
    e_right: float
    differentiable: bool


def illuminance(
    beacon_pos: Vec2,
    intensity: float,
    pose: Pose,
    cell: PhotoCell,
    ambient: float,
) -> float:
    """Illuminance at a cell mounted on the vehicle at `pose`."""
    d = separation(pose.position(), beacon_pos)
    if d < 1e-9:
        raise DegenerateGeometryError("beacon coincides with the sensor position")
    boresight = pose.heading + cell.mount_angle
    theta = abs(wrap_angle(math.atan2(beacon_pos[1] - pose.y, beacon_pos[0] - pose.x) - boresight))
    if theta > cell.half_angle:
        return ambient
    return ambient + intensity * max(0.0, math.cos(theta)) / (d * d)


def photoresistance(e: float, cell: PhotoCell) -> float:
    """Cell resistance in ohms for a given illuminance."""
    if e <= 0.0:
        return cell.r_dark
    r = cell.r_ref * e ** (-cell.gamma)
    return min(max(r, cell.r_ref / _BRIGHT_CLAMP_DIVISOR), cell.r_dark)


def sense(
    beacon_pos: Vec2,
    intensity: float,
    pose: Pose,
    rig: SensorRig,
    rng: random.Random | None = None,
) -> SensorReading:
    """Sample the rig once.  Draws one gaussian when noise_sigma > 0."""
    e_left = illuminance(beacon_pos, intensity, pose, rig.left, rig.ambient)
    e_right = illuminance(beacon_pos, intensity, pose, rig.right, rig.ambient)
    r_left = photoresistance(e_left, rig.left)
    r_right = photoresistance(e_right, rig.right)

    half_dev = (r_left - r_right) / (2.0 * (r_left + r_right))
    # quantize the deviation onto the float grid of [0.5, 1) so that a
    # mirrored geometry yields exactly 1 - fused
    magnitude = (0.5 + abs(half_dev)) - 0.5
    fused = 0.5 + math.copysign(magnitude, half_dev) if half_dev != 0.0 else 0.5

    if rng is not None and rig.noise_sigma > 0.0:
        fused += rng.gauss(0.0, rig.noise_sigma)
        fused = min(max(fused, 0.0), 1.0)

    differentiable = abs(fused - 0.5) >= rig.dead_band
    return SensorReading(
        fused=fused, e_left=e_left, e_right=e_right, differentiable=differentiable
    )
