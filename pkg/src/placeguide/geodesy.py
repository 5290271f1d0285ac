"""Spherical-Earth distance math and geofence membership.

All angles are degrees at the API boundary and double-precision radians
internally. Distances are meters on a sphere of radius 6 371 000 m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError

#: Mean Earth radius in meters used for all great-circle math.
EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    """A latitude/longitude pair in degrees.

    Latitude must lie in [-90, +90]; construction rejects values outside.
    Longitude is normalized to [-180, +180) at construction, so e.g.
    ``GeoPoint(0, 185).lon_deg == -175``.
    """

    lat_deg: float
    lon_deg: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat_deg) and math.isfinite(self.lon_deg)):
            raise InvalidArgumentError("coordinates must be finite numbers")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise InvalidArgumentError(
                f"latitude {self.lat_deg} outside [-90, 90]"
            )
        object.__setattr__(
            self, "lon_deg", ((self.lon_deg + 180.0) % 360.0) - 180.0
        )


@dataclass(frozen=True)
class EarthModel:
    """Sphere radius backing the distance computations."""

    radius_m: float = EARTH_RADIUS_M

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius_m) and self.radius_m > 0.0):
            raise InvalidArgumentError("earth radius must be a positive number")


_DEFAULT_EARTH = EarthModel()


def to_radians(angle_deg: float) -> float:
    """Convert an angle from degrees to radians.

    Raises InvalidArgumentError for non-finite input.
    """
    if not math.isfinite(angle_deg):
        raise InvalidArgumentError("angle must be finite")
    return angle_deg * math.pi / 180.0


def haversine_distance(
    p1: GeoPoint, p2: GeoPoint, earth: EarthModel = _DEFAULT_EARTH
) -> float:
    """Great-circle distance between two points, in meters.

    Computes a = sin^2(dphi/2) + cos(phi1) * cos(phi2) * sin^2(dlam/2) and
    c = 2 * atan2(sqrt(a), sqrt(1 - a)). ``a`` is clamped to [0, 1] to absorb
    floating-point overshoot near antipodal points. Absolute angle
    differences keep the expression bit-identical under argument swap.
    """
    phi1 = to_radians(p1.lat_deg)
    phi2 = to_radians(p2.lat_deg)
    dphi = abs(to_radians(p2.lat_deg - p1.lat_deg))
    dlam = abs(to_radians(p2.lon_deg - p1.lon_deg))

    a = (
        math.sin(dphi / 2.0) ** 2
        + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    )
    a = min(1.0, max(0.0, a))
    c = 2.0 * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))
    return earth.radius_m * c


def within_radius(
    p1: GeoPoint,
    p2: GeoPoint,
    radius_m: float,
    earth: EarthModel = _DEFAULT_EARTH,
) -> bool:
    """True iff the great-circle distance is strictly less than radius_m."""
    if not (math.isfinite(radius_m) and radius_m > 0.0):
        raise InvalidArgumentError("radius must be a positive number")
    return haversine_distance(p1, p2, earth) < radius_m
