"""Equirectangular local tangent plane projection.

A spherical earth of radius ``EARTH_RADIUS_M`` is flattened around the frame
origin. At the tens-of-meters scale of the simulator the curvature error is
far below the sensor noise, and the inverse stays exact.
"""

from __future__ import annotations

import math

from utils import get_logger

from .models import GeodeticCoord, LtpFrame

logger = get_logger(__name__)

EARTH_RADIUS_M = 6_371_000.0
VALIDITY_RADIUS_M = 50_000.0


def make_ltp(origin: GeodeticCoord, heading: float = 0.0) -> LtpFrame:
    """Build the tangent plane for ``origin`` with initial ``heading`` (rad)."""
    return LtpFrame(origin=origin, heading_offset=heading)


def to_ltp(frame: LtpFrame, geo: GeodeticCoord) -> tuple[float, float]:
    """Project ``geo`` to planar (east, north) meters relative to the frame origin.

    Points beyond the flat-earth validity radius are still projected, with a
    warning.
    """
    lat0 = frame.origin.lat
    d_lon = geo.lon - frame.origin.lon
    # shortest way around the antimeridian
    if d_lon > 180.0:
        d_lon -= 360.0
    elif d_lon <= -180.0:
        d_lon += 360.0
    x = d_lon * math.cos(math.radians(lat0)) * math.pi / 180.0 * EARTH_RADIUS_M
    y = (geo.lat - lat0) * math.pi / 180.0 * EARTH_RADIUS_M
    distance = math.hypot(x, y)
    if distance > VALIDITY_RADIUS_M:
        logger.warning(
            "Fix lies outside the flat-earth validity radius",
            extra={"distance_m": round(distance, 1), "validity_radius_m": VALIDITY_RADIUS_M},
        )
    return x, y


def from_ltp(frame: LtpFrame, x: float, y: float, alt: float | None = None) -> GeodeticCoord:
    """Inverse of :func:`to_ltp`. ``alt`` defaults to the origin altitude."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"planar coordinates must be finite, got ({x}, {y})")
    lat0 = frame.origin.lat
    lat = lat0 + y / EARTH_RADIUS_M * 180.0 / math.pi
    lon = frame.origin.lon + x / (EARTH_RADIUS_M * math.cos(math.radians(lat0))) * 180.0 / math.pi
    if lon > 180.0:
        lon -= 360.0
    elif lon <= -180.0:
        lon += 360.0
    return GeodeticCoord(lat=lat, lon=lon, alt=frame.origin.alt if alt is None else alt)
