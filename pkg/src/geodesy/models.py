"""Geodetic value types."""

from __future__ import annotations

import math
from dataclasses import dataclass

from navsim.navsim_error import GeodesyError


@dataclass(frozen=True)
class GeodeticCoord:
    """A latitude/longitude/altitude fix.

    Attributes:
        lat:  Latitude in degrees, [-90, 90].
        lon:  Longitude in degrees, (-180, 180].
        alt:  Altitude in meters. Passed through untouched by the projection.
    """

    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(value) for value in (self.lat, self.lon, self.alt)):
            raise GeodesyError(f"GeodeticCoord fields must be finite: {self}")
        if not -90.0 <= self.lat <= 90.0:
            raise GeodesyError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 < self.lon <= 180.0:
            raise GeodesyError(f"longitude {self.lon} outside (-180, 180]")


@dataclass(frozen=True)
class LtpFrame:
    """Local tangent plane anchored at ``origin``.

    Attributes:
        origin:              Geodetic fix mapped to planar (0, 0).
        heading_offset:      Initial vehicle heading recorded with the frame (rad).
        magnetic_reference:  LTP angle the horizontal magnetic field points along
                             (rad, measured from east). Defaults to north.
    """

    origin: GeodeticCoord
    heading_offset: float = 0.0
    magnetic_reference: float = math.pi / 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.heading_offset) and math.isfinite(self.magnetic_reference)):
            raise GeodesyError("LtpFrame angles must be finite")
        if abs(self.origin.lat) >= 90.0:
            # cos(lat0) vanishes at the poles and the east axis is undefined
            raise GeodesyError("LtpFrame origin cannot sit on a pole")
