from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from geodesy import GeodeticCoord

NoiseModel = Literal["random_walk", "gaussian"]
NoiseUpdate = Literal["per_measurement", "per_tick"]
MeasurementKind = Literal["gps", "magnetometer"]


# ---------------------------------------------------------------------------
# GPS noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GpsNoiseState:
    """One horizontal axis of the GPS noise chain.

    Attributes:
        p:     Current position noise (m).
        v:     First difference of the noise (m/step).
        axis:  ``"x"`` or ``"y"``; each axis owns an independent chain.
    """

    p: float = 0.0
    v: float = 0.0
    axis: Literal["x", "y"] = "x"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and math.isfinite(self.v)):
            raise ValueError(f"GpsNoiseState fields must be finite: {self}")
        if self.axis not in ("x", "y"):
            raise ValueError(f"GpsNoiseState.axis must be 'x' or 'y', got {self.axis!r}")


@dataclass(frozen=True)
class GpsNoiseParams:
    """Parameters of the virtual GPS.

    Attributes:
        sigma:         Std of the second-difference draw (m/step^2). Under the
                       ``gaussian`` model it is the per-fix position std (m).
        p_max:         Target noise magnitude used for mean reversion (m).
        seed:          Seed of the per-axis random streams.
        rate_hz:       Fix rate (Hz).
        model:         ``random_walk`` (default) or the white ``gaussian`` baseline.
        noise_update:  ``per_measurement`` advances the chains only when a fix is
                       emitted; ``per_tick`` advances them every control tick.
    """

    sigma: float
    p_max: float
    seed: int
    rate_hz: float
    model: NoiseModel = "random_walk"
    noise_update: NoiseUpdate = "per_measurement"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError(f"GpsNoiseParams.sigma must be >= 0, got {self.sigma}")
        if not (math.isfinite(self.p_max) and self.p_max > 0.0):
            raise ValueError(f"GpsNoiseParams.p_max must be > 0, got {self.p_max}")
        if not (math.isfinite(self.rate_hz) and self.rate_hz > 0.0):
            raise ValueError(f"GpsNoiseParams.rate_hz must be > 0, got {self.rate_hz}")
        if self.model not in ("random_walk", "gaussian"):
            raise ValueError(f"unknown GPS noise model {self.model!r}")
        if self.noise_update not in ("per_measurement", "per_tick"):
            raise ValueError(f"unknown GPS noise update mode {self.noise_update!r}")


# ---------------------------------------------------------------------------
# Magnetometer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MagnetometerParams:
    """Additive Gaussian heading noise.

    Attributes:
        sigma_theta:  Heading noise std (rad).
        rate_hz:      Reading rate (Hz).
        seed:         Seed of the magnetometer stream.
    """

    sigma_theta: float
    rate_hz: float
    seed: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma_theta) and self.sigma_theta >= 0.0):
            raise ValueError(f"MagnetometerParams.sigma_theta must be >= 0, got {self.sigma_theta}")
        if not (math.isfinite(self.rate_hz) and self.rate_hz > 0.0):
            raise ValueError(f"MagnetometerParams.rate_hz must be > 0, got {self.rate_hz}")


# ---------------------------------------------------------------------------
# Measurements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Measurement:
    """A timed sensor reading.

    Attributes:
        timestamp:  Simulation time (s).
        kind:       ``gps`` (payload is a :class:`GeodeticCoord`) or
                    ``magnetometer`` (payload is a heading in rad).
        payload:    The reading itself.
    """

    timestamp: float
    kind: MeasurementKind
    payload: GeodeticCoord | float
