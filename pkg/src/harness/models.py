from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal, Mapping

import numpy as np

from controller import MpcConfig, QpStatus, ReferencePoint
from estimator import EkfConfig
from geodesy import GeodeticCoord
from navsim.navsim_error import ConfigError
from sensors import GpsNoiseParams, MagnetometerParams
from vehicle import ControlInput, VehicleParams, VehicleState

ScenarioMode = Literal["ekf-only", "mpc-privileged", "ekf-mpc"]
TrajectoryKind = Literal["circle", "sinusoid", "waypoints"]

MODES: tuple[str, ...] = ("ekf-only", "mpc-privileged", "ekf-mpc")
RATE_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectorySpec:
    """Reference trajectory to generate or load.

    Attributes:
        kind:          ``circle``, ``sinusoid`` or ``waypoints``.
        speed:         Reference speed (m/s).
        spacing:       Arc length between waypoints (m).
        radius:        Circle radius (m).
        arc_fraction:  Fraction of a full lap driven on the circle; a full lap
                       gives a closed trajectory.
        amplitude:     Sinusoid amplitude (m).
        wavelength:    Sinusoid wavelength (m).
        length:        Sinusoid extent along x (m).
        path:          Waypoint CSV for ``waypoints``.
    """

    kind: TrajectoryKind
    speed: float
    spacing: float
    radius: float = 5.0
    arc_fraction: float = 1.0
    amplitude: float = 1.0
    wavelength: float = 10.0
    length: float = 20.0
    path: Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "sinusoid", "waypoints"):
            raise ConfigError(f"trajectory.kind must be circle, sinusoid or waypoints, got {self.kind!r}")
        for name in ("speed", "spacing", "radius", "arc_fraction", "wavelength", "length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigError(f"trajectory.{name} must be a positive finite number, got {value!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ConfigError(f"trajectory.amplitude must be a non-negative finite number, got {self.amplitude!r}")
        if self.arc_fraction > 1.0:
            raise ConfigError("trajectory.arc_fraction cannot exceed one lap")
        if self.kind == "waypoints" and self.path is None:
            raise ConfigError("trajectory.path is required for waypoint trajectories")


@dataclass(frozen=True)
class Scenario:
    """Everything a closed-loop run depends on.

    Attributes:
        name:                Label used in logs and output file names.
        mode:                ``ekf-only``, ``mpc-privileged`` or ``ekf-mpc``.
        trajectory:          How to build the reference trajectory.
        duration:            Run length (s); ``None`` derives it from the path
                             length and speed.
        control_rate_hz:     Control loop rate; sensor rates must divide it.
        vehicle:             Vehicle model used by the estimator and controller.
        plant_perturbation:  Per-parameter multipliers applied to the plant only.
        gps:                 GPS noise parameters (seed included).
        magnetometer:        Magnetometer parameters (seed included).
        ekf:                 Filter covariances.
        mpc:                 Controller configuration.
        origin:              Geodetic fix of the LTP origin.
        constant_input:      Input applied in ``ekf-only`` mode; ``None`` uses the
                             reference input of the first waypoint.
        skip_initial:        Seconds excluded from the start of the metrics.
    """

    name: str
    mode: ScenarioMode
    trajectory: TrajectorySpec
    duration: float | None
    control_rate_hz: float
    vehicle: VehicleParams
    gps: GpsNoiseParams
    magnetometer: MagnetometerParams
    ekf: EkfConfig
    mpc: MpcConfig
    origin: GeodeticCoord
    plant_perturbation: Mapping[str, float] = field(default_factory=dict)
    constant_input: ControlInput | None = None
    skip_initial: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"scenario.mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not (math.isfinite(self.control_rate_hz) and self.control_rate_hz > 0.0):
            raise ConfigError(f"control rate must be positive, got {self.control_rate_hz!r}")
        if self.duration is not None and not (math.isfinite(self.duration) and self.duration > 0.0):
            raise ConfigError(f"duration must be positive, got {self.duration!r}")
        if not (math.isfinite(self.skip_initial) and self.skip_initial >= 0.0):
            raise ConfigError(f"skip_initial must be non-negative, got {self.skip_initial!r}")
        for label, rate in (("gps", self.gps.rate_hz), ("magnetometer", self.magnetometer.rate_hz)):
            ratio = self.control_rate_hz / rate
            if ratio < 1.0 - RATE_TOLERANCE or abs(ratio - round(ratio)) > RATE_TOLERANCE:
                raise ConfigError(f"{label} rate {rate} Hz must divide the control rate {self.control_rate_hz} Hz")
        if abs(self.mpc.dt * self.control_rate_hz - 1.0) > RATE_TOLERANCE:
            raise ConfigError("controller dt must equal the control period")
        try:
            self.vehicle.perturbed(self.plant_perturbation)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "plant_perturbation", dict(self.plant_perturbation))

    @property
    def dt(self) -> float:
        return 1.0 / self.control_rate_hz

    @property
    def seed(self) -> int:
        return self.gps.seed

    @property
    def gps_every(self) -> int:
        """Control ticks between GPS fixes."""
        return int(round(self.control_rate_hz / self.gps.rate_hz))

    @property
    def magnetometer_every(self) -> int:
        return int(round(self.control_rate_hz / self.magnetometer.rate_hz))

    @property
    def plant_params(self) -> VehicleParams:
        return self.vehicle.perturbed(self.plant_perturbation)

    def with_seed(self, seed: int) -> "Scenario":
        """Copy with every sensor stream reseeded."""
        return replace(self, gps=replace(self.gps, seed=seed), magnetometer=replace(self.magnetometer, seed=seed))

    def with_overrides(self, *, duration: float | None = None, gps_rate: float | None = None) -> "Scenario":
        scenario = self
        if duration is not None:
            scenario = replace(scenario, duration=duration)
        if gps_rate is not None:
            scenario = replace(scenario, gps=replace(scenario.gps, rate_hz=gps_rate))
        return scenario


# ---------------------------------------------------------------------------
# Run log
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogRow:
    """State of the loop at one control tick.

    ``meas_x``/``meas_y`` are NaN on ticks without a GPS fix and ``meas_theta``
    on ticks without a magnetometer reading. ``qp_status`` is ``none`` when no
    controller ran.
    """

    tick: int
    t: float
    truth: VehicleState
    meas_x: float
    meas_y: float
    meas_theta: float
    estimate: VehicleState
    reference: ReferencePoint
    u: ControlInput
    qp_status: QpStatus | Literal["none"]
    qp_iters: int
    qp_objective: float

    @property
    def has_gps(self) -> bool:
        return not (math.isnan(self.meas_x) or math.isnan(self.meas_y))


@dataclass
class RunLog:
    """Rows of one run in tick order.

    Attributes:
        rows:      One row per control tick.
        valid:     False when the run aborted mid-way.
        error:     Abort reason for invalid runs.
        scenario:  Name of the scenario that produced the log.
    """

    rows: list[LogRow] = field(default_factory=list)
    valid: bool = True
    error: str | None = None
    scenario: str = ""

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: LogRow) -> None:
        if self.rows and row.t <= self.rows[-1].t:
            raise ValueError(f"log timestamps must increase ({row.t} after {self.rows[-1].t})")
        self.rows.append(row)

    def truth_xy(self) -> np.ndarray:
        return np.array([(row.truth.x, row.truth.y) for row in self.rows], dtype=float).reshape(-1, 2)

    def estimate_xy(self) -> np.ndarray:
        return np.array([(row.estimate.x, row.estimate.y) for row in self.rows], dtype=float).reshape(-1, 2)

    def measurement_xy(self) -> np.ndarray:
        return np.array([(row.meas_x, row.meas_y) for row in self.rows], dtype=float).reshape(-1, 2)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorStats:
    """Maximum and average of a distance series (m)."""

    max_error: float
    avg_error: float
    samples: int


@dataclass(frozen=True)
class RunMetrics:
    """Error summaries of one run. A source without samples is ``None``.

    Attributes:
        measurement:  GPS fix vs. plant truth, point distance.
        estimate:     EKF estimate vs. plant truth, point distance.
        tracking:     Plant truth vs. the reference polyline.
    """

    measurement: ErrorStats | None
    estimate: ErrorStats | None
    tracking: ErrorStats | None


@dataclass(frozen=True)
class BatchRun:
    index: int
    seed: int
    metrics: RunMetrics | None
    valid: bool
    error: str | None = None

    @property
    def ekf_wins_avg(self) -> bool:
        m = self.metrics
        return bool(m and m.estimate and m.measurement and m.estimate.avg_error < m.measurement.avg_error)

    @property
    def ekf_wins_max(self) -> bool:
        m = self.metrics
        return bool(m and m.estimate and m.measurement and m.estimate.max_error < m.measurement.max_error)


@dataclass(frozen=True)
class BatchResult:
    """Replicates of one scenario plus their aggregate.

    Attributes:
        runs:             Per-replicate results ordered by index.
        ekf_avg_wins:     Runs where the estimate beat the measurement on average error.
        ekf_max_wins:     Runs where the estimate beat the measurement on maximum error.
        means:            Mean of each metric over replicates that produced it,
                          keyed ``<source>_<max|avg>``.
    """

    runs: tuple[BatchRun, ...]
    ekf_avg_wins: int
    ekf_max_wins: int
    means: Mapping[str, float]

    @property
    def completed(self) -> int:
        return sum(1 for run in self.runs if run.metrics is not None)
