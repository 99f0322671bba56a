from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from vehicle import VehicleState

PSD_TOLERANCE = 1e-9


def _check_covariance(name: str, matrix: np.ndarray, size: int) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    if matrix.shape != (size, size):
        raise ValueError(f"{name} must be {size}x{size}, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} must be finite")
    if not np.allclose(matrix, matrix.T, atol=PSD_TOLERANCE):
        raise ValueError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(matrix).min() < -PSD_TOLERANCE:
        raise ValueError(f"{name} must be positive semi-definite")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class EstimatorState:
    """EKF belief: the state estimate and its 4x4 covariance.

    Attributes:
        q_hat:  Estimated :class:`~vehicle.VehicleState`.
        P:      Covariance over ``[x, y, theta, v]``. Stored read-only and
                symmetric.
    """

    q_hat: VehicleState
    P: np.ndarray

    def __post_init__(self) -> None:
        P = np.array(self.P, dtype=float)
        if P.shape != (4, 4) or not np.all(np.isfinite(P)):
            raise ValueError(f"EstimatorState.P must be a finite 4x4 matrix, got shape {P.shape}")
        P = 0.5 * (P + P.T)
        P.setflags(write=False)
        object.__setattr__(self, "P", P)


@dataclass(frozen=True)
class EkfConfig:
    """Noise covariances of the filter.

    Attributes:
        Q_process:  Per-step process noise added in every predict (4x4).
        R_gps:      GPS position measurement covariance (2x2, m^2).
        R_mag:      Heading measurement variance (rad^2).
        P0:         Initial covariance (4x4).
    """

    Q_process: np.ndarray
    R_gps: np.ndarray
    R_mag: float
    P0: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "Q_process", _check_covariance("Q_process", self.Q_process, 4))
        object.__setattr__(self, "R_gps", _check_covariance("R_gps", self.R_gps, 2))
        object.__setattr__(self, "P0", _check_covariance("P0", self.P0, 4))
        if not (math.isfinite(self.R_mag) and self.R_mag >= 0.0):
            raise ValueError(f"R_mag must be a non-negative variance, got {self.R_mag}")

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "EkfConfig":
        """Build from the ``estimator`` config section (diagonals as lists)."""
        return cls(
            Q_process=np.diag(np.asarray(payload["q_process_diag"], dtype=float)),
            R_gps=np.diag(np.asarray(payload["r_gps_diag"], dtype=float)),
            R_mag=float(payload["r_mag"]),
            P0=np.diag(np.asarray(payload["p0_diag"], dtype=float)),
        )

    def initial_state(self, q0: VehicleState) -> EstimatorState:
        return EstimatorState(q_hat=q0, P=self.P0.copy())
