"""Extended Kalman filter over the 4-DOF model.

``predict`` reuses the plant stepper and its Jacobian. Corrections come from
GPS position (x, y) and magnetometer heading; speed is only ever corrected
through its cross-covariance with those.
"""

from __future__ import annotations

import numpy as np

from navsim.navsim_error import SingularInnovationError
from utils import get_logger, wrap_angle
from vehicle import ControlInput, VehicleParams, VehicleState, motion_jacobian, step

from .models import EkfConfig, EstimatorState

logger = get_logger(__name__)

MAX_INNOVATION_CONDITION = 1e12
_H_GPS = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])


def _posterior(q: np.ndarray, P: np.ndarray) -> EstimatorState:
    # from_array re-wraps theta and clamps a corrected speed at zero
    return EstimatorState(q_hat=VehicleState.from_array(q), P=0.5 * (P + P.T))


def predict(
    est: EstimatorState,
    u: ControlInput,
    dt: float,
    params: VehicleParams,
    config: EkfConfig,
) -> EstimatorState:
    """Propagate the belief one control period: ``P <- F P F^T + Q``."""
    F = motion_jacobian(est.q_hat, u, dt, params)
    q_next = step(est.q_hat, u, dt, params)
    P_next = F @ est.P @ F.T + config.Q_process
    return EstimatorState(q_hat=q_next, P=P_next)


def update_gps(est: EstimatorState, z: tuple[float, float], config: EkfConfig) -> EstimatorState:
    """Correct with a planar GPS position ``z`` in the LTP.

    Raises:
        SingularInnovationError: If the innovation covariance cannot be inverted.
    """
    q = est.q_hat.as_array()
    innovation = np.asarray(z, dtype=float) - _H_GPS @ q
    S = _H_GPS @ est.P @ _H_GPS.T + config.R_gps
    try:
        condition = np.linalg.cond(S)
        if not np.isfinite(condition) or condition > MAX_INNOVATION_CONDITION:
            raise np.linalg.LinAlgError(f"condition number {condition:.3g}")
        # K = P H^T S^-1, solved as (S^-1 H P)^T since S and P are symmetric
        K = np.linalg.solve(S, _H_GPS @ est.P).T
    except np.linalg.LinAlgError as exc:
        raise SingularInnovationError(f"GPS innovation covariance is singular: {exc}") from exc

    q_post = q + K @ innovation
    P_post = (np.eye(4) - K @ _H_GPS) @ est.P
    return _posterior(q_post, P_post)


def update_heading(est: EstimatorState, theta_z: float, config: EkfConfig) -> EstimatorState:
    """Correct with a magnetometer heading; the innovation is wrapped first.

    Raises:
        SingularInnovationError: If both the heading variance and ``R_mag`` are zero.
    """
    if not np.isfinite(theta_z):
        raise ValueError(f"heading measurement must be finite, got {theta_z}")
    q = est.q_hat.as_array()
    innovation = wrap_angle(theta_z - q[2])
    S = est.P[2, 2] + config.R_mag
    if S <= 0.0:
        raise SingularInnovationError("heading innovation variance is zero")
    K = est.P[:, 2] / S
    q_post = q + K * innovation
    P_post = est.P - np.outer(K, est.P[2, :])
    return _posterior(q_post, P_post)
