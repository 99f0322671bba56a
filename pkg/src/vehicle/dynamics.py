"""4-DOF bicycle dynamics with a DC-motor drive model.

The same functions serve as the simulation plant, the EKF process model and
the MPC internal model. Everything here is a pure function of value types.
"""

from __future__ import annotations

import math

import numpy as np

from navsim.navsim_error import InfeasibleSpeedError, SteeringSingularityError
from utils import wrap_angle

from .models import ControlInput, VehicleParams, VehicleState


def motor_drive_torque(v: float, alpha: float, params: VehicleParams) -> float:
    """Drive torque delivered by the DC motor at speed ``v`` and throttle ``alpha``."""
    return params.tau_0 * alpha - params.tau_0 * v / (params.omega_0 * params.wheel_factor)


def motor_resistance_torque(v: float, params: VehicleParams) -> float:
    """Resistance torque: constant term plus a speed-proportional term."""
    return v * params.c_1 / params.wheel_factor + params.c_0


def _check_steering(delta: float) -> None:
    if abs(delta) >= math.pi / 2.0:
        raise SteeringSingularityError(f"|delta| = {abs(delta):.6g} rad reaches the tan(delta) singularity")


def _speed_rate(v: float, alpha: float, params: VehicleParams) -> float:
    drive = motor_drive_torque(v, alpha, params)
    resistance = motor_resistance_torque(v, params)
    # no reverse: static resistance cannot push a stopped vehicle backwards
    if v <= 0.0 and drive <= resistance:
        return 0.0
    return params.wheel_factor / params.i_wheel * (drive - resistance)


def state_derivative(q: VehicleState, u: ControlInput, params: VehicleParams) -> np.ndarray:
    """Continuous-time state rate ``dq/dt = f(q, u)`` as a 4-vector.

    Raises:
        SteeringSingularityError: If ``|u.delta| >= pi/2``.
    """
    _check_steering(u.delta)
    return np.array(
        [
            q.v * math.cos(q.theta),
            q.v * math.sin(q.theta),
            q.v * math.tan(u.delta) / params.l,
            _speed_rate(q.v, u.alpha, params),
        ],
        dtype=float,
    )


def step(q: VehicleState, u: ControlInput, dt: float, params: VehicleParams) -> VehicleState:
    """Advance one explicit Euler step ``q + f(q, u) * dt``.

    Heading is re-wrapped and speed clamped at zero after the update.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    rate = state_derivative(q, u, params)
    return VehicleState(
        x=q.x + rate[0] * dt,
        y=q.y + rate[1] * dt,
        theta=wrap_angle(q.theta + rate[2] * dt),
        v=max(q.v + rate[3] * dt, 0.0),
    )


def motion_jacobian(q: VehicleState, u: ControlInput, dt: float, params: VehicleParams) -> np.ndarray:
    """Jacobian of the discrete update, ``I + dt * df/dq``.

    The speed-row entry is ``-(tau_0/omega_0 + c_1) / I_wheel``; the wheel
    factors of the drive and resistance curves cancel against the
    ``R_wheel * gamma / I_wheel`` gain. When the no-reverse clamp is engaged the
    speed row is zero.
    """
    _check_steering(u.delta)
    sin_t = math.sin(q.theta)
    cos_t = math.cos(q.theta)

    jacobian = np.eye(4)
    jacobian[0, 2] = -q.v * sin_t * dt
    jacobian[0, 3] = cos_t * dt
    jacobian[1, 2] = q.v * cos_t * dt
    jacobian[1, 3] = sin_t * dt
    jacobian[2, 3] = math.tan(u.delta) / params.l * dt

    clamped = q.v <= 0.0 and motor_drive_torque(q.v, u.alpha, params) <= motor_resistance_torque(q.v, params)
    if not clamped:
        jacobian[3, 3] += -(params.tau_0 / params.omega_0 + params.c_1) / params.i_wheel * dt
    return jacobian


def steady_state_throttle(v_r: float, params: VehicleParams) -> float:
    """Throttle that balances drive and resistance torque at speed ``v_r``.

    Raises:
        InfeasibleSpeedError: If holding ``v_r`` needs more than full throttle.
    """
    if v_r < 0.0:
        raise ValueError(f"v_r must be non-negative, got {v_r}")
    alpha = v_r / params.no_load_speed + (v_r * params.c_1 / params.wheel_factor + params.c_0) / params.tau_0
    if alpha > 1.0:
        raise InfeasibleSpeedError(f"speed {v_r} m/s needs throttle {alpha:.4f} > 1")
    return alpha


def reference_steering(curvature: float, params: VehicleParams) -> float:
    """Steering angle that makes the bicycle follow a path of the given curvature."""
    return math.atan(params.l * curvature)
