"""Body-frame tracking error and its linearisation over the horizon."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from navsim.navsim_error import QpDimensionError, SteeringSingularityError
from utils import wrap_angle
from vehicle import ControlInput, VehicleParams, VehicleState

from .models import MpcConfig, ErrorState, ReferencePoint


def error_state(q: VehicleState, ref: ReferencePoint) -> ErrorState:
    """Rotate the position error into the vehicle frame.

    ``e1``/``e2`` are the longitudinal/lateral components of
    ``(x_r - x, y_r - y)``; ``e3 = wrap(theta_r - theta)``; ``e4 = v_r - v``.
    """
    dx = ref.x_r - q.x
    dy = ref.y_r - q.y
    cos_t = math.cos(q.theta)
    sin_t = math.sin(q.theta)
    return ErrorState(
        e1=cos_t * dx + sin_t * dy,
        e2=-sin_t * dx + cos_t * dy,
        e3=wrap_angle(ref.theta_r - q.theta),
        e4=ref.v_r - q.v,
    )


def linearize_horizon(
    e0: ErrorState,
    refs: Sequence[ReferencePoint],
    prev_inputs: Sequence[ControlInput],
    config: MpcConfig,
    params: VehicleParams,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Discrete error-dynamics matrices ``A_k``, ``B_k`` for ``k = 0..N-1``.

    ``B_k`` acts on the input deviation ``u_k - u_r,k``. The error-dependent
    entries are frozen at ``e0``; ``v_k`` is the reference speed and
    ``delta_k`` the steering of ``prev_inputs[k]``.

    Raises:
        SteeringSingularityError: If some ``|delta_k| >= pi/2``.
    """
    N = config.horizon
    if len(refs) < N or len(prev_inputs) < N:
        raise QpDimensionError(f"need {N} references and inputs, got {len(refs)} and {len(prev_inputs)}")
    dt = config.dt
    e1, e2, e3 = e0.e1, e0.e2, e0.e3
    speed_decay = -(params.c_1 * params.omega_0 + params.tau_0) / (params.i_wheel * params.omega_0)
    throttle_gain = -params.tau_0 * params.r_wheel * params.gamma / params.i_wheel

    A_seq: list[np.ndarray] = []
    B_seq: list[np.ndarray] = []
    for k in range(N):
        v_k = refs[k].v_r
        delta_k = prev_inputs[k].delta
        if abs(delta_k) >= math.pi / 2.0:
            raise SteeringSingularityError(f"delta_{k} = {delta_k:.6g} rad reaches the tan(delta) singularity")
        yaw_rate = v_k * math.tan(delta_k) / params.l
        steer_gain = v_k / (params.l * math.cos(delta_k) ** 2)

        A = np.array(
            [
                [0.0, yaw_rate, -v_k * math.sin(e3), 0.0],
                [-yaw_rate, 0.0, v_k * math.cos(e3), 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, speed_decay],
            ]
        )
        B = np.array(
            [
                [0.0, steer_gain * e2],
                [0.0, -steer_gain * e1],
                [0.0, -steer_gain],
                [throttle_gain, 0.0],
            ]
        )
        A_seq.append(np.eye(4) + A * dt)
        B_seq.append(B * dt)
    return A_seq, B_seq
