"""Sparse horizon-stacked QP for the error-dynamics MPC."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.sparse as sparse

from navsim.navsim_error import QpDimensionError
from vehicle import VehicleParams

from .models import N_INPUTS, N_STATES, ErrorState, HorizonLayout, MpcConfig, QpProblem, ReferencePoint


def build_qp(
    e0: ErrorState,
    A_seq: Sequence[np.ndarray],
    B_seq: Sequence[np.ndarray],
    refs: Sequence[ReferencePoint],
    config: MpcConfig,
    params: VehicleParams,
) -> QpProblem:
    """Assemble the tracking QP over ``x = [e_0..e_N, u_0..u_{N-1}]``.

    The objective ``sum_k e_k^T Q e_k + (u_k - u_r,k)^T R (u_k - u_r,k)``
    (terminal term included) is expanded into ``x^T H x + c^T x + offset``.
    Equality rows pin ``e_0`` and encode
    ``e_{k+1} - A_k e_k - B_k u_k = -B_k u_r,k``.

    Raises:
        QpDimensionError: If the matrix sequences do not match the horizon.
    """
    N = config.horizon
    if len(A_seq) != N or len(B_seq) != N or len(refs) < N:
        raise QpDimensionError(
            f"horizon {N} needs {N} A/B blocks and references, got {len(A_seq)}, {len(B_seq)}, {len(refs)}"
        )
    for k, (A, B) in enumerate(zip(A_seq, B_seq)):
        if np.shape(A) != (N_STATES, N_STATES) or np.shape(B) != (N_STATES, N_INPUTS):
            raise QpDimensionError(f"step {k}: A must be 4x4 and B 4x2, got {np.shape(A)} and {np.shape(B)}")

    layout = HorizonLayout(horizon=N)
    n_e = layout.n_errors
    u_ref = np.array([refs[k].u_r.as_array() for k in range(N)])

    hessian = sparse.block_diag(
        [sparse.kron(sparse.eye(N + 1), config.Q_weight), sparse.kron(sparse.eye(N), config.R_weight)],
        format="csc",
    )
    linear = np.concatenate([np.zeros(n_e), (-2.0 * u_ref @ config.R_weight.T).reshape(-1)])
    offset = float(np.einsum("ki,ij,kj->", u_ref, config.R_weight, u_ref))

    shifted_A = sparse.vstack(
        [
            sparse.csc_matrix((N_STATES, n_e)),
            sparse.hstack([sparse.block_diag(A_seq), sparse.csc_matrix((N_STATES * N, N_STATES))]),
        ]
    )
    stacked_B = sparse.vstack([sparse.csc_matrix((N_STATES, N_INPUTS * N)), sparse.block_diag(B_seq)])
    A_eq = sparse.hstack([sparse.eye(n_e) - shifted_A, -stacked_B], format="csc")
    b_eq = np.concatenate([e0.as_array()] + [-(B @ u_ref[k]) for k, B in enumerate(B_seq)])

    u_low, u_high = config.input_bounds(params)
    lower = np.concatenate([np.full(N_STATES, -np.inf), np.tile(-config.E_bounds, N), np.tile(u_low, N)])
    upper = np.concatenate([np.full(N_STATES, np.inf), np.tile(config.E_bounds, N), np.tile(u_high, N)])

    return QpProblem(
        hessian=hessian,
        linear=linear,
        A_eq=A_eq,
        b_eq=b_eq,
        lower=lower,
        upper=upper,
        offset=offset,
        layout=layout,
    )
