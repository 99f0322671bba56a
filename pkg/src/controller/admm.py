"""Operator-splitting (ADMM) solver for convex QPs.

Problems are handled in the form::

    minimize    1/2 x^T P x + q^T x
    subject to  l <= A x <= u

with ``P = 2 H``, ``q = c`` and ``A`` stacking the equality rows of the
problem on top of an identity block for the variable bounds. Equality rows
(``l == u``) get a larger penalty ``rho``. The KKT matrix of the x-update is
factorised once per solve.

Every ``polish_interval`` iterations the solver guesses the active set from
the current iterate and solves the reduced equality-constrained KKT system.
A polished point is accepted only if it is primal feasible, its dual residual
is within tolerance and its multipliers carry the signs their bounds require.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import splu

from utils import get_logger

from .models import QpProblem, QpSolution, QpStatus, SolverSettings

logger = get_logger(__name__)


@dataclass(frozen=True)
class _Polished:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    primal_residual: float
    dual_residual: float


def _inf_norm(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def _bound_violation(z: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    return _inf_norm(np.maximum(lower - z, 0.0) + np.maximum(z - upper, 0.0))


def _support(direction: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> float:
    """``u^T max(v, 0) + l^T min(v, 0)`` without forming ``inf * 0``."""
    positive = direction > 0.0
    negative = direction < 0.0
    return float(np.sum(upper[positive] * direction[positive]) + np.sum(lower[negative] * direction[negative]))


def _is_primal_infeasible(delta_y: np.ndarray, A: sparse.csc_matrix, lower: np.ndarray, upper: np.ndarray, eps: float) -> bool:
    norm = _inf_norm(delta_y)
    if norm <= eps:
        return False
    direction = delta_y / norm
    if _support(direction, lower, upper) >= -eps:
        return False
    return _inf_norm(A.T @ direction) < eps


def _polish(
    P: sparse.csc_matrix,
    q: np.ndarray,
    A: sparse.csc_matrix,
    lower: np.ndarray,
    upper: np.ndarray,
    z: np.ndarray,
    y: np.ndarray,
    settings: SolverSettings,
) -> _Polished | None:
    n = P.shape[0]
    equality = lower == upper
    ind_eq = np.flatnonzero(equality)
    ind_low = np.flatnonzero(~equality & (z - lower < -y))
    ind_upp = np.flatnonzero(~equality & (upper - z < y))
    active = np.concatenate([ind_eq, ind_low, ind_upp])

    A_red = A[active]
    n_active = active.size
    delta = settings.polish_delta
    if n_active:
        kkt = sparse.bmat([[P + delta * sparse.eye(n), A_red.T], [A_red, -delta * sparse.eye(n_active)]], format="csc")
        exact = sparse.bmat([[P, A_red.T], [A_red, None]], format="csc")
    else:
        kkt = (P + delta * sparse.eye(n)).tocsc()
        exact = P
    rhs = np.concatenate([-q, lower[ind_eq], lower[ind_low], upper[ind_upp]])
    try:
        factor = splu(kkt)
        solution = factor.solve(rhs)
        for _ in range(settings.polish_refine_iter):
            solution = solution + factor.solve(rhs - exact @ solution)
    except RuntimeError:
        return None
    if not np.all(np.isfinite(solution)):
        return None

    x = solution[:n]
    y_full = np.zeros_like(y)
    y_full[active] = solution[n:]
    z_pol = A @ x

    tolerance = settings.eps_abs
    if np.any(y_full[ind_low] > tolerance) or np.any(y_full[ind_upp] < -tolerance):
        return None
    primal_residual = _bound_violation(z_pol, lower, upper)
    dual_residual = _inf_norm(P @ x + q + A.T @ y_full)
    if primal_residual > tolerance or dual_residual > tolerance:
        return None
    return _Polished(x, z_pol, y_full, primal_residual, dual_residual)


def solve_qp(
    problem: QpProblem,
    warm: QpSolution | None = None,
    settings: SolverSettings | None = None,
) -> QpSolution:
    """Solve ``problem`` by ADMM, optionally warm-started from a previous solution.

    Returns a :class:`QpSolution` whose ``status`` is ``solved``,
    ``max-iterations`` or ``primal-infeasible``. Only a dimension mismatch
    raises; numerical trouble is reported through the status.
    """
    settings = settings or SolverSettings()
    n = problem.n_variables
    m_eq = problem.n_equalities

    P = (2.0 * problem.hessian).tocsc()
    q = problem.linear
    A = sparse.vstack([problem.A_eq, sparse.eye(n)], format="csc") if m_eq else sparse.eye(n, format="csc")
    lower = np.concatenate([problem.b_eq, problem.lower])
    upper = np.concatenate([problem.b_eq, problem.upper])
    m = A.shape[0]

    rho = np.full(m, settings.rho)
    rho[lower == upper] *= settings.eq_rho_scale
    rho_inv = 1.0 / rho
    kkt = sparse.bmat(
        [[P + settings.sigma * sparse.eye(n), A.T], [A, -sparse.diags(rho_inv)]],
        format="csc",
    )
    factor = splu(kkt)

    if warm is not None and warm.x.shape == (n,) and warm.y_eq.shape == (m_eq,) and warm.y_box.shape == (n,):
        x = warm.x.copy()
        y = np.concatenate([warm.y_eq, warm.y_box])
    else:
        x = np.zeros(n)
        y = np.zeros(m)
    z = np.clip(A @ x, lower, upper)

    status: QpStatus = "max-iterations"
    polished = False
    primal_residual = dual_residual = np.inf
    iteration = 0
    alpha = settings.alpha
    for iteration in range(1, settings.max_iter + 1):
        solution = factor.solve(np.concatenate([settings.sigma * x - q, z - rho_inv * y]))
        x_tilde = solution[:n]
        z_tilde = z + rho_inv * (solution[n:] - y)

        x = alpha * x_tilde + (1.0 - alpha) * x
        z_relaxed = alpha * z_tilde + (1.0 - alpha) * z
        z_next = np.clip(z_relaxed + rho_inv * y, lower, upper)
        y_next = y + rho * (z_relaxed - z_next)
        delta_y = y_next - y
        z, y = z_next, y_next

        Ax = A @ x
        Px = P @ x
        ATy = A.T @ y
        primal_residual = _inf_norm(Ax - z)
        dual_residual = _inf_norm(Px + q + ATy)
        eps_pri = settings.eps_abs + settings.eps_rel * max(_inf_norm(Ax), _inf_norm(z))
        eps_dua = settings.eps_abs + settings.eps_rel * max(_inf_norm(ATy), _inf_norm(Px), _inf_norm(q))

        if primal_residual <= eps_pri and dual_residual <= eps_dua:
            status = "solved"
            break
        if primal_residual > eps_pri and _is_primal_infeasible(delta_y, A, lower, upper, settings.eps_prim_inf):
            status = "primal-infeasible"
            break
        if settings.polish and iteration % settings.polish_interval == 0:
            result = _polish(P, q, A, lower, upper, z, y, settings)
            if result is not None:
                x, z, y = result.x, result.z, result.y
                primal_residual, dual_residual = result.primal_residual, result.dual_residual
                status = "solved"
                polished = True
                break

    if status == "solved" and settings.polish and not polished:
        result = _polish(P, q, A, lower, upper, z, y, settings)
        if result is not None:
            x, z, y = result.x, result.z, result.y
            primal_residual, dual_residual = result.primal_residual, result.dual_residual
            polished = True

    if status != "solved":
        logger.debug(
            "QP solve did not converge",
            extra={"status": status, "iterations": iteration, "primal_residual": primal_residual, "dual_residual": dual_residual},
        )
    objective = problem.objective(x) if status != "primal-infeasible" else np.inf
    return QpSolution(
        x=x,
        y_eq=y[:m_eq],
        y_box=y[m_eq:],
        objective=float(objective),
        iterations=iteration,
        status=status,
        polished=polished,
        primal_residual=float(primal_residual),
        dual_residual=float(dual_residual),
        layout=problem.layout,
    )


def kkt_residuals(problem: QpProblem, solution: QpSolution) -> tuple[float, float]:
    """Primal and dual KKT residuals of ``solution`` recomputed from the problem data.

    The dual residual uses the solver's ``1/2 x^T (2H) x`` scaling of the
    multipliers.
    """
    x = solution.x
    primal = max(
        _inf_norm(problem.A_eq @ x - problem.b_eq),
        _bound_violation(x, problem.lower, problem.upper),
    )
    dual = _inf_norm(2.0 * (problem.hessian @ x) + problem.linear + problem.A_eq.T @ solution.y_eq + solution.y_box)
    return primal, dual
