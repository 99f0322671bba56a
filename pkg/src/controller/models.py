from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal, Mapping

import numpy as np
import scipy.sparse as sparse

from navsim.navsim_error import QpDimensionError, TrajectoryError
from utils import wrap_angle
from vehicle import ControlInput, VehicleParams

QpStatus = Literal["solved", "max-iterations", "primal-infeasible"]

N_STATES = 4
N_INPUTS = 2


# ---------------------------------------------------------------------------
# Reference
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReferencePoint:
    """One waypoint of the reference trajectory.

    Attributes:
        x_r:      East position (m).
        y_r:      North position (m).
        theta_r:  Path tangent heading (rad), wrapped to (-pi, pi].
        v_r:      Reference speed (m/s).
        u_r:      Feed-forward input that holds the vehicle on the path.
    """

    x_r: float
    y_r: float
    theta_r: float
    v_r: float
    u_r: ControlInput

    def __post_init__(self) -> None:
        if not all(math.isfinite(value) for value in (self.x_r, self.y_r, self.theta_r, self.v_r)):
            raise TrajectoryError(f"ReferencePoint fields must be finite: {self}")
        if self.v_r < 0.0:
            raise TrajectoryError(f"ReferencePoint.v_r must be non-negative, got {self.v_r}")
        object.__setattr__(self, "theta_r", wrap_angle(self.theta_r))


@dataclass(frozen=True)
class Trajectory:
    """Ordered reference waypoints.

    Attributes:
        points:   Waypoints in travel order.
        spacing:  Nominal arc length between consecutive points (m).
        closed:   True when the last point connects back to the first.
    """

    points: tuple[ReferencePoint, ...]
    spacing: float
    closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if not (math.isfinite(self.spacing) and self.spacing > 0.0):
            raise TrajectoryError(f"trajectory spacing must be positive, got {self.spacing}")

    def __len__(self) -> int:
        return len(self.points)

    def positions(self) -> np.ndarray:
        """``(n, 2)`` array of waypoint positions."""
        return np.array([(point.x_r, point.y_r) for point in self.points], dtype=float).reshape(-1, 2)

    def polyline(self) -> np.ndarray:
        """Positions as a polyline, repeating the first point when closed."""
        positions = self.positions()
        if self.closed and len(positions) > 1:
            positions = np.vstack([positions, positions[:1]])
        return positions


@dataclass(frozen=True)
class ErrorState:
    """Tracking error in the vehicle body frame.

    Attributes:
        e1:  Longitudinal error (m).
        e2:  Lateral error (m).
        e3:  Heading error (rad), wrapped.
        e4:  Speed error (m/s).
    """

    e1: float
    e2: float
    e3: float
    e4: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(value) for value in (self.e1, self.e2, self.e3, self.e4)):
            raise ValueError(f"ErrorState fields must be finite: {self}")
        object.__setattr__(self, "e3", wrap_angle(self.e3))

    def as_array(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3, self.e4], dtype=float)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverSettings:
    """ADMM settings of the embedded QP solver.

    Attributes:
        rho:                 Penalty on inequality rows.
        eq_rho_scale:        Multiplier applied to ``rho`` on equality rows.
        sigma:               Proximal regularisation of the x-update.
        alpha:               Over-relaxation parameter in (0, 2).
        eps_abs:             Absolute tolerance on primal and dual residuals.
        eps_rel:             Relative tolerance on primal and dual residuals.
        eps_prim_inf:        Tolerance of the primal infeasibility certificate.
        max_iter:            Iteration limit.
        polish:              Attempt active-set polishing.
        polish_interval:     Polish every this many iterations.
        polish_delta:        Regularisation of the reduced KKT system.
        polish_refine_iter:  Iterative refinement passes after polishing.
    """

    rho: float = 0.1
    eq_rho_scale: float = 1e3
    sigma: float = 1e-6
    alpha: float = 1.6
    eps_abs: float = 1e-6
    eps_rel: float = 0.0
    eps_prim_inf: float = 1e-5
    max_iter: int = 4000
    polish: bool = True
    polish_interval: int = 5
    polish_delta: float = 1e-7
    polish_refine_iter: int = 5

    def __post_init__(self) -> None:
        if self.rho <= 0.0 or self.sigma <= 0.0 or self.eq_rho_scale <= 0.0:
            raise ValueError("rho, sigma and eq_rho_scale must be positive")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.eps_abs < 0.0 or self.eps_rel < 0.0 or self.eps_prim_inf <= 0.0:
            raise ValueError("solver tolerances must be non-negative")
        if self.max_iter < 1 or self.polish_interval < 1 or self.polish_refine_iter < 0:
            raise ValueError("max_iter and polish_interval must be >= 1")

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any]) -> "SolverSettings":
        return cls(**dict(payload))


@dataclass(frozen=True)
class MpcConfig:
    """Error-dynamics MPC configuration.

    Attributes:
        horizon:        Prediction horizon N (steps).
        dt:             Step length (s).
        Q_weight:       4x4 PSD error weight.
        R_weight:       2x2 PD input-deviation weight.
        E_bounds:       Symmetric box on ``e_1..e_N``, one half-width per component.
        lookahead:      Points added after the nearest waypoint.
        search_window:  Points ahead of the cursor searched for the nearest
                        waypoint; ``None`` scans to the end of the trajectory.
        solver:         QP solver settings.
    """

    horizon: int
    dt: float
    Q_weight: np.ndarray
    R_weight: np.ndarray
    E_bounds: np.ndarray
    lookahead: int = 3
    search_window: int | None = None
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        Q = np.array(self.Q_weight, dtype=float)
        R = np.array(self.R_weight, dtype=float)
        E = np.array(self.E_bounds, dtype=float).reshape(-1)
        if Q.shape != (N_STATES, N_STATES) or R.shape != (N_INPUTS, N_INPUTS) or E.shape != (N_STATES,):
            raise QpDimensionError("Q_weight must be 4x4, R_weight 2x2 and E_bounds length 4")
        if not np.allclose(Q, Q.T) or np.linalg.eigvalsh(Q).min() < -1e-12:
            raise ValueError("Q_weight must be symmetric positive semi-definite")
        if not np.allclose(R, R.T) or np.linalg.eigvalsh(R).min() <= 0.0:
            raise ValueError("R_weight must be symmetric positive definite")
        if np.any(E <= 0.0):
            raise ValueError("E_bounds must be strictly positive half-widths")
        if self.lookahead < 0:
            raise ValueError("lookahead must be >= 0")
        if self.search_window is not None and self.search_window < 1:
            raise ValueError("search_window must be >= 1 when set")
        for name, value in (("Q_weight", Q), ("R_weight", R), ("E_bounds", E)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def input_bounds(self, params: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
        """The U box: throttle in [0, 1], steering within +/- delta_max."""
        return np.array([0.0, -params.delta_max]), np.array([1.0, params.delta_max])

    @classmethod
    def from_mapping(cls, payload: Mapping[str, Any], dt: float) -> "MpcConfig":
        """Build from the ``controller`` config section."""
        return cls(
            horizon=int(payload["horizon"]),
            dt=dt,
            Q_weight=np.diag(np.asarray(payload["q_weight_diag"], dtype=float)),
            R_weight=np.diag(np.asarray(payload["r_weight_diag"], dtype=float)),
            E_bounds=np.asarray(payload["e_bounds"], dtype=float),
            lookahead=int(payload["lookahead"]),
            search_window=None if payload.get("search_window") is None else int(payload["search_window"]),
            solver=SolverSettings.from_mapping(payload.get("solver", {})),
        )


# ---------------------------------------------------------------------------
# Quadratic program
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HorizonLayout:
    """Variable layout ``[e_0, ..., e_N, u_0, ..., u_{N-1}]``."""

    horizon: int

    @property
    def n_errors(self) -> int:
        return N_STATES * (self.horizon + 1)

    @property
    def n_variables(self) -> int:
        return self.n_errors + N_INPUTS * self.horizon

    @property
    def error_block(self) -> slice:
        return slice(0, self.n_errors)

    @property
    def input_block(self) -> slice:
        return slice(self.n_errors, self.n_variables)


@dataclass(frozen=True)
class QpProblem:
    """``min x^T H x + c^T x + offset`` s.t. ``A_eq x = b_eq`` and ``lower <= x <= upper``.

    Attributes:
        hessian:  Sparse symmetric PSD ``H`` (n x n).
        linear:   ``c`` (n,).
        A_eq:     Sparse equality matrix (m x n), m may be 0.
        b_eq:     Equality right-hand side (m,).
        lower:    Variable lower bounds, ``-inf`` when free.
        upper:    Variable upper bounds, ``+inf`` when free.
        offset:   Constant added to the reported objective.
        layout:   Horizon layout when the problem came from the MPC.
    """

    hessian: sparse.csc_matrix
    linear: np.ndarray
    A_eq: sparse.csc_matrix | None
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    offset: float = 0.0
    layout: HorizonLayout | None = None

    def __post_init__(self) -> None:
        hessian = sparse.csc_matrix(self.hessian, dtype=float)
        n = hessian.shape[0]
        if hessian.shape != (n, n):
            raise QpDimensionError(f"Hessian must be square, got {hessian.shape}")
        linear = np.asarray(self.linear, dtype=float).reshape(-1)
        b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
        A_eq = sparse.csc_matrix((0, n)) if self.A_eq is None else sparse.csc_matrix(self.A_eq, dtype=float)
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if linear.shape != (n,) or lower.shape != (n,) or upper.shape != (n,):
            raise QpDimensionError("linear term and bounds must match the Hessian size")
        if A_eq.shape[1] != n or b_eq.shape != (A_eq.shape[0],):
            raise QpDimensionError(f"equality block {A_eq.shape} / rhs {b_eq.shape} inconsistent with n={n}")
        if self.layout is not None and self.layout.n_variables != n:
            raise QpDimensionError(f"layout expects {self.layout.n_variables} variables, problem has {n}")
        if np.any(lower > upper):
            raise QpDimensionError("every lower bound must not exceed its upper bound")
        if hessian.nnz and abs(hessian - hessian.T).max() > 1e-9 * max(1.0, abs(hessian).max()):
            raise QpDimensionError("Hessian must be symmetric")
        for name, value in (
            ("hessian", hessian),
            ("linear", linear),
            ("A_eq", A_eq),
            ("b_eq", b_eq),
            ("lower", lower),
            ("upper", upper),
        ):
            object.__setattr__(self, name, value)

    @property
    def n_variables(self) -> int:
        return self.hessian.shape[0]

    @property
    def n_equalities(self) -> int:
        return self.A_eq.shape[0]

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ (self.hessian @ x) + self.linear @ x + self.offset)


@dataclass(frozen=True)
class QpSolution:
    """Result of :func:`~controller.admm.solve_qp`.

    ``y_eq`` and ``y_box`` are the multipliers of the equality and bound rows
    in the solver's internal ``1/2 x^T (2H) x + c^T x`` scaling.
    """

    x: np.ndarray
    y_eq: np.ndarray
    y_box: np.ndarray
    objective: float
    iterations: int
    status: QpStatus
    polished: bool = False
    primal_residual: float = math.inf
    dual_residual: float = math.inf
    layout: HorizonLayout | None = None

    @property
    def inputs(self) -> np.ndarray:
        """``(N, 2)`` stacked inputs; requires a horizon layout."""
        if self.layout is None:
            raise QpDimensionError("solution carries no horizon layout")
        return self.x[self.layout.input_block].reshape(self.layout.horizon, N_INPUTS)

    @property
    def errors(self) -> np.ndarray:
        """``(N + 1, 4)`` stacked errors; requires a horizon layout."""
        if self.layout is None:
            raise QpDimensionError("solution carries no horizon layout")
        return self.x[self.layout.error_block].reshape(self.layout.horizon + 1, N_STATES)


# ---------------------------------------------------------------------------
# Controller output
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MpcDiagnostics:
    """Per-tick controller diagnostics.

    Attributes:
        reference:  Reference point tracked this tick.
        error:      Error state fed to the QP.
        status:     Solver status.
        iterations: ADMM iterations.
        objective:  QP objective at the returned point.
        held:       True when the previous input was re-applied after a failure.
        solution:   Raw QP solution, used to warm start the next tick.
    """

    reference: ReferencePoint
    error: ErrorState
    status: QpStatus
    iterations: int
    objective: float
    held: bool
    solution: QpSolution
