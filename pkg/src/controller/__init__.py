from .models import (
    ErrorState,
    HorizonLayout,
    MpcConfig,
    MpcDiagnostics,
    QpProblem,
    QpSolution,
    QpStatus,
    ReferencePoint,
    SolverSettings,
    Trajectory,
)
from .error_dynamics import error_state, linearize_horizon
from .reference import horizon_references, reference_lookup
from .qp import build_qp
from .admm import kkt_residuals, solve_qp
from .mpc import mpc_step

__all__ = [
    "ErrorState",
    "HorizonLayout",
    "MpcConfig",
    "MpcDiagnostics",
    "QpProblem",
    "QpSolution",
    "QpStatus",
    "ReferencePoint",
    "SolverSettings",
    "Trajectory",
    "build_qp",
    "error_state",
    "horizon_references",
    "kkt_residuals",
    "linearize_horizon",
    "mpc_step",
    "reference_lookup",
    "solve_qp",
]
