"""One tick of the error-dynamics MPC."""

from __future__ import annotations

from utils import get_logger
from vehicle import ControlInput, VehicleParams, VehicleState

from .admm import solve_qp
from .error_dynamics import error_state, linearize_horizon
from .models import MpcConfig, MpcDiagnostics, QpSolution, ReferencePoint, Trajectory
from .qp import build_qp
from .reference import horizon_references, reference_lookup

logger = get_logger(__name__)


def _linearization_inputs(
    previous: QpSolution | None,
    refs: list[ReferencePoint],
    config: MpcConfig,
    params: VehicleParams,
) -> list[ControlInput]:
    """Previous solution shifted by one step, or the reference inputs on a cold start."""
    N = config.horizon
    if previous is None or previous.status != "solved" or previous.layout is None or previous.layout.horizon != N:
        return [ref.u_r for ref in refs]
    inputs = previous.inputs
    shifted = [inputs[min(k + 1, N - 1)] for k in range(N)]
    return [ControlInput.from_array(row, params) for row in shifted]


def mpc_step(
    q_est: VehicleState,
    trajectory: Trajectory,
    cursor: int,
    previous: QpSolution | None,
    config: MpcConfig,
    params: VehicleParams,
    last_input: ControlInput | None = None,
) -> tuple[ControlInput, int, MpcDiagnostics]:
    """Compute the input to apply this tick.

    Args:
        q_est:       State the controller acts on (estimate or plant truth).
        trajectory:  Reference trajectory.
        cursor:      Reference cursor carried from the previous tick.
        previous:    Previous QP solution, used for warm start and linearisation.
        last_input:  Input applied on the previous tick, re-applied if the
                     solver fails. Falls back to the reference input.

    Returns:
        The input (inside the U box), the new cursor and the tick diagnostics.

    Raises:
        TrajectoryError: If the trajectory is empty.
    """
    ref, cursor = reference_lookup(q_est, trajectory, cursor, config.lookahead, config.search_window)
    start = min(cursor + config.lookahead, len(trajectory) - 1)
    refs = horizon_references(trajectory, start, config.horizon, config.dt)
    e0 = error_state(q_est, ref)

    A_seq, B_seq = linearize_horizon(e0, refs, _linearization_inputs(previous, refs, config, params), config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, config, params)
    solution = solve_qp(problem, warm=previous, settings=config.solver)

    held = solution.status != "solved"
    if held:
        u = last_input if last_input is not None else ref.u_r.clamped(params)
        logger.warning(
            "MPC solve failed, holding last input",
            extra={"status": solution.status, "iterations": solution.iterations, "cursor": cursor},
        )
    else:
        u = ControlInput.from_array(solution.inputs[0], params)

    diagnostics = MpcDiagnostics(
        reference=ref,
        error=e0,
        status=solution.status,
        iterations=solution.iterations,
        objective=solution.objective,
        held=held,
        solution=solution,
    )
    return u, cursor, diagnostics
