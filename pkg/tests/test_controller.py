from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from controller import (
    ErrorState,
    MpcConfig,
    ReferencePoint,
    SolverSettings,
    Trajectory,
    build_qp,
    error_state,
    horizon_references,
    kkt_residuals,
    linearize_horizon,
    mpc_step,
    reference_lookup,
    solve_qp,
)
from harness import generate_circle, generate_sinusoid
from navsim.navsim_error import QpDimensionError, SteeringSingularityError, TrajectoryError
from vehicle import ControlInput, VehicleState


@pytest.fixture
def mpc_config(scenario) -> MpcConfig:
    return scenario.mpc


@pytest.fixture
def straight(params):
    return generate_sinusoid(0.0, 10.0, 10.0, 1.0, 0.05, params)


@pytest.fixture
def circle(params):
    return generate_circle(5.0, 1.0, 0.05, params)


# ---------------------------------------------------------------------------
# Error state
# ---------------------------------------------------------------------------

def test_error_state_examples(params, circle):
    ref = circle.points[10]
    at_ref = VehicleState(ref.x_r, ref.y_r, ref.theta_r, ref.v_r)
    assert error_state(at_ref, ref).as_array() == pytest.approx(np.zeros(4), abs=1e-12)

    target = ReferencePoint(x_r=1.0, y_r=2.0, theta_r=0.0, v_r=1.0, u_r=ControlInput(0.1, 0.0))
    e = error_state(VehicleState(0.0, 0.0, 0.0, 1.0), target)
    assert (e.e1, e.e2) == pytest.approx((1.0, 2.0))

    target = ReferencePoint(x_r=1.0, y_r=0.0, theta_r=0.0, v_r=1.0, u_r=ControlInput(0.1, 0.0))
    e = error_state(VehicleState(0.0, 0.0, math.pi / 2.0, 1.0), target)
    assert (e.e1, e.e2) == pytest.approx((0.0, -1.0), abs=1e-12)
    assert e.e3 == pytest.approx(-math.pi / 2.0)


def test_error_state_heading_is_wrapped():
    target = ReferencePoint(x_r=0.0, y_r=0.0, theta_r=3.0, v_r=1.0, u_r=ControlInput(0.1, 0.0))
    e = error_state(VehicleState(0.0, 0.0, -3.0, 1.0), target)
    assert e.e3 == pytest.approx(6.0 - 2.0 * math.pi)


# ---------------------------------------------------------------------------
# Linearisation
# ---------------------------------------------------------------------------

def test_linearization_at_zero_error(params, mpc_config, straight):
    refs = horizon_references(straight, 0, mpc_config.horizon, mpc_config.dt)
    inputs = [ControlInput(ref.u_r.alpha, 0.0) for ref in refs]
    A_seq, B_seq = linearize_horizon(ErrorState(0.0, 0.0, 0.0, 0.0), refs, inputs, mpc_config, params)
    v_r = refs[0].v_r
    decay = -(params.c_1 * params.omega_0 + params.tau_0) / (params.i_wheel * params.omega_0)
    continuous = np.zeros((4, 4))
    continuous[1, 2] = v_r
    continuous[3, 3] = decay
    expected = np.eye(4) + mpc_config.dt * continuous
    assert len(A_seq) == len(B_seq) == mpc_config.horizon
    assert A_seq[0] == pytest.approx(expected, abs=1e-12)
    assert B_seq[0][2, 1] == pytest.approx(-mpc_config.dt * v_r / params.l)
    assert B_seq[0][3, 0] == pytest.approx(-mpc_config.dt * params.tau_0 * params.r_wheel * params.gamma / params.i_wheel)


def test_linearization_rejects_bad_inputs(params, mpc_config, straight):
    refs = horizon_references(straight, 0, mpc_config.horizon, mpc_config.dt)
    inputs = [ref.u_r for ref in refs]
    e0 = ErrorState(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(SteeringSingularityError):
        linearize_horizon(e0, refs, [ControlInput(0.1, math.pi / 2.0)] * len(refs), mpc_config, params)
    with pytest.raises(QpDimensionError):
        linearize_horizon(e0, refs[:3], inputs[:3], mpc_config, params)


# ---------------------------------------------------------------------------
# Reference lookup
# ---------------------------------------------------------------------------

def test_lookup_examples(circle):
    first = circle.points[0]
    q = VehicleState(first.x_r, first.y_r, first.theta_r, 1.0)
    point, cursor = reference_lookup(q, circle, 0, lookahead=0)
    assert point == first and cursor == 0

    last = len(circle) - 1
    point, cursor = reference_lookup(q, circle, last, lookahead=3)
    assert point == circle.points[last] and cursor == last


def test_lookup_matches_brute_force(circle):
    rng = np.random.default_rng(21)
    positions = circle.positions()
    for _ in range(100):
        cursor = int(rng.integers(0, len(circle)))
        q = VehicleState(float(rng.uniform(-6.0, 6.0)), float(rng.uniform(-1.0, 11.0)), 0.0, 1.0)
        point, new_cursor = reference_lookup(q, circle, cursor, lookahead=3)
        distances = [math.hypot(x - q.x, y - q.y) for x, y in positions[cursor:]]
        nearest = cursor + int(np.argmin(distances))
        assert new_cursor == nearest >= cursor
        assert point == circle.points[min(nearest + 3, len(circle) - 1)]


def test_lookup_search_window_limits_the_scan(circle):
    first = circle.points[0]
    q = VehicleState(first.x_r, first.y_r, first.theta_r, 1.0)
    # the start of a closed lap is also next to its last point; the window keeps the cursor near 0
    _, cursor = reference_lookup(q, circle, 1, lookahead=0, search_window=40)
    assert 1 <= cursor <= 41


def test_lookup_errors(circle):
    q = VehicleState(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(TrajectoryError):
        reference_lookup(q, Trajectory(points=(), spacing=0.05), 0)
    with pytest.raises(TrajectoryError):
        reference_lookup(q, circle, len(circle))


def test_horizon_references_step_at_reference_speed(straight, mpc_config):
    refs = horizon_references(straight, 0, 5, mpc_config.dt)
    stride = round(1.0 * mpc_config.dt / straight.spacing)
    assert [ref.x_r for ref in refs] == pytest.approx([k * stride * straight.spacing for k in range(5)], abs=1e-9)
    tail = horizon_references(straight, len(straight) - 2, 4, mpc_config.dt)
    assert all(ref == straight.points[-1] for ref in tail[1:])


# ---------------------------------------------------------------------------
# QP
# ---------------------------------------------------------------------------

def test_zero_error_qp_returns_reference_inputs(params, mpc_config, circle):
    refs = horizon_references(circle, 5, mpc_config.horizon, mpc_config.dt)
    e0 = ErrorState(0.0, 0.0, 0.0, 0.0)
    A_seq, B_seq = linearize_horizon(e0, refs, [ref.u_r for ref in refs], mpc_config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, mpc_config, params)
    solution = solve_qp(problem, settings=mpc_config.solver)
    assert solution.status == "solved"
    expected = np.array([ref.u_r.as_array() for ref in refs])
    assert solution.inputs == pytest.approx(expected, abs=1e-5)
    assert solution.errors == pytest.approx(np.zeros((mpc_config.horizon + 1, 4)), abs=1e-5)
    assert solution.objective == pytest.approx(0.0, abs=1e-8)


def test_tracking_qp_satisfies_kkt_and_bounds(params, mpc_config, circle):
    refs = horizon_references(circle, 5, mpc_config.horizon, mpc_config.dt)
    e0 = ErrorState(0.3, -0.4, 0.2, 0.5)
    A_seq, B_seq = linearize_horizon(e0, refs, [ref.u_r for ref in refs], mpc_config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, mpc_config, params)
    solution = solve_qp(problem, settings=mpc_config.solver)
    assert solution.status == "solved"
    primal, dual = kkt_residuals(problem, solution)
    assert primal < 1e-5 and dual < 1e-5
    assert solution.errors[0] == pytest.approx(e0.as_array(), abs=1e-6)
    inputs = solution.inputs
    assert np.all(inputs[:, 0] >= -1e-6) and np.all(inputs[:, 0] <= 1.0 + 1e-6)
    assert np.all(np.abs(inputs[:, 1]) <= params.delta_max + 1e-6)
    for k in range(mpc_config.horizon):
        predicted = A_seq[k] @ solution.errors[k] + B_seq[k] @ (inputs[k] - refs[k].u_r.as_array())
        assert solution.errors[k + 1] == pytest.approx(predicted, abs=1e-5)


def test_single_step_qp_structure(params, mpc_config, circle):
    config = replace(mpc_config, horizon=1)
    refs = horizon_references(circle, 5, 1, config.dt)
    e0 = ErrorState(0.1, -0.2, 0.05, 0.1)
    A_seq, B_seq = linearize_horizon(e0, refs, [ref.u_r for ref in refs], config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, config, params)

    layout = problem.layout
    assert layout.n_variables == 10
    assert (layout.error_block, layout.input_block) == (slice(0, 8), slice(8, 10))
    hessian = problem.hessian.toarray()
    assert np.array_equal(hessian[:4, :4], config.Q_weight)
    assert np.array_equal(hessian[4:8, 4:8], config.Q_weight)
    assert np.array_equal(hessian[8:, 8:], config.R_weight)
    assert np.count_nonzero(hessian[:4, 4:]) == 0 and np.count_nonzero(hessian[:8, 8:]) == 0

    A_eq = problem.A_eq.toarray()
    assert A_eq.shape == (8, 10)
    assert np.array_equal(A_eq[:4], np.hstack([np.eye(4), np.zeros((4, 6))]))
    assert A_eq[4:] == pytest.approx(np.hstack([-A_seq[0], np.eye(4), -B_seq[0]]))
    u_r = refs[0].u_r.as_array()
    assert problem.b_eq == pytest.approx(np.concatenate([e0.as_array(), -B_seq[0] @ u_r]))


def test_single_step_optimum_beats_random_feasible_points(params, mpc_config, circle):
    config = replace(mpc_config, horizon=1)
    refs = horizon_references(circle, 5, 1, config.dt)
    e0 = ErrorState(0.1, -0.2, 0.05, 0.1)
    A_seq, B_seq = linearize_horizon(e0, refs, [ref.u_r for ref in refs], config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, config, params)
    solution = solve_qp(problem, settings=config.solver)
    assert solution.status == "solved"

    rng = np.random.default_rng(11)
    u_low, u_high = config.input_bounds(params)
    u_r = refs[0].u_r.as_array()
    checked = 0
    for _ in range(1000):
        u = rng.uniform(u_low, u_high)
        e1 = A_seq[0] @ e0.as_array() + B_seq[0] @ (u - u_r)
        if np.any(np.abs(e1) > config.E_bounds):
            continue
        checked += 1
        candidate = np.concatenate([e0.as_array(), e1, u])
        assert solution.objective <= problem.objective(candidate) + 1e-6
    assert checked == 1000


def test_initial_error_is_not_boxed(params, mpc_config, circle):
    refs = horizon_references(circle, 5, mpc_config.horizon, mpc_config.dt)
    e0 = ErrorState(25.0, -25.0, 0.0, 0.0)
    A_seq, B_seq = linearize_horizon(e0, refs, [ref.u_r for ref in refs], mpc_config, params)
    problem = build_qp(e0, A_seq, B_seq, refs, mpc_config, params)
    assert np.all(np.isinf(problem.lower[:4])) and np.all(np.isinf(problem.upper[:4]))
    with pytest.raises(QpDimensionError):
        build_qp(e0, A_seq[:-1], B_seq, refs, mpc_config, params)


# ---------------------------------------------------------------------------
# MPC step
# ---------------------------------------------------------------------------

def test_vehicle_left_of_path_steers_right(params, mpc_config, straight):
    left, cursor_left, diag_left = mpc_step(VehicleState(1.0, 0.3, 0.0, 1.0), straight, 0, None, mpc_config, params)
    right, _, diag_right = mpc_step(VehicleState(1.0, -0.3, 0.0, 1.0), straight, 0, None, mpc_config, params)
    assert diag_left.status == "solved" and diag_right.status == "solved"
    assert left.delta < 0.0 < right.delta
    assert left.delta == pytest.approx(-right.delta, abs=1e-5)
    assert cursor_left == 20


def test_slow_vehicle_gets_more_throttle(params, mpc_config, straight):
    u, _, diagnostics = mpc_step(VehicleState(1.0, 0.0, 0.0, 0.5), straight, 0, None, mpc_config, params)
    assert diagnostics.status == "solved"
    assert u.alpha > diagnostics.reference.u_r.alpha
    assert 0.0 <= u.alpha <= 1.0
    assert abs(u.delta) <= params.delta_max


def test_failed_solve_holds_last_input(params, mpc_config, straight):
    config = replace(mpc_config, solver=SolverSettings(max_iter=1, polish=False))
    last = ControlInput(alpha=0.2, delta=0.05)
    u, _, diagnostics = mpc_step(VehicleState(1.0, 0.3, 0.1, 0.8), straight, 0, None, config, params, last_input=last)
    assert diagnostics.status == "max-iterations"
    assert diagnostics.held
    assert u == last

    u, _, _ = mpc_step(VehicleState(1.0, 0.3, 0.1, 0.8), straight, 0, None, config, params)
    assert u == u.clamped(params)


def test_warm_started_tick_solves(params, mpc_config, circle):
    q = VehicleState(0.0, 0.1, 0.0, 1.0)
    first_u, cursor, first = mpc_step(q, circle, 0, None, mpc_config, params)
    second_u, second_cursor, second = mpc_step(q, circle, cursor, first.solution, mpc_config, params)
    assert first.status == second.status == "solved"
    assert not second.held
    assert second_cursor == cursor
    assert second_u.within(params)


def test_mpc_config_validation(mpc_config):
    with pytest.raises(ValueError):
        replace(mpc_config, horizon=0)
    with pytest.raises(QpDimensionError):
        replace(mpc_config, E_bounds=np.ones(3))
    with pytest.raises(ValueError):
        replace(mpc_config, R_weight=np.zeros((2, 2)))
