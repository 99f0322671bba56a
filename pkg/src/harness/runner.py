"""Closed-loop scenario engine.

One control tick, in order: advance per-tick sensor noise, EKF predict with
the previously applied input, sensor readings due on this tick (GPS
correction first, then heading), controller input for the mode, log the
row, step the plant. Sensor schedules use integer tick arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from controller import QpSolution, Trajectory, mpc_step, reference_lookup
from estimator import predict, update_gps, update_heading
from geodesy import make_ltp, to_ltp
from navsim.navsim_error import MetricsError, NavSimError, TrajectoryError
from sensors import GpsSensor, Magnetometer
from utils import bind_logger, get_logger
from vehicle import ControlInput, VehicleState, step

from .metrics import compute_metrics
from .models import LogRow, RunLog, RunMetrics, Scenario
from .trajectories import build_trajectory, path_length

logger = get_logger(__name__)


def scenario_duration(scenario: Scenario, trajectory: Trajectory) -> float:
    """Configured duration, or the time to traverse the path at reference speed."""
    if scenario.duration is not None:
        return scenario.duration
    speed = float(np.mean([point.v_r for point in trajectory.points]))
    if speed <= 0.0:
        raise TrajectoryError("cannot derive a duration for a trajectory with zero reference speed")
    return path_length(trajectory) / speed


def run_scenario(scenario: Scenario, trajectory: Trajectory | None = None) -> tuple[RunLog, RunMetrics]:
    """Run one scenario to completion.

    A module error raised inside the loop ends the run early; the rows logged
    so far are kept and the log is flagged invalid.

    Args:
        scenario:    Validated scenario.
        trajectory:  Pre-built reference; generated from the scenario when omitted.

    Returns:
        The run log and its metrics.
    """
    trajectory = trajectory if trajectory is not None else build_trajectory(scenario.trajectory, scenario.vehicle)
    if len(trajectory) == 0:
        raise TrajectoryError("reference trajectory is empty")

    run_logger = bind_logger(logger, scenario=scenario.name, mode=scenario.mode, seed=scenario.seed)
    dt = scenario.dt
    n_ticks = max(1, int(round(scenario_duration(scenario, trajectory) * scenario.control_rate_hz)))
    last_index = len(trajectory) - 1

    first = trajectory.points[0]
    frame = make_ltp(scenario.origin, heading=first.theta_r)
    truth = VehicleState(x=first.x_r, y=first.y_r, theta=first.theta_r, v=first.v_r)
    est = scenario.ekf.initial_state(truth)
    gps = GpsSensor(scenario.gps, frame)
    magnetometer = Magnetometer(scenario.magnetometer)
    plant = scenario.plant_params
    model = scenario.vehicle
    constant_input = scenario.constant_input or first.u_r
    u_prev: ControlInput = constant_input if scenario.mode == "ekf-only" else first.u_r

    log = RunLog(scenario=scenario.name)
    cursor = 0
    previous: QpSolution | None = None
    tick = 0
    run_logger.info("Scenario started", extra={"ticks": n_ticks, "waypoints": len(trajectory)})
    try:
        for tick in range(n_ticks):
            t = tick / scenario.control_rate_hz
            gps.on_tick()
            if tick > 0:
                est = predict(est, u_prev, dt, model, scenario.ekf)

            meas_x = meas_y = meas_theta = math.nan
            if tick % scenario.gps_every == 0:
                fix = gps.measure((truth.x, truth.y), t)
                meas_x, meas_y = to_ltp(frame, fix.payload)
                est = update_gps(est, (meas_x, meas_y), scenario.ekf)
            if tick % scenario.magnetometer_every == 0:
                meas_theta = magnetometer.measure(truth.theta, t).payload
                est = update_heading(est, meas_theta, scenario.ekf)

            completed = False
            if scenario.mode == "ekf-only":
                reference, cursor = reference_lookup(truth, trajectory, cursor, 0, scenario.mpc.search_window)
                u = constant_input
                status, iterations, objective = "none", 0, math.nan
            else:
                controlled = truth if scenario.mode == "mpc-privileged" else est.q_hat
                u, cursor, diagnostics = mpc_step(
                    controlled, trajectory, cursor, previous, scenario.mpc, model, last_input=u_prev
                )
                previous = diagnostics.solution
                reference = diagnostics.reference
                status, iterations, objective = diagnostics.status, diagnostics.iterations, diagnostics.objective
                completed = cursor == last_index and diagnostics.error.e1 <= 0.0

            log.append(
                LogRow(
                    tick=tick,
                    t=t,
                    truth=truth,
                    meas_x=meas_x,
                    meas_y=meas_y,
                    meas_theta=meas_theta,
                    estimate=est.q_hat,
                    reference=reference,
                    u=u,
                    qp_status=status,
                    qp_iters=iterations,
                    qp_objective=objective,
                )
            )
            if completed:
                run_logger.info("Reference path completed", extra={"t": t})
                break
            truth = step(truth, u, dt, plant)
            u_prev = u
    except (NavSimError, ValueError, np.linalg.LinAlgError) as exc:
        log.valid = False
        log.error = f"{type(exc).__name__}: {exc}"
        run_logger.error("Scenario aborted", extra={"tick": tick, "error": str(exc)})

    try:
        metrics = compute_metrics(log, trajectory, scenario.skip_initial)
    except MetricsError:
        metrics = RunMetrics(measurement=None, estimate=None, tracking=None)

    run_logger.info(
        "Scenario finished",
        extra={
            "rows": len(log),
            "valid": log.valid,
            "tracking_avg": metrics.tracking.avg_error if metrics.tracking else None,
            "estimate_avg": metrics.estimate.avg_error if metrics.estimate else None,
            "measurement_avg": metrics.measurement.avg_error if metrics.measurement else None,
        },
    )
    return log, metrics
