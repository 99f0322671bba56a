"""Tracking and estimation error metrics."""

from __future__ import annotations

import numpy as np

from controller import Trajectory
from navsim.navsim_error import MetricsError

from .models import ErrorStats, RunLog, RunMetrics


def point_to_polyline_distance(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Shortest distance from each point to a polyline (segments, not vertices).

    Args:
        points:    ``(k, 2)`` query points.
        polyline:  ``(n, 2)`` vertices, ``n >= 1``.

    Returns:
        ``(k,)`` distances.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    polyline = np.asarray(polyline, dtype=float).reshape(-1, 2)
    if len(polyline) == 0:
        raise MetricsError("reference polyline is empty")
    if len(polyline) == 1:
        return np.hypot(*(points - polyline[0]).T)

    start = polyline[:-1]
    segment = polyline[1:] - start
    length_sq = np.einsum("ij,ij->i", segment, segment)
    # (k, n-1) projection parameter of every point on every segment
    rel = points[:, None, :] - start[None, :, :]
    t = np.divide(
        np.einsum("kij,ij->ki", rel, segment),
        length_sq[None, :],
        out=np.zeros((len(points), len(start))),
        where=length_sq[None, :] > 0.0,
    )
    t = np.clip(t, 0.0, 1.0)
    closest = start[None, :, :] + t[:, :, None] * segment[None, :, :]
    distances = np.hypot(points[:, None, 0] - closest[:, :, 0], points[:, None, 1] - closest[:, :, 1])
    return distances.min(axis=1)


def _stats(distances: np.ndarray) -> ErrorStats | None:
    if distances.size == 0:
        return None
    return ErrorStats(max_error=float(distances.max()), avg_error=float(distances.mean()), samples=int(distances.size))


def compute_metrics(log: RunLog, trajectory: Trajectory, skip_initial: float = 0.0) -> RunMetrics:
    """Max and average errors of one run.

    Measurement and estimate errors are point distances to plant truth (the
    measurement only on ticks with a fix). Tracking error is the distance from
    plant truth to the reference polyline. Rows before ``skip_initial`` seconds
    are ignored.

    Raises:
        MetricsError: If the log (after skipping) has no rows.
    """
    rows = [row for row in log.rows if row.t >= skip_initial]
    if not rows:
        raise MetricsError("cannot compute metrics of an empty log")
    subset = RunLog(rows=rows)
    truth = subset.truth_xy()
    measured = subset.measurement_xy()
    has_fix = ~np.isnan(measured).any(axis=1)

    return RunMetrics(
        measurement=_stats(np.hypot(*(measured[has_fix] - truth[has_fix]).T)),
        estimate=_stats(np.hypot(*(subset.estimate_xy() - truth).T)),
        tracking=_stats(point_to_polyline_distance(truth, trajectory.polyline())),
    )
