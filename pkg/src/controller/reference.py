"""Reference selection along a waypoint trajectory."""

from __future__ import annotations

import numpy as np

from navsim.navsim_error import TrajectoryError
from vehicle import VehicleState

from .models import ReferencePoint, Trajectory


def reference_lookup(
    q: VehicleState,
    trajectory: Trajectory,
    cursor: int,
    lookahead: int = 3,
    search_window: int | None = None,
) -> tuple[ReferencePoint, int]:
    """Nearest waypoint at or after ``cursor``, advanced by ``lookahead`` points.

    The cursor never moves backwards. On exact distance ties the smallest index
    wins. With ``search_window`` set only that many points past the cursor are
    scanned.

    Returns:
        The selected reference point and the new cursor (the nearest index,
        before the lookahead is applied).

    Raises:
        TrajectoryError: If the trajectory is empty or the cursor is out of range.
    """
    n = len(trajectory)
    if n == 0:
        raise TrajectoryError("reference trajectory is empty")
    if not 0 <= cursor < n:
        raise TrajectoryError(f"cursor {cursor} outside trajectory of {n} points")

    stop = n if search_window is None else min(n, cursor + search_window + 1)
    candidates = trajectory.positions()[cursor:stop]
    distances = np.hypot(candidates[:, 0] - q.x, candidates[:, 1] - q.y)
    # argmin returns the first minimum, so ties resolve to the smallest index
    nearest = cursor + int(np.argmin(distances))
    return trajectory.points[min(nearest + lookahead, n - 1)], nearest


def horizon_references(trajectory: Trajectory, start: int, count: int, dt: float) -> list[ReferencePoint]:
    """``count`` references beginning at ``start``, spaced one control step apart.

    The index stride is the number of waypoints covered at the reference speed
    in ``dt``; indices past the end clamp to the last point.
    """
    n = len(trajectory)
    if n == 0:
        raise TrajectoryError("reference trajectory is empty")
    refs = []
    index = start
    for _ in range(count):
        point = trajectory.points[min(index, n - 1)]
        refs.append(point)
        index += max(1, int(round(point.v_r * dt / trajectory.spacing)))
    return refs

