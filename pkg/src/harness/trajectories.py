"""Reference trajectory generators.

Every waypoint carries its tangent heading, the reference speed and the
feed-forward input: steering from the local curvature and the throttle that
holds the reference speed.
"""

from __future__ import annotations

import math

import numpy as np

from controller import ReferencePoint, Trajectory
from navsim.navsim_error import TrajectoryError
from vehicle import ControlInput, VehicleParams, reference_steering, steady_state_throttle

from .models import TrajectorySpec
from .run_log import read_trajectory_csv

DENSE_SAMPLES_PER_SPACING = 50


def three_point_curvature(positions: np.ndarray, closed: bool = False) -> np.ndarray:
    """Signed curvature at each point from the circle through it and its neighbours.

    Positive curvature turns left. Endpoints of an open path copy their
    neighbour; paths with fewer than three points are straight.
    """
    points = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(points)
    curvature = np.zeros(n)
    if n < 3:
        return curvature
    if closed:
        prev_pts = np.roll(points, 1, axis=0)
        next_pts = np.roll(points, -1, axis=0)
        index = np.arange(n)
    else:
        prev_pts = points[:-2]
        next_pts = points[2:]
        index = np.arange(1, n - 1)
    mid = points[index]
    a = np.hypot(*(mid - prev_pts).T)
    b = np.hypot(*(next_pts - mid).T)
    c = np.hypot(*(next_pts - prev_pts).T)
    cross = (mid[:, 0] - prev_pts[:, 0]) * (next_pts[:, 1] - mid[:, 1]) - (mid[:, 1] - prev_pts[:, 1]) * (next_pts[:, 0] - mid[:, 0])
    denom = a * b * c
    values = np.divide(2.0 * cross, denom, out=np.zeros_like(denom), where=denom > 0.0)
    curvature[index] = values
    if not closed:
        curvature[0] = curvature[1]
        curvature[-1] = curvature[-2]
    return curvature


def _points(
    xy: np.ndarray,
    headings: np.ndarray,
    curvature: np.ndarray,
    speed: float,
    params: VehicleParams,
) -> tuple[ReferencePoint, ...]:
    alpha = steady_state_throttle(speed, params)
    points = []
    for (x, y), theta, kappa in zip(xy, headings, curvature):
        delta = reference_steering(float(kappa), params)
        if abs(delta) > params.delta_max:
            raise TrajectoryError(
                f"curvature {kappa:.4f} 1/m at ({x:.2f}, {y:.2f}) needs steering beyond delta_max"
            )
        points.append(
            ReferencePoint(x_r=float(x), y_r=float(y), theta_r=float(theta), v_r=speed, u_r=ControlInput(alpha=alpha, delta=delta))
        )
    return tuple(points)


def generate_circle(
    radius: float,
    speed: float,
    spacing: float,
    params: VehicleParams,
    arc_fraction: float = 1.0,
) -> Trajectory:
    """Counter-clockwise circle starting at the origin heading east.

    The center sits at ``(0, radius)``. A full lap is a closed trajectory of
    ``round(2 pi r / spacing)`` points; a partial arc also includes its
    endpoint. The actual spacing is adjusted so the points divide the arc evenly.
    """
    if radius <= 0.0 or speed <= 0.0 or spacing <= 0.0:
        raise TrajectoryError("radius, speed and spacing must be positive")
    if not 0.0 < arc_fraction <= 1.0:
        raise TrajectoryError(f"arc_fraction must lie in (0, 1], got {arc_fraction}")
    arc_length = 2.0 * math.pi * radius * arc_fraction
    n_segments = max(3, int(round(arc_length / spacing)))
    closed = arc_fraction == 1.0
    step = arc_length / n_segments
    n_points = n_segments if closed else n_segments + 1

    phi = np.arange(n_points) * step / radius
    xy = np.column_stack([radius * np.sin(phi), radius - radius * np.cos(phi)])
    curvature = np.full(n_points, 1.0 / radius)
    return Trajectory(points=_points(xy, phi, curvature, speed, params), spacing=step, closed=closed)


def generate_sinusoid(
    amplitude: float,
    wavelength: float,
    length: float,
    speed: float,
    spacing: float,
    params: VehicleParams,
) -> Trajectory:
    """``y = A sin(2 pi x / wavelength)`` for ``x`` in ``[0, length]``.

    Points are placed at equal arc length by inverting the arc-length function
    on a dense grid; ``y`` is evaluated exactly at each sampled ``x``.
    """
    if amplitude < 0.0 or wavelength <= 0.0 or length <= 0.0 or speed <= 0.0 or spacing <= 0.0:
        raise TrajectoryError("sinusoid arguments must be positive")
    k = 2.0 * math.pi / wavelength
    n_dense = max(2000, int(math.ceil(length / spacing)) * DENSE_SAMPLES_PER_SPACING)
    x_dense = np.linspace(0.0, length, n_dense + 1)
    y_dense = amplitude * np.sin(k * x_dense)
    s_dense = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(x_dense), np.diff(y_dense)))])

    total = s_dense[-1]
    n_segments = max(2, int(round(total / spacing)))
    s_samples = np.linspace(0.0, total, n_segments + 1)
    x = np.interp(s_samples, s_dense, x_dense)
    y = amplitude * np.sin(k * x)
    headings = np.arctan(amplitude * k * np.cos(k * x))
    curvature = three_point_curvature(np.column_stack([x, y]))
    return Trajectory(
        points=_points(np.column_stack([x, y]), headings, curvature, speed, params),
        spacing=total / n_segments,
        closed=False,
    )


def build_trajectory(spec: TrajectorySpec, params: VehicleParams) -> Trajectory:
    """Generate (or load) the trajectory described by ``spec``."""
    if spec.kind == "circle":
        return generate_circle(spec.radius, spec.speed, spec.spacing, params, arc_fraction=spec.arc_fraction)
    if spec.kind == "sinusoid":
        return generate_sinusoid(spec.amplitude, spec.wavelength, spec.length, spec.speed, spec.spacing, params)
    return read_trajectory_csv(spec.path)


def path_length(trajectory: Trajectory) -> float:
    """Polyline length of the trajectory (m), including the closing segment."""
    polyline = trajectory.polyline()
    if len(polyline) < 2:
        return 0.0
    return float(np.sum(np.hypot(*np.diff(polyline, axis=0).T)))
