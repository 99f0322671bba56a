"""SVG trajectory overlays."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from controller import Trajectory
from harness import LoggedRun
from utils import atomic_output, get_logger

from .navsim_error import LogFormatError

logger = get_logger(__name__)

# Fixed hash salt and no date so identical inputs give identical SVG bytes.
_SVG_RC = {"svg.hashsalt": "navsim", "svg.fonttype": "path"}


def _finite_rows(points: np.ndarray) -> np.ndarray:
    return points[np.all(np.isfinite(points), axis=1)]


def render_figure(run: LoggedRun, trajectory: Trajectory, title: str | None = None) -> Figure:
    """Overlay the reference path, plant truth, estimate and raw GPS fixes."""
    figure = Figure(figsize=(8.0, 6.0))
    axes = figure.add_subplot(1, 1, 1)

    reference = trajectory.polyline()
    axes.plot(reference[:, 0], reference[:, 1], color="tab:green", linewidth=1.5, label="reference")
    truth = _finite_rows(run.xy("truth"))
    axes.plot(truth[:, 0], truth[:, 1], color="tab:blue", linewidth=1.2, label="truth")
    estimate = _finite_rows(run.xy("est"))
    axes.plot(estimate[:, 0], estimate[:, 1], color="tab:red", linewidth=1.0, linestyle="--", label="estimate")
    measurements = _finite_rows(run.xy("meas"))
    if len(measurements):
        axes.scatter(measurements[:, 0], measurements[:, 1], color="tab:gray", s=4, alpha=0.6, label="GPS fixes")

    axes.set_xlabel("x east (m)")
    axes.set_ylabel("y north (m)")
    axes.set_aspect("equal", adjustable="datalim")
    axes.grid(True, linewidth=0.3)
    axes.legend(loc="best")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    return figure


def plot_run(run: LoggedRun, trajectory: Trajectory, path: str | Path, title: str | None = None) -> Path:
    """Write the overlay for ``run`` to ``path`` as a standalone SVG.

    Raises:
        LogFormatError: if the log has no rows. Nothing is written.
    """
    if len(run) == 0:
        raise LogFormatError("run log has no rows to plot")
    path = Path(path)
    with matplotlib.rc_context(_SVG_RC):
        figure = render_figure(run, trajectory, title=title)
        with atomic_output(path, mode="wb") as handle:
            figure.savefig(handle, format="svg", metadata={"Date": None})
    logger.info("Plot written", extra={"path": str(path), "rows": len(run)})
    return path
