"""CSV persistence of run logs, reference trajectories and batch summaries.

Every file starts with a ``# schema=1`` comment line followed by a header row.
Floats are written with ``repr`` so identical runs produce identical bytes;
missing values are empty cells.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from controller import ReferencePoint, Trajectory
from navsim.navsim_error import LogFormatError
from utils import atomic_output
from vehicle import ControlInput

from .models import BatchResult, ErrorStats, RunLog

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# schema={SCHEMA_VERSION}"

LOG_COLUMNS: tuple[str, ...] = (
    "tick",
    "t",
    "truth_x",
    "truth_y",
    "truth_theta",
    "truth_v",
    "meas_x",
    "meas_y",
    "meas_theta",
    "est_x",
    "est_y",
    "est_theta",
    "est_v",
    "ref_x",
    "ref_y",
    "ref_theta",
    "ref_v",
    "u_alpha",
    "u_delta",
    "qp_status",
    "qp_iters",
    "qp_objective",
)
TRAJECTORY_COLUMNS: tuple[str, ...] = ("x_r", "y_r", "theta_r", "v_r", "alpha_r", "delta_r")
SUMMARY_COLUMNS: tuple[str, ...] = (
    "run",
    "seed",
    "valid",
    "meas_max",
    "meas_avg",
    "ekf_max",
    "ekf_avg",
    "track_max",
    "track_avg",
    "error",
)


def _fmt(value: float) -> str:
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def _parse(cell: str, column: str, line: int) -> float:
    if cell == "":
        return math.nan
    try:
        return float(cell)
    except ValueError as exc:
        raise LogFormatError(f"column {column!r}: {cell!r} is not a number", line=line) from exc


# ---------------------------------------------------------------------------
# Run log
# ---------------------------------------------------------------------------

def write_run_log(log: RunLog, path: str | Path) -> Path:
    """Write ``log`` to ``path`` atomically and return the path."""
    path = Path(path)
    with atomic_output(path, newline="", encoding="utf-8") as handle:
        handle.write(SCHEMA_LINE + "\n")
        if not log.valid:
            handle.write(f"# invalid: {log.error or 'aborted'}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for row in log.rows:
            writer.writerow(
                [
                    row.tick,
                    _fmt(row.t),
                    _fmt(row.truth.x),
                    _fmt(row.truth.y),
                    _fmt(row.truth.theta),
                    _fmt(row.truth.v),
                    _fmt(row.meas_x),
                    _fmt(row.meas_y),
                    _fmt(row.meas_theta),
                    _fmt(row.estimate.x),
                    _fmt(row.estimate.y),
                    _fmt(row.estimate.theta),
                    _fmt(row.estimate.v),
                    _fmt(row.reference.x_r),
                    _fmt(row.reference.y_r),
                    _fmt(row.reference.theta_r),
                    _fmt(row.reference.v_r),
                    _fmt(row.u.alpha),
                    _fmt(row.u.delta),
                    row.qp_status,
                    row.qp_iters,
                    _fmt(row.qp_objective),
                ]
            )
    return path


@dataclass
class LoggedRun:
    """A run log read back from CSV, column-wise.

    Attributes:
        columns:    Numeric columns keyed by header name.
        qp_status:  Solver status per row.
        valid:      False when the log was written by an aborted run.
        error:      Abort reason of an invalid log.
    """

    columns: dict[str, np.ndarray] = field(default_factory=dict)
    qp_status: list[str] = field(default_factory=list)
    valid: bool = True
    error: str | None = None

    def __len__(self) -> int:
        return len(self.qp_status)

    def xy(self, prefix: str) -> np.ndarray:
        """``(n, 2)`` positions of ``truth``, ``meas``, ``est`` or ``ref``."""
        return np.column_stack([self.columns[f"{prefix}_x"], self.columns[f"{prefix}_y"]])


def _read_rows(path: Path, expected: Sequence[str]) -> tuple[list[tuple[int, list[str]]], list[str]]:
    """Rows with their line numbers plus the comment lines after the schema line."""
    if not path.exists() or not path.is_file():
        raise FileNotFoundError(f"CSV file not found: {path}")
    comments: list[str] = []
    rows: list[tuple[int, list[str]]] = []
    with path.open("r", newline="", encoding="utf-8") as handle:
        first = handle.readline().rstrip("\r\n")
        if first != SCHEMA_LINE:
            raise LogFormatError(f"expected {SCHEMA_LINE!r}, got {first!r}", line=1)
        line = 1
        header_seen = False
        for record in csv.reader(handle):
            line += 1
            if record and record[0].startswith("#"):
                comments.append(",".join(record)[1:].strip())
                continue
            if not header_seen:
                if tuple(record) != tuple(expected):
                    raise LogFormatError(f"unexpected header {record}", line=line)
                header_seen = True
                continue
            if not record:
                continue
            if len(record) != len(expected):
                raise LogFormatError(f"expected {len(expected)} fields, got {len(record)}", line=line)
            rows.append((line, record))
    if not header_seen:
        raise LogFormatError("missing header row", line=line + 1)
    return rows, comments


def read_run_log(path: str | Path) -> LoggedRun:
    """Parse a run log written by :func:`write_run_log`.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        LogFormatError: On a malformed file, with the offending line number.
    """
    rows, comments = _read_rows(Path(path), LOG_COLUMNS)
    numeric = [name for name in LOG_COLUMNS if name != "qp_status"]
    status_index = LOG_COLUMNS.index("qp_status")
    values: dict[str, list[float]] = {name: [] for name in numeric}
    statuses: list[str] = []
    for line, record in rows:
        for index, name in enumerate(LOG_COLUMNS):
            if index == status_index:
                continue
            values[name].append(_parse(record[index], name, line))
        statuses.append(record[status_index])

    run = LoggedRun(columns={name: np.asarray(column, dtype=float) for name, column in values.items()}, qp_status=statuses)
    for comment in comments:
        if comment.startswith("invalid:"):
            run.valid = False
            run.error = comment.split(":", 1)[1].strip()
    return run


# ---------------------------------------------------------------------------
# Reference trajectory
# ---------------------------------------------------------------------------

def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    with atomic_output(path, newline="", encoding="utf-8") as handle:
        handle.write(SCHEMA_LINE + "\n")
        handle.write(f"# closed={'true' if trajectory.closed else 'false'}\n")
        handle.write(f"# spacing={_fmt(trajectory.spacing)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for point in trajectory.points:
            writer.writerow(
                [_fmt(point.x_r), _fmt(point.y_r), _fmt(point.theta_r), _fmt(point.v_r), _fmt(point.u_r.alpha), _fmt(point.u_r.delta)]
            )
    return path


def read_trajectory_csv(path: str | Path) -> Trajectory:
    """Load a waypoint trajectory.

    The spacing is read from the ``# spacing=`` line. Files without one get
    the mean chord between waypoints, closing segment included when closed.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        LogFormatError: On a malformed file or an empty trajectory.
    """
    rows, comments = _read_rows(Path(path), TRAJECTORY_COLUMNS)
    if not rows:
        raise LogFormatError("trajectory file has no waypoints")
    closed = False
    spacing: float | None = None
    for comment in comments:
        key, _, value = comment.replace(" ", "").partition("=")
        if key == "closed":
            closed = value == "true"
        elif key == "spacing":
            spacing = _parse(value, "spacing", 3)
    points = []
    for line, record in rows:
        x_r, y_r, theta_r, v_r, alpha_r, delta_r = (
            _parse(cell, name, line) for cell, name in zip(record, TRAJECTORY_COLUMNS)
        )
        try:
            points.append(ReferencePoint(x_r=x_r, y_r=y_r, theta_r=theta_r, v_r=v_r, u_r=ControlInput(alpha=alpha_r, delta=delta_r)))
        except ValueError as exc:
            raise LogFormatError(str(exc), line=line) from exc
    positions = np.array([(point.x_r, point.y_r) for point in points], dtype=float)
    if len(points) < 2:
        raise LogFormatError("trajectory needs at least two distinct waypoints")
    if closed:
        positions = np.vstack([positions, positions[:1]])
    segments = np.hypot(*np.diff(positions, axis=0).T)
    if segments.mean() <= 0.0:
        raise LogFormatError("trajectory needs at least two distinct waypoints")
    if spacing is None or not math.isfinite(spacing) or spacing <= 0.0:
        spacing = float(segments.mean())
    return Trajectory(points=tuple(points), spacing=spacing, closed=closed)


# ---------------------------------------------------------------------------
# Batch summary
# ---------------------------------------------------------------------------

def _stat_cells(stats: ErrorStats | None) -> list[str]:
    if stats is None:
        return ["", ""]
    return [_fmt(stats.max_error), _fmt(stats.avg_error)]


def summary_rows(result: BatchResult) -> Iterable[list[str]]:
    for run in result.runs:
        metrics = run.metrics
        cells = [str(run.index), str(run.seed), "true" if run.valid else "false"]
        cells += _stat_cells(metrics.measurement if metrics else None)
        cells += _stat_cells(metrics.estimate if metrics else None)
        cells += _stat_cells(metrics.tracking if metrics else None)
        cells.append(run.error or "")
        yield cells


def write_batch_summary(result: BatchResult, path: str | Path) -> Path:
    """Per-run metrics followed by a win-count footer comment."""
    path = Path(path)
    with atomic_output(path, newline="", encoding="utf-8") as handle:
        handle.write(SCHEMA_LINE + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows(summary_rows(result))
        handle.write(
            f"# ekf_avg_wins={result.ekf_avg_wins}/{len(result.runs)} ekf_max_wins={result.ekf_max_wins}/{len(result.runs)}\n"
        )
    return path
