from .models import (
    BatchResult,
    BatchRun,
    ErrorStats,
    LogRow,
    RunLog,
    RunMetrics,
    Scenario,
    TrajectorySpec,
)
from .trajectories import (
    build_trajectory,
    generate_circle,
    generate_sinusoid,
    path_length,
    three_point_curvature,
)
from .metrics import compute_metrics, point_to_polyline_distance
from .run_log import (
    LOG_COLUMNS,
    LoggedRun,
    read_run_log,
    read_trajectory_csv,
    write_batch_summary,
    write_run_log,
    write_trajectory_csv,
)
from .runner import run_scenario, scenario_duration
from .batch import aggregate, run_batch, run_batch_async

__all__ = [
    "BatchResult",
    "BatchRun",
    "ErrorStats",
    "LOG_COLUMNS",
    "LogRow",
    "LoggedRun",
    "RunLog",
    "RunMetrics",
    "Scenario",
    "TrajectorySpec",
    "aggregate",
    "build_trajectory",
    "compute_metrics",
    "generate_circle",
    "generate_sinusoid",
    "path_length",
    "point_to_polyline_distance",
    "read_run_log",
    "read_trajectory_csv",
    "run_batch",
    "run_batch_async",
    "run_scenario",
    "scenario_duration",
    "three_point_curvature",
    "write_batch_summary",
    "write_run_log",
    "write_trajectory_csv",
]
