from __future__ import annotations

import math

import numpy as np
import pytest

from harness import (
    LOG_COLUMNS,
    BatchRun,
    ErrorStats,
    RunLog,
    RunMetrics,
    aggregate,
    generate_circle,
    generate_sinusoid,
    read_run_log,
    read_trajectory_csv,
    run_scenario,
    write_batch_summary,
    write_run_log,
    write_trajectory_csv,
)
from navsim.navsim_error import LogFormatError

HEADER = ",".join(LOG_COLUMNS)


@pytest.fixture
def short_log(scenario_factory) -> RunLog:
    log, _ = run_scenario(scenario_factory(duration=1.0, rates={"gps_hz": 5.0}))
    return log


def test_run_log_round_trip(short_log, tmp_path):
    path = write_run_log(short_log, tmp_path / "run_log.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# schema=1"
    assert lines[1] == HEADER

    loaded = read_run_log(path)
    assert loaded.valid and loaded.error is None
    assert len(loaded) == len(short_log) == 10
    assert loaded.qp_status == ["none"] * 10
    assert np.array_equal(loaded.columns["truth_x"], short_log.truth_xy()[:, 0])
    assert np.array_equal(loaded.columns["tick"], np.arange(10.0))
    assert np.isnan(loaded.columns["meas_x"][1::2]).all()
    assert not np.isnan(loaded.columns["meas_x"][0::2]).any()
    assert loaded.xy("est").shape == (10, 2)


def test_missing_values_are_empty_cells(short_log, tmp_path):
    text = write_run_log(short_log, tmp_path / "run_log.csv").read_text(encoding="utf-8")
    second_row = text.splitlines()[3].split(",")
    assert second_row[LOG_COLUMNS.index("meas_x")] == ""
    assert second_row[LOG_COLUMNS.index("qp_objective")] == ""
    assert "nan" not in text


def test_invalid_log_is_flagged(short_log, tmp_path):
    short_log.valid = False
    short_log.error = "SingularInnovationError: innovation covariance, step 4"
    loaded = read_run_log(write_run_log(short_log, tmp_path / "run_log.csv"))
    assert not loaded.valid
    assert loaded.error == "SingularInnovationError: innovation covariance, step 4"
    assert len(loaded) == 10


@pytest.mark.parametrize(
    "content, line",
    [
        ("# schema=2\n" + HEADER + "\n", 1),
        ("# schema=1\ntick,t\n", 2),
        ("# schema=1\n" + HEADER + "\n" + ",".join(["0"] * 5) + "\n", 3),
        ("# schema=1\n" + HEADER + "\n" + ",".join(["0", "abc"] + ["0"] * 17 + ["none", "0", ""]) + "\n", 3),
        ("# schema=1\n", 2),
    ],
)
def test_malformed_logs_report_the_line(tmp_path, content, line):
    path = tmp_path / "broken.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(LogFormatError) as excinfo:
        read_run_log(path)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


def test_missing_log_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_run_log(tmp_path / "absent.csv")


def test_trajectory_csv_round_trip(params, tmp_path):
    circle = generate_circle(2.0, 1.0, 0.05, params)
    loaded = read_trajectory_csv(write_trajectory_csv(circle, tmp_path / "circle.csv"))
    assert loaded.closed
    assert np.array_equal(loaded.positions(), circle.positions())
    assert [p.theta_r for p in loaded.points] == pytest.approx([p.theta_r for p in circle.points], abs=1e-12)
    assert [p.u_r for p in loaded.points] == [p.u_r for p in circle.points]
    assert loaded.spacing == circle.spacing

    wave = generate_sinusoid(0.5, 6.0, 6.0, 1.0, 0.05, params)
    loaded = read_trajectory_csv(write_trajectory_csv(wave, tmp_path / "wave.csv"))
    assert not loaded.closed
    assert len(loaded) == len(wave)


def test_trajectory_without_spacing_line_uses_mean_chord(tmp_path):
    path = tmp_path / "square.csv"
    rows = ["0.0,0.0,0.0,1.0,0.5,0.0", "1.0,0.0,0.0,1.0,0.5,0.0", "1.0,1.0,0.0,1.0,0.5,0.0", "0.0,1.0,0.0,1.0,0.5,0.0"]
    header = "# schema=1\n# closed={closed}\nx_r,y_r,theta_r,v_r,alpha_r,delta_r\n"
    path.write_text(header.format(closed="true") + "\n".join(rows) + "\n", encoding="utf-8")
    assert read_trajectory_csv(path).spacing == pytest.approx(1.0)

    path.write_text(header.format(closed="false") + "\n".join(rows[:3]) + "\n", encoding="utf-8")
    loaded = read_trajectory_csv(path)
    assert not loaded.closed
    assert loaded.spacing == pytest.approx(1.0)


def test_single_waypoint_trajectory_is_rejected(params, tmp_path):
    circle = generate_circle(2.0, 1.0, 0.05, params)
    path = write_trajectory_csv(circle, tmp_path / "circle.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:5]) + "\n", encoding="utf-8")
    with pytest.raises(LogFormatError):
        read_trajectory_csv(path)


def _metrics(meas_avg: float, est_avg: float) -> RunMetrics:
    return RunMetrics(
        measurement=ErrorStats(max_error=2.0, avg_error=meas_avg, samples=10),
        estimate=ErrorStats(max_error=2.5, avg_error=est_avg, samples=10),
        tracking=ErrorStats(max_error=0.1, avg_error=0.05, samples=10),
    )


def test_batch_summary_footer(tmp_path):
    result = aggregate(
        [
            BatchRun(index=1, seed=2, metrics=_metrics(1.0, 1.2), valid=True),
            BatchRun(index=0, seed=1, metrics=_metrics(1.0, 0.5), valid=True),
            BatchRun(index=2, seed=3, metrics=None, valid=False, error="aborted"),
        ]
    )
    lines = write_batch_summary(result, tmp_path / "batch_summary.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# schema=1"
    assert lines[1].startswith("run,seed,valid")
    assert [line.split(",")[0] for line in lines[2:5]] == ["0", "1", "2"]
    assert lines[4].endswith(",,,,,,,aborted")
    assert lines[-1] == "# ekf_avg_wins=1/3 ekf_max_wins=0/3"
    assert result.means["estimate_avg"] == pytest.approx(0.85)
    assert not math.isnan(result.means["tracking_max"])
