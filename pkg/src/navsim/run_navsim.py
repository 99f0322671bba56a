from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from harness import (
    BatchResult,
    ErrorStats,
    RunMetrics,
    read_run_log,
    read_trajectory_csv,
    run_batch_async,
    run_scenario,
    write_batch_summary,
    write_run_log,
    write_trajectory_csv,
)
from utils import atomic_output, configure_logging, get_logger

from .config import ConfigOverrides, NavSimConfig, load_config, load_trajectory
from .navsim_error import ConfigError, NavSimError
from .plotting import plot_run

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

RUN_LOG_NAME = "run_log.csv"
TRAJECTORY_NAME = "trajectory.csv"
METRICS_NAME = "metrics.json"
PLOT_NAME = "trajectory.svg"
SUMMARY_NAME = "batch_summary.csv"


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------

def _stats_payload(stats: ErrorStats | None) -> dict[str, Any] | None:
    if stats is None:
        return None
    return {"max_error": stats.max_error, "avg_error": stats.avg_error, "samples": stats.samples}


def _metrics_payload(metrics: RunMetrics) -> dict[str, Any]:
    return {
        "measurement": _stats_payload(metrics.measurement),
        "estimate": _stats_payload(metrics.estimate),
        "tracking": _stats_payload(metrics.tracking),
    }


def _cell(stats: ErrorStats | None, attribute: str) -> str:
    return f"{getattr(stats, attribute):10.3f}" if stats is not None else f"{'-':>10}"


def format_metrics_table(metrics: RunMetrics) -> str:
    """One line per error source with max and average error in meters."""
    lines = [f"{'source':<12}{'max (m)':>10}{'avg (m)':>10}{'samples':>9}"]
    for label, stats in (("MEAS", metrics.measurement), ("EKF", metrics.estimate), ("TRACK", metrics.tracking)):
        samples = f"{stats.samples:9d}" if stats is not None else f"{'-':>9}"
        lines.append(f"{label:<12}{_cell(stats, 'max_error')}{_cell(stats, 'avg_error')}{samples}")
    return "\n".join(lines)


def format_batch_table(result: BatchResult) -> str:
    """Per-run EKF and measurement errors with the win-count footer."""
    header = f"{'run':>4}{'seed':>8}{'MEAS max':>10}{'MEAS avg':>10}{'EKF max':>10}{'EKF avg':>10}"
    lines = [header, "-" * len(header)]
    for run in result.runs:
        metrics = run.metrics
        prefix = f"{run.index + 1:>4}{run.seed:>8}"
        if metrics is None:
            lines.append(f"{prefix}  failed: {run.error or 'no samples'}")
            continue
        lines.append(
            prefix
            + _cell(metrics.measurement, "max_error")
            + _cell(metrics.measurement, "avg_error")
            + _cell(metrics.estimate, "max_error")
            + _cell(metrics.estimate, "avg_error")
        )
    total = len(result.runs)
    lines.append("-" * len(header))
    lines.append(f"EKF better max error: {result.ekf_max_wins}/{total}   EKF better avg error: {result.ekf_avg_wins}/{total}")
    return "\n".join(lines)


def _write_metrics(config: NavSimConfig, metrics: RunMetrics, valid: bool, error: str | None, path: Path) -> Path:
    payload = {
        "scenario": config.scenario.name,
        "mode": config.scenario.mode,
        "seed": config.scenario.seed,
        "valid": valid,
        "error": error,
        "metrics": _metrics_payload(metrics),
    }
    with atomic_output(path, encoding="utf-8") as handle:
        handle.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _overrides(args: argparse.Namespace) -> ConfigOverrides:
    return ConfigOverrides(
        seed=args.seed,
        duration=args.duration,
        gps_rate=args.gps_rate,
        output_dir=Path(args.output_dir) if args.output_dir else None,
    )


def cmd_run(args: argparse.Namespace) -> int:
    """Simulate one scenario and write log, reference, metrics and plot."""
    config = load_config(args.config, _overrides(args))
    scenario = config.scenario
    trajectory = load_trajectory(config)
    log, metrics = run_scenario(scenario, trajectory)

    output_dir = config.output_dir
    write_run_log(log, output_dir / RUN_LOG_NAME)
    write_trajectory_csv(trajectory, output_dir / TRAJECTORY_NAME)
    _write_metrics(config, metrics, log.valid, log.error, output_dir / METRICS_NAME)
    plot_enabled = config.plot and not args.no_plot
    if plot_enabled and len(log):
        plot_run(read_run_log(output_dir / RUN_LOG_NAME), trajectory, output_dir / PLOT_NAME, title=scenario.name)

    print(f"scenario {scenario.name} ({scenario.mode}), seed {scenario.seed}, {len(log)} ticks")
    print(format_metrics_table(metrics))
    if not log.valid:
        print(f"run aborted: {log.error}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    """Run seeded replicates and print the per-run error table."""
    config = load_config(args.config, _overrides(args))
    runs = args.runs if args.runs is not None else config.batch.runs
    workers = args.workers if args.workers is not None else config.batch.max_workers
    if runs < 1 or workers < 1:
        raise ConfigError("--runs and --workers must be >= 1")
    trajectory = load_trajectory(config)
    result = asyncio.run(
        run_batch_async(
            config.scenario,
            runs,
            seed_stride=config.batch.seed_stride,
            base_seed=config.scenario.seed,
            max_workers=workers,
            trajectory=trajectory,
        )
    )
    write_batch_summary(result, config.output_dir / SUMMARY_NAME)
    print(format_batch_table(result))
    if result.completed == 0:
        print("no replicate produced metrics", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    """Render an existing log and reference trajectory to SVG."""
    run = read_run_log(args.log)
    trajectory = read_trajectory_csv(args.trajectory)
    plot_run(run, trajectory, args.out)
    print(f"plot written to {args.out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Load and validate a config without simulating."""
    config = load_config(args.config, _overrides(args))
    scenario = config.scenario
    trajectory = load_trajectory(config)
    print(
        f"config OK: scenario {scenario.name} ({scenario.mode}), "
        f"{len(trajectory)} waypoints, output_dir {config.output_dir}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "config",
        nargs="?",
        default=None,
        help="Scenario config JSON. Omit to use the packaged defaults.",
    )
    parser.add_argument("--seed", type=int, default=None, help="Override scenario.seed (batch: base seed)")
    parser.add_argument("--duration", type=float, default=None, help="Override scenario.duration in seconds")
    parser.add_argument("--gps-rate", type=float, default=None, help="Override scenario.rates.gps_hz")
    parser.add_argument("--output-dir", type=str, default=None, help="Override output_dir")


def _build_parser() -> argparse.ArgumentParser:
    """Build and return the CLI argument parser."""
    parser = argparse.ArgumentParser(prog="navsim", description="GPS/EKF/MPC closed-loop navigation simulator")
    parser.add_argument("--log-level", type=str, default=None, help="Logging level (default: NAVSIM_LOG_LEVEL or INFO)")
    parser.add_argument("--log-file", type=str, default=None, help="Optional rotating log file path")
    parser.add_argument("--log-json", action="store_true", help="Emit JSON log records")
    parser.add_argument("--no-log-console", action="store_true", help="Disable console logging")

    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Simulate one scenario")
    _add_config_arguments(run_parser)
    run_parser.add_argument("--no-plot", action="store_true", help="Skip the SVG plot even if the config enables it")
    run_parser.set_defaults(handler=cmd_run)

    batch_parser = commands.add_parser("batch", help="Run seeded replicates of one scenario")
    _add_config_arguments(batch_parser)
    batch_parser.add_argument("-n", "--runs", type=int, default=None, help="Number of replicates (default: batch.runs)")
    batch_parser.add_argument("--workers", type=int, default=None, help="Concurrent replicates (default: batch.max_workers)")
    batch_parser.set_defaults(handler=cmd_batch)

    plot_parser = commands.add_parser("plot", help="Render a run log to SVG")
    plot_parser.add_argument("log", help="Run log CSV")
    plot_parser.add_argument("trajectory", help="Reference trajectory CSV")
    plot_parser.add_argument("out", help="Output SVG path")
    plot_parser.set_defaults(handler=cmd_plot)

    validate_parser = commands.add_parser("validate", help="Check a config file without simulating")
    _add_config_arguments(validate_parser)
    validate_parser.set_defaults(handler=cmd_validate)
    return parser


def main(args: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        parsed = parser.parse_args(args)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the CLI contract reserves 2 for runtime failures
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    configure_logging(
        level=parsed.log_level,
        json_output=True if parsed.log_json else None,
        log_file=parsed.log_file,
        console=False if parsed.no_log_console else None,
        force=True,
    )

    try:
        return parsed.handler(parsed)
    except (ConfigError, FileNotFoundError) as exc:
        logger.error("Configuration error", extra={"command": parsed.command, "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NavSimError, OSError, np.linalg.LinAlgError) as exc:
        logger.error("Command failed", extra={"command": parsed.command, "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
