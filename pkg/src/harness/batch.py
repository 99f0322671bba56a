"""Seeded replicates of one scenario.

Replicates differ only in their sensor seeds, run on worker threads and are
merged by index, so the result does not depend on completion order.
"""

from __future__ import annotations

import asyncio

import numpy as np

from controller import Trajectory
from navsim.navsim_error import NavSimError
from utils import get_logger

from .models import BatchResult, BatchRun, RunMetrics, Scenario
from .runner import run_scenario
from .trajectories import build_trajectory

logger = get_logger(__name__)

DEFAULT_WORKERS = 4


def _means(runs: list[BatchRun]) -> dict[str, float]:
    means: dict[str, float] = {}
    for source in ("measurement", "estimate", "tracking"):
        stats = [getattr(run.metrics, source) for run in runs if run.metrics is not None]
        stats = [item for item in stats if item is not None]
        if stats:
            means[f"{source}_max"] = float(np.mean([item.max_error for item in stats]))
            means[f"{source}_avg"] = float(np.mean([item.avg_error for item in stats]))
    return means


def aggregate(runs: list[BatchRun]) -> BatchResult:
    ordered = sorted(runs, key=lambda run: run.index)
    return BatchResult(
        runs=tuple(ordered),
        ekf_avg_wins=sum(run.ekf_wins_avg for run in ordered),
        ekf_max_wins=sum(run.ekf_wins_max for run in ordered),
        means=_means(ordered),
    )


async def run_batch_async(
    scenario: Scenario,
    n_runs: int,
    seed_stride: int = 1,
    base_seed: int | None = None,
    max_workers: int = DEFAULT_WORKERS,
    trajectory: Trajectory | None = None,
) -> BatchResult:
    """Run ``n_runs`` replicates with seeds ``base_seed + i * seed_stride``.

    A failing replicate is recorded with its error and does not stop the batch.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    if max_workers < 1:
        raise ValueError(f"max_workers must be >= 1, got {max_workers}")
    base = scenario.seed if base_seed is None else base_seed
    trajectory = trajectory if trajectory is not None else build_trajectory(scenario.trajectory, scenario.vehicle)
    semaphore = asyncio.Semaphore(max_workers)

    async def _replicate(index: int) -> BatchRun:
        seed = base + index * seed_stride
        async with semaphore:
            try:
                log, metrics = await asyncio.to_thread(run_scenario, scenario.with_seed(seed), trajectory)
            except NavSimError as exc:
                logger.error("Batch replicate failed", extra={"run": index, "seed": seed, "error": str(exc)})
                return BatchRun(index=index, seed=seed, metrics=None, valid=False, error=str(exc))
        metrics = metrics if any((metrics.measurement, metrics.estimate, metrics.tracking)) else None
        return BatchRun(index=index, seed=seed, metrics=metrics, valid=log.valid, error=log.error)

    runs = await asyncio.gather(*(_replicate(index) for index in range(n_runs)))
    result = aggregate(list(runs))
    logger.info(
        "Batch finished",
        extra={
            "scenario": scenario.name,
            "runs": n_runs,
            "completed": result.completed,
            "ekf_avg_wins": result.ekf_avg_wins,
            "ekf_max_wins": result.ekf_max_wins,
        },
    )
    return result


def run_batch(
    scenario: Scenario,
    n_runs: int,
    seed_stride: int = 1,
    base_seed: int | None = None,
    max_workers: int = DEFAULT_WORKERS,
) -> BatchResult:
    """Synchronous wrapper around :func:`run_batch_async`."""
    return asyncio.run(run_batch_async(scenario, n_runs, seed_stride, base_seed, max_workers))
