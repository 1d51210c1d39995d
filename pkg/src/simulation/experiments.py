"""The three experiment harnesses: privacy modes, algorithms, privacy budgets."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import pandas as pd

from src.config import ScenarioConfig
from src.errors import InvalidParameterError
from src.simulation.engine import run
from src.simulation.metrics import MetricsSeries, average_series

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = (1, 2, 3)
EXPERIMENT_1_EPSILON = 5.0
EXPERIMENT_1_PRIVACY = ("none", "rr", "ldp")
EXPERIMENT_2_ALGORITHMS = ("rm", "cm", "bm", "bnb")
EXPERIMENT_3_EPSILONS = (1.0, 5.0, 10.0, 20.0)
EXPERIMENT_3_PRIVACY = ("rr", "ldp")


@dataclass(frozen=True)
class Cell:
    """One configuration of an experiment grid, before seeds are applied."""

    algorithm: str
    privacy: str
    epsilon: float

    def key(self) -> tuple:
        return (self.algorithm, self.privacy, self.epsilon)


def experiment_cells(kind: int, base_cfg: ScenarioConfig) -> List[Cell]:
    """Grid of (algorithm, privacy, epsilon) cells for experiment ``kind``.

    Raises:
        InvalidParameterError: If kind is not 1, 2 or 3
    """
    algorithm = base_cfg.optimizer.algorithm
    epsilon = base_cfg.privacy.epsilon
    if kind == 1:
        return [Cell(algorithm, mode, EXPERIMENT_1_EPSILON) for mode in EXPERIMENT_1_PRIVACY]
    if kind == 2:
        return [Cell(name, "ldp", epsilon) for name in EXPERIMENT_2_ALGORITHMS]
    if kind == 3:
        return [
            Cell(algorithm, mode, eps)
            for mode in EXPERIMENT_3_PRIVACY
            for eps in EXPERIMENT_3_EPSILONS
        ]
    raise InvalidParameterError(f"experiment kind must be one of {EXPERIMENT_KINDS}, got {kind}")


def _run_cell(job: tuple) -> MetricsSeries:
    cfg, kind = job
    return run(cfg, experiment=kind)


def sort_key(series: MetricsSeries) -> tuple:
    return (series.experiment, series.algorithm, series.privacy, series.epsilon, series.seed)


def run_experiment(
    kind: int,
    base_cfg: ScenarioConfig,
    seeds: Sequence[int],
    workers: int = 1,
) -> List[MetricsSeries]:
    """Run every cell of an experiment for every seed.

    Args:
        kind: 1 (privacy modes), 2 (decision algorithms) or 3 (privacy budgets)
        base_cfg: Configuration the cells are derived from
        seeds: Seeds each cell runs with
        workers: Worker processes; 1 runs in-process

    Returns:
        One MetricsSeries per (cell, seed), sorted by
        (experiment, algorithm, privacy, epsilon, seed)
    """
    cells = experiment_cells(kind, base_cfg)
    jobs = [
        (
            base_cfg.with_overrides(
                seed=seed, algorithm=c.algorithm, privacy=c.privacy, epsilon=c.epsilon
            ),
            kind,
        )
        for c in cells
        for seed in seeds
    ]
    logger.info(
        "Experiment %d: %d cells x %d seeds on %d worker(s)", kind, len(cells), len(seeds), workers
    )

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = []
        for index, job in enumerate(jobs, start=1):
            results.append(_run_cell(job))
            logger.info("Experiment %d: finished run %d/%d", kind, index, len(jobs))
    return sorted(results, key=sort_key)


def summarize(table: Sequence[MetricsSeries]) -> pd.DataFrame:
    """Seed-averaged final metrics per cell.

    Returns:
        DataFrame with columns experiment, algorithm, privacy, epsilon, seeds,
        avg_reduction_rate, completed_tasks, task_multiplier
    """
    groups = {}
    for series in table:
        key = (series.experiment, series.algorithm, series.privacy, series.epsilon)
        groups.setdefault(key, []).append(series)

    rows = []
    for key in sorted(groups):
        averaged = average_series(groups[key])
        last = averaged.iloc[-1] if len(averaged) else None
        rows.append(
            {
                "experiment": key[0],
                "algorithm": key[1],
                "privacy": key[2],
                "epsilon": key[3],
                "seeds": len(groups[key]),
                "avg_reduction_rate": None if last is None else last["avg_reduction_rate"],
                "completed_tasks": None if last is None else last["completed_tasks"],
                "task_multiplier": None if last is None else last["task_multiplier"],
            }
        )
    return pd.DataFrame(rows)
