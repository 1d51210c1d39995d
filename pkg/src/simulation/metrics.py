"""Per-step run metrics: average reduction rate and task multiplier."""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import pandas as pd

from src.latency_model import average_reduction_rate


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    time_s: float
    avg_reduction_rate: Optional[float]
    completed_tasks: int
    completed_tasks_local_baseline: int
    task_multiplier: Optional[float]


@dataclass
class MetricsSeries:
    """Metrics of one (algorithm, privacy, epsilon, seed) run.

    ``avg_reduction_rate`` is None until a task completes; ``task_multiplier``
    is None while the all-local baseline has completed nothing.
    """

    algorithm: str
    privacy: str
    epsilon: float
    seed: int
    records: List[MetricsRecord] = field(default_factory=list)
    experiment: int = 0

    @property
    def final(self) -> Optional[MetricsRecord]:
        return self.records[-1] if self.records else None

    def to_frame(self) -> pd.DataFrame:
        """One row per step with the run labels as columns."""
        frame = pd.DataFrame(
            [
                {
                    "step": r.step,
                    "time_s": r.time_s,
                    "avg_reduction_rate": r.avg_reduction_rate,
                    "completed_tasks": r.completed_tasks,
                    "task_multiplier": r.task_multiplier,
                }
                for r in self.records
            ],
            columns=["step", "time_s", "avg_reduction_rate", "completed_tasks", "task_multiplier"],
        )
        frame.insert(0, "seed", self.seed)
        frame.insert(0, "epsilon", self.epsilon)
        frame.insert(0, "privacy", self.privacy)
        frame.insert(0, "algorithm", self.algorithm)
        frame.insert(0, "experiment", self.experiment)
        return frame


class RateTracker:
    """Reduction rates of completed tasks.

    With ``window_steps`` = 0 the average covers every task completed so far;
    otherwise only tasks completed in the last ``window_steps`` steps.
    """

    def __init__(self, window_steps: int = 0):
        self.window_steps = window_steps
        self._completions: List[tuple] = []

    def add(self, step: int, rate: float) -> None:
        self._completions.append((step, rate))

    @property
    def count(self) -> int:
        return len(self._completions)

    def average(self, step: int) -> Optional[float]:
        if self.window_steps:
            rates = [r for s, r in self._completions if s > step - self.window_steps]
        else:
            rates = [r for _, r in self._completions]
        return average_reduction_rate(rates)


def multiplier(completed: int, baseline_completed: int) -> Optional[float]:
    if baseline_completed <= 0:
        return None
    return completed / baseline_completed


def task_multiplier(series: MetricsSeries) -> Optional[float]:
    """Completed tasks over all-local completed tasks at the end of the run.

    Returns:
        The ratio, or None when the baseline completed nothing
    """
    final = series.final
    if final is None:
        return None
    return multiplier(final.completed_tasks, final.completed_tasks_local_baseline)


def average_series(series: Sequence[MetricsSeries]) -> pd.DataFrame:
    """Average several runs step by step.

    Shorter runs are extended with their last record, so a run that drained
    early keeps contributing its final values. Missing (None) values are
    skipped in the mean.

    Returns:
        DataFrame indexed by step with columns ``avg_reduction_rate``,
        ``completed_tasks`` and ``task_multiplier``
    """
    columns = ["avg_reduction_rate", "completed_tasks", "task_multiplier"]
    frames = [s.to_frame().set_index("step")[columns].astype(float) for s in series if s.records]
    if not frames:
        return pd.DataFrame(columns=columns, index=pd.Index([], name="step"))

    steps = sorted(set().union(*(f.index for f in frames)))
    aligned = []
    for frame in frames:
        extended = frame.reindex(steps)
        tail = extended.index > frame.index.max()
        extended.loc[tail] = extended.ffill().loc[tail]
        aligned.append(extended)
    stacked = pd.concat(aligned, keys=range(len(aligned)))
    averaged = stacked.groupby(level=1).mean()
    averaged.index.name = "step"
    return averaged
