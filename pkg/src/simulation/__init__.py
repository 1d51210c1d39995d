# Simulation package exports
from .engine import Simulation, run
from .experiments import EXPERIMENT_KINDS, Cell, experiment_cells, run_experiment, summarize
from .metrics import (
    MetricsRecord,
    MetricsSeries,
    RateTracker,
    average_series,
    task_multiplier,
)
from .scenario import Scenario, TaskCatalog, generate_scenario, rsu_positions

__all__ = [
    "Simulation",
    "run",
    "EXPERIMENT_KINDS",
    "Cell",
    "experiment_cells",
    "run_experiment",
    "summarize",
    "MetricsRecord",
    "MetricsSeries",
    "RateTracker",
    "average_series",
    "task_multiplier",
    "Scenario",
    "TaskCatalog",
    "generate_scenario",
    "rsu_positions",
]
