"""Shared test fixtures: seeded generators, small configs and hand-built problems."""

import pytest

from src.config import config_from_dict
from src.latency_model import SubtaskSpec
from src.optimizer.decisions import CandidateTask, LinkEstimate, OffloadProblem
from src.rng import stream


@pytest.fixture
def rng():
    """Seeded generator; every test gets a fresh stream."""
    return stream(1234, "tests")


@pytest.fixture
def small_config_dict():
    """Nested config for a scenario small enough to run in a unit test."""
    return {
        "scenario": {"road_length_m": 1000, "lanes": 2, "vehicle_count": 6},
        "tasks": {
            "subtask_count_range": [1, 3],
            "arrival_window_steps": 3,
        },
        "privacy": {"mwem_iterations": 5, "query_depth": 3},
        "optimizer": {"candidate_limit": 3, "max_servers_per_task": 3},
        "simulation": {"horizon_steps": 20, "max_drain_steps": 400, "seed": 3},
    }


@pytest.fixture
def small_config(small_config_dict):
    """Validated ScenarioConfig built from ``small_config_dict``."""
    return config_from_dict(small_config_dict)


@pytest.fixture
def make_subtask():
    """Factory fixture for subtask specs with hand-checkable defaults."""
    def _make_subtask(workload=1e9, input_bits=1e6, lam=0.5, lo_ratio=0.2, eo_ratio=0.5):
        return SubtaskSpec(workload, input_bits, lam, lo_ratio, eo_ratio)
    return _make_subtask


@pytest.fixture
def make_candidate(make_subtask):
    """Factory fixture for candidate tasks.

    ``links`` maps server id to ``(distance_m, uplink_bps, downlink_bps)``.
    """
    def _make_candidate(task_id="V000/T000", sub=None, local_capacity=1e8, links=None):
        return CandidateTask(
            task_id=task_id,
            sub=sub or make_subtask(),
            local_capacity=local_capacity,
            links={
                sid: LinkEstimate(*values) for sid, values in (links or {}).items()
            },
        )
    return _make_candidate


@pytest.fixture
def make_problem():
    """Factory fixture for problems with one quantum shared by every server."""
    def _make_problem(tasks, remaining, quantum):
        return OffloadProblem.with_uniform_quantum(tasks, remaining, quantum)
    return _make_problem


@pytest.fixture
def write_config(tmp_path):
    """Factory fixture writing YAML text to a temporary config file."""
    def _write_config(text, name="scenario.yaml"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write_config
