"""Exhaustive enumeration of small offloading problems.

Used to cross-check branch-and-bound optimality and bound admissibility.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.mobility.channel import ChannelParams, shannon_rate
from src.latency_model import SubtaskSpec
from src.optimizer.branch_and_bound import branch_and_bound
from src.optimizer.decisions import (
    CandidateTask,
    DecisionSet,
    LinkEstimate,
    OffloadProblem,
    feasible,
)
from src.rng import stream

logger = logging.getLogger(__name__)

Assignment = List[Tuple[Optional[str], float]]


def _unit_options(problem: OffloadProblem) -> List[List[Tuple[Optional[str], int]]]:
    lists = []
    for task in problem.tasks:
        options: List[Tuple[Optional[str], int]] = [(None, 0)]
        for server in sorted(task.links):
            units = problem.units(server, problem.remaining[server])
            options.extend((server, k) for k in range(1, units + 1))
        lists.append(options)
    return lists


def feasible_assignments(problem: OffloadProblem) -> Iterator[Assignment]:
    """Every capacity-respecting assignment, in branch-and-bound visit order."""
    budget = {s: problem.units(s, r) for s, r in problem.remaining.items()}
    for combo in itertools.product(*_unit_options(problem)):
        used: Dict[str, int] = {}
        for server, units in combo:
            if server is not None:
                used[server] = used.get(server, 0) + units
        if all(units <= budget[s] for s, units in used.items()):
            yield [
                (server, units * problem.quanta[server]) if server is not None else (None, 0.0)
                for server, units in combo
            ]


def _objective_sum(problem: OffloadProblem, assignment: Assignment) -> float:
    total = 0.0
    for task, (server, allocation) in zip(problem.tasks, assignment):
        total += task.reduction_rate(server, allocation)
    return total


def brute_force(problem: OffloadProblem) -> DecisionSet:
    """Minimum average reduction rate by full enumeration; first optimum wins."""
    best_total = None
    best: Optional[Assignment] = None
    for assignment in feasible_assignments(problem):
        total = _objective_sum(problem, assignment)
        if best_total is None or total < best_total:
            best_total, best = total, assignment
    return problem.to_decisions(best)


def random_instance(
    rng: np.random.Generator,
    max_tasks: int = 3,
    max_servers: int = 3,
    max_units: int = 4,
    params: ChannelParams = ChannelParams(),
) -> OffloadProblem:
    """A small random problem whose spare capacities are whole quanta."""
    server_count = int(rng.integers(1, max_servers + 1))
    servers = [f"M-R{i:02d}" for i in range(server_count)]
    quanta = {s: float(rng.uniform(8e9, 12e9)) / 4 for s in servers}
    remaining = {s: int(rng.integers(0, max_units + 1)) * quanta[s] for s in servers}

    tasks = []
    for i in range(int(rng.integers(1, max_tasks + 1))):
        sub = SubtaskSpec(
            workload=float(rng.uniform(1e9, 4e9)),
            input_bits=float(rng.uniform(1e6, 2e7)),
            lam=float(rng.uniform(0.0, 1.0)),
            lo_ratio=float(rng.uniform(0.2, 1.0)),
            eo_ratio=float(rng.uniform(0.1, 0.5)),
        )
        links = {}
        for server in servers:
            if rng.random() < 0.75:
                dist = float(rng.uniform(5.0, 500.0))
                links[server] = LinkEstimate(
                    distance_m=dist,
                    uplink_bps=shannon_rate(0.1, 1.0, dist, params),
                    downlink_bps=shannon_rate(0.01, 1.0, dist, params),
                )
        tasks.append(
            CandidateTask(
                task_id=f"V{i:03d}/T000",
                sub=sub,
                local_capacity=float(rng.uniform(5e8, 1e9)),
                links=links,
            )
        )
    return OffloadProblem(tasks, remaining, quanta)


@dataclass
class OracleReport:
    checked: int = 0
    mismatches: List[Tuple[int, float, float]] = field(default_factory=list)
    infeasible: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.infeasible


def oracle_check(instances: int, seed: int) -> OracleReport:
    """Compare branch-and-bound with brute force on ``instances`` random problems.

    Args:
        instances: Number of random problems
        seed: Root seed; instance i uses the stream labelled ``oracle/<i>``

    Returns:
        Report listing objective mismatches and infeasible decision sets
    """
    report = OracleReport()
    for index in range(instances):
        problem = random_instance(stream(seed, f"oracle/{index}"))
        searched = branch_and_bound(problem)
        exact = brute_force(problem)
        report.checked += 1
        if searched.objective != exact.objective:
            logger.warning(
                "Instance %d: branch-and-bound %.12g != brute force %.12g",
                index, searched.objective, exact.objective,
            )
            report.mismatches.append((index, searched.objective, exact.objective))
        if not feasible(searched, problem.remaining):
            report.infeasible.append(index)
    logger.info(
        "Oracle: %d instances, %d mismatches, %d infeasible",
        report.checked, len(report.mismatches), len(report.infeasible),
    )
    return report
