"""Depth-first branch-and-bound over server choice and progressive allocation.

Each candidate task either stays local or takes k quanta (C, 2C, ...) on one
reachable server. Tasks are assigned in id order; options are tried local
first, then by server id, then by increasing allocation. The first optimum
found in that order is kept, which fixes the tie-break.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from src.errors import InvalidParameterError
from src.optimizer.decisions import DecisionSet, OffloadProblem, SearchStats

logger = logging.getLogger(__name__)

Assignment = Tuple[Optional[str], float]
OptionFn = Callable[[OffloadProblem, int, Dict[str, float]], Iterator[Assignment]]

# Relative margin that keeps float rounding from pruning a subtree whose true
# value equals the incumbent's
BOUND_MARGIN = 1e-9


@dataclass
class SearchNode:
    """A prefix of assigned tasks in the search tree.

    ``bound`` is filled in by ``lower_bound``.
    """

    assigned: List[Assignment] = field(default_factory=list)
    partial_objective: float = 0.0
    bound: float = 0.0


def quantized_options(
    problem: OffloadProblem, index: int, remaining: Dict[str, float]
) -> Iterator[Assignment]:
    """Local, then every (server, k * quantum) that fits, servers in id order."""
    yield (None, 0.0)
    task = problem.tasks[index]
    for server in sorted(task.links):
        quantum = problem.quanta[server]
        for units in range(1, problem.units(server, remaining[server]) + 1):
            yield (server, units * quantum)


def full_capacity_options(
    problem: OffloadProblem, index: int, remaining: Dict[str, float]
) -> Iterator[Assignment]:
    """Local, then each server with spare capacity taking all of it."""
    yield (None, 0.0)
    task = problem.tasks[index]
    for server in sorted(task.links):
        if remaining[server] > 0:
            yield (server, remaining[server])


def _optimistic_completion(
    problem: OffloadProblem, start: int, remaining: Dict[str, float]
) -> float:
    total = 0.0
    for task in problem.tasks[start:]:
        best = 1.0
        for server in task.links:
            if remaining[server] > 0 and task.sub.lam > 0:
                best = min(best, task.optimistic_rate(server, remaining[server]))
        total += best
    return total


def lower_bound(node: SearchNode, problem: OffloadProblem) -> float:
    """Optimistic objective sum of any feasible completion of ``node``.

    Each unassigned task contributes the smaller of 1 (stay local) and its
    reduction rate with the whole spare capacity of its best server and no
    transfer time.
    """
    remaining = dict(problem.remaining)
    for server, allocation in node.assigned:
        if server is not None:
            remaining[server] = max(remaining[server] - allocation, 0.0)
    node.bound = node.partial_objective + _optimistic_completion(
        problem, len(node.assigned), remaining
    )
    return node.bound


class _Search:
    def __init__(self, problem: OffloadProblem, options: OptionFn, prune: bool):
        self.problem = problem
        self.options = options
        self.prune = prune
        self.best_total = math.inf
        self.best: Optional[List[Assignment]] = None
        self.explored = 0
        self.pruned = 0

    def run(self) -> None:
        self._descend(SearchNode(), dict(self.problem.remaining))

    def _descend(self, node: SearchNode, remaining: Dict[str, float]) -> None:
        self.explored += 1
        tasks = self.problem.tasks
        index = len(node.assigned)

        if index == len(tasks):
            if node.partial_objective < self.best_total:
                self.best_total = node.partial_objective
                self.best = list(node.assigned)
            return

        if self.prune and self.best is not None:
            bound = lower_bound(node, self.problem)
            if bound - abs(bound) * BOUND_MARGIN >= self.best_total:
                self.pruned += 1
                return

        task = tasks[index]
        for server, allocation in list(self.options(self.problem, index, remaining)):
            child = SearchNode(
                assigned=[*node.assigned, (server, allocation)],
                partial_objective=node.partial_objective + task.reduction_rate(server, allocation),
            )
            if server is None:
                self._descend(child, remaining)
            else:
                before = remaining[server]
                remaining[server] = max(before - allocation, 0.0)
                self._descend(child, remaining)
                remaining[server] = before


def search(
    problem: OffloadProblem, options: OptionFn, prune: bool = True
) -> DecisionSet:
    """Exact minimum of the average reduction rate over ``options``."""
    if not problem.tasks:
        raise InvalidParameterError("branch-and-bound needs at least one candidate task")

    engine = _Search(problem, options, prune)
    engine.run()
    logger.debug(
        "Search over %d tasks: %d nodes explored, %d pruned, objective %.6f",
        len(problem.tasks),
        engine.explored,
        engine.pruned,
        engine.best_total / len(problem.tasks),
    )
    return problem.to_decisions(engine.best, SearchStats(engine.explored, engine.pruned))


def branch_and_bound(problem: OffloadProblem, prune: bool = True) -> DecisionSet:
    """Joint server selection and progressive (C, 2C, ...) allocation.

    Args:
        problem: Candidate tasks, spare capacities and per-server quanta
        prune: Disable to explore the whole tree (same result, more nodes)

    Returns:
        The feasible decision set with the lowest average reduction rate
    """
    return search(problem, quantized_options, prune)

