"""Comparison algorithms: random (RM), nearest (CM) and bounded server choice (BM).

All three hand the chosen server its whole remaining capacity. Tasks are
processed in id order and see the capacity left by earlier tasks.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np

from src.optimizer.branch_and_bound import full_capacity_options, search
from src.optimizer.decisions import DecisionSet, OffloadProblem


def _greedy(problem: OffloadProblem, choose) -> DecisionSet:
    remaining: Dict[str, float] = dict(problem.remaining)
    assignment: List[Tuple[Optional[str], float]] = []
    for task in problem.tasks:
        usable = sorted(s for s in task.links if remaining[s] > 0)
        server = choose(task, usable) if usable else None
        if server is None:
            assignment.append((None, 0.0))
            continue
        assignment.append((server, remaining[server]))
        remaining[server] = 0.0
    return problem.to_decisions(assignment)


def rm_baseline(problem: OffloadProblem, rng: np.random.Generator) -> DecisionSet:
    """Uniformly random reachable server per task, all of its capacity."""
    return _greedy(problem, lambda task, usable: usable[int(rng.integers(len(usable)))])


def cm_baseline(problem: OffloadProblem) -> DecisionSet:
    """Nearest reachable server by reported distance; lower id on ties."""
    return _greedy(
        problem, lambda task, usable: min(usable, key=lambda s: (task.links[s].distance_m, s))
    )


def bm_baseline(problem: OffloadProblem, prune: bool = True) -> DecisionSet:
    """Branch-and-bound over the server choice only, full remaining capacity."""
    return search(problem, full_capacity_options, prune)
