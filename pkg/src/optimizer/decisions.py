"""Decision types, the discretized offloading problem, and feasibility checks."""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.errors import InvalidParameterError
from src.latency_model import (
    SubtaskSpec,
    edge_exec_delay,
    local_exec_delay,
    reduction_rate,
    subtask_delay,
)
from src.mobility.entities import CAPACITY_TOLERANCE

# Slack when converting a remaining capacity into whole quanta
QUANTUM_SLACK = 1e-9


@dataclass(frozen=True)
class OffloadDecision:
    """Server choice and allocation for one task at one step.

    ``server`` is None when the task runs locally; the allocation is then 0.
    """

    task_id: str
    server: Optional[str]
    allocation: float
    step: int

    def __post_init__(self):
        if self.server is None and self.allocation != 0:
            raise InvalidParameterError(
                f"task {self.task_id}: local decision cannot carry an allocation"
            )
        if self.server is not None and not self.allocation > 0:
            raise InvalidParameterError(
                f"task {self.task_id}: offload to {self.server} needs a positive allocation"
            )

    @property
    def offloaded(self) -> bool:
        return self.server is not None


@dataclass
class SearchStats:
    explored_nodes: int = 0
    pruned_nodes: int = 0


@dataclass
class DecisionSet:
    """Decisions for a candidate set and their average reduction rate."""

    decisions: List[OffloadDecision]
    objective: float
    stats: SearchStats = field(default_factory=SearchStats)

    def for_task(self, task_id: str) -> OffloadDecision:
        for decision in self.decisions:
            if decision.task_id == task_id:
                return decision
        raise KeyError(task_id)


@dataclass(frozen=True)
class LinkEstimate:
    """Decision-center estimate of a task-owner/server link."""

    distance_m: float
    uplink_bps: float
    downlink_bps: float


@dataclass(frozen=True)
class CandidateTask:
    """One task as the optimizer sees it: the subtask to place and its links.

    ``links`` maps each reachable server id to the estimated link quality.
    """

    task_id: str
    sub: SubtaskSpec
    local_capacity: float
    links: Mapping[str, LinkEstimate] = field(default_factory=dict)

    def reduction_rate(self, server: Optional[str], allocation: float) -> float:
        if server is None:
            delay = subtask_delay(self.sub, False, 0.0, self.local_capacity, 0.0, 0.0)
        else:
            link = self.links[server]
            delay = subtask_delay(
                self.sub, True, allocation, self.local_capacity,
                link.uplink_bps, link.downlink_bps,
            )
        return reduction_rate(delay.total_s, self.sub.workload, self.local_capacity)

    def optimistic_rate(self, server: str, allocation: float) -> float:
        """Reduction rate with ``allocation`` on ``server`` and free transfers."""
        delay = edge_exec_delay(self.sub, allocation) + local_exec_delay(
            self.sub, self.local_capacity
        )
        return reduction_rate(delay, self.sub.workload, self.local_capacity)


@dataclass
class OffloadProblem:
    """Joint server selection and allocation over a candidate set.

    Attributes:
        tasks: Candidate tasks, ordered by task id
        remaining: Capacity each server can still hand out (cycles/s)
        quanta: Allocation step per server (cycles/s)
        step: Time step the decisions apply to
    """

    tasks: List[CandidateTask]
    remaining: Dict[str, float]
    quanta: Dict[str, float]
    step: int = 0

    def __post_init__(self):
        self.tasks = sorted(self.tasks, key=lambda t: t.task_id)
        for server, quantum in self.quanta.items():
            if not quantum > 0:
                raise InvalidParameterError(
                    f"resource quantum for {server} must be positive, got {quantum}"
                )
        for task in self.tasks:
            unknown = set(task.links) - set(self.remaining)
            if unknown:
                raise InvalidParameterError(
                    f"task {task.task_id} links to unknown servers {sorted(unknown)}"
                )

    @classmethod
    def with_uniform_quantum(
        cls,
        tasks: Sequence[CandidateTask],
        remaining: Dict[str, float],
        quantum: float,
        step: int = 0,
    ) -> "OffloadProblem":
        if not quantum > 0:
            raise InvalidParameterError(f"resource quantum must be positive, got {quantum}")
        return cls(list(tasks), dict(remaining), {s: quantum for s in remaining}, step)

    def units(self, server: str, remaining: float) -> int:
        """Whole quanta that fit into ``remaining`` on ``server``."""
        return max(int(math.floor(remaining / self.quanta[server] + QUANTUM_SLACK)), 0)

    def objective(self, assignment: Sequence[Tuple[Optional[str], float]]) -> float:
        """Average reduction rate of an assignment given in task order."""
        total = 0.0
        for task, (server, allocation) in zip(self.tasks, assignment):
            total += task.reduction_rate(server, allocation)
        return total / len(self.tasks)

    def to_decisions(
        self,
        assignment: Sequence[Tuple[Optional[str], float]],
        stats: Optional[SearchStats] = None,
    ) -> DecisionSet:
        decisions = [
            OffloadDecision(
                task.task_id, server, allocation if server is not None else 0.0, self.step
            )
            for task, (server, allocation) in zip(self.tasks, assignment)
        ]
        return DecisionSet(decisions, self.objective(assignment), stats or SearchStats())


def feasible(decision_set: DecisionSet, capacities: Mapping[str, float]) -> bool:
    """Check the per-server capacity and single-server constraints.

    Args:
        decision_set: Decisions to check
        capacities: Capacity available to these decisions, per server id

    Returns:
        True iff every task appears at most once, every server exists, and
        the allocations on each server sum to at most its capacity
    """
    seen = set()
    load: Dict[str, float] = defaultdict(float)
    for decision in decision_set.decisions:
        if decision.task_id in seen:
            return False
        seen.add(decision.task_id)
        if decision.server is None:
            continue
        if decision.server not in capacities or not decision.allocation > 0:
            return False
        load[decision.server] += decision.allocation

    return all(
        total <= capacities[server] * (1 + CAPACITY_TOLERANCE)
        for server, total in load.items()
    )
