"""Candidate-set expansion around a newly registered task."""

import logging
from typing import List, Mapping, Sequence

from src.errors import InvalidParameterError

logger = logging.getLogger(__name__)

# task id -> {reachable server id: distance in m}
Reach = Mapping[str, Mapping[str, float]]


def candidate_set(
    new_task_id: str,
    active_task_ids: Sequence[str],
    reach: Reach,
    m: int,
) -> List[str]:
    """Pick the tasks whose decisions are re-optimized with a new task.

    Active tasks qualify when they can reach at least one server the new task
    can reach. They are ranked by how close the new task is to the nearest
    shared server (ties by task id) and the first ``m - 1`` are kept.

    Args:
        new_task_id: Task that just became ready
        active_task_ids: Tasks currently holding or waiting for a decision
        reach: Reachable servers and their distances, per task id
        m: Maximum candidate-set size, new task included

    Returns:
        Candidate task ids sorted by id

    Raises:
        InvalidParameterError: If m < 1
    """
    if m < 1:
        raise InvalidParameterError(f"candidate limit m must be >= 1, got {m}")

    own = reach.get(new_task_id, {})
    ranked = []
    for task_id in active_task_ids:
        if task_id == new_task_id:
            continue
        shared = set(own) & set(reach.get(task_id, {}))
        if shared:
            ranked.append((min(own[s] for s in shared), task_id))

    ranked.sort()
    chosen = [task_id for _, task_id in ranked[: m - 1]]
    logger.debug(
        "Candidate set for %s: %d of %d overlapping tasks", new_task_id, len(chosen), len(ranked)
    )
    return sorted([new_task_id, *chosen])
