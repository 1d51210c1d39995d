"""Four-part subtask delay and the reduction-rate objective.

Units: workloads in cycles, capacities and allocations in cycles/s, data in
bits, rates in bit/s, delays in seconds.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

from src.errors import InvalidAllocationError, InvalidParameterError, InvalidRateError


@dataclass(frozen=True)
class SubtaskSpec:
    """One sequential piece of a task.

    Attributes:
        workload: Total cycles W
        input_bits: Input size I
        lam: Fraction of the workload executed on the edge server
        lo_ratio: Output/input ratio of the local part (sizes the uplink)
        eo_ratio: Output/input ratio of the server part (sizes the downlink)
    """

    workload: float
    input_bits: float
    lam: float
    lo_ratio: float
    eo_ratio: float

    def __post_init__(self):
        if not self.workload > 0:
            raise InvalidParameterError(f"workload must be > 0, got {self.workload}")
        if not self.input_bits > 0:
            raise InvalidParameterError(f"input_bits must be > 0, got {self.input_bits}")
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidParameterError(f"lambda must be in [0, 1], got {self.lam}")
        if self.lo_ratio < 0 or self.eo_ratio < 0:
            raise InvalidParameterError("LO and EO ratios must be >= 0")


@dataclass(frozen=True)
class TaskSpec:
    """A task of strictly ordered subtasks owned by one vehicle."""

    id: str
    owner: str
    subtasks: tuple
    arrival_step: int = 0

    def __post_init__(self):
        if not self.subtasks:
            raise InvalidParameterError(f"task {self.id} has no subtasks")
        object.__setattr__(self, "subtasks", tuple(self.subtasks))

    @property
    def workload(self) -> float:
        return sum(s.workload for s in self.subtasks)


@dataclass(frozen=True)
class DelayBreakdown:
    edge_exec_s: float
    local_exec_s: float
    uplink_s: float
    downlink_s: float

    @property
    def total_s(self) -> float:
        return self.edge_exec_s + self.local_exec_s + self.uplink_s + self.downlink_s


def edge_exec_delay(sub: SubtaskSpec, allocation: float) -> float:
    """W * lambda / a; zero when nothing is offloaded."""
    if sub.lam == 0:
        return 0.0
    if not allocation > 0:
        raise InvalidAllocationError(
            f"offloaded work (lambda={sub.lam}) needs a positive allocation, got {allocation}"
        )
    return sub.workload * sub.lam / allocation


def local_exec_delay(sub: SubtaskSpec, local_capacity: float) -> float:
    """W * (1 - lambda) / C."""
    if not local_capacity > 0:
        raise InvalidParameterError(f"local capacity must be > 0, got {local_capacity}")
    return sub.workload * (1.0 - sub.lam) / local_capacity


def _check_rate(sub: SubtaskSpec, rate: float) -> bool:
    if sub.lam == 0:
        return False
    if not rate > 0:
        raise InvalidRateError(
            f"offloaded work (lambda={sub.lam}) needs a positive rate, got {rate}"
        )
    return True


def uplink_delay(sub: SubtaskSpec, rate: float) -> float:
    """I * LO / R; zero when nothing is offloaded."""
    if not _check_rate(sub, rate):
        return 0.0
    return sub.input_bits * sub.lo_ratio / rate


def downlink_delay(sub: SubtaskSpec, rate: float) -> float:
    """I * LO * EO / R; zero when nothing is offloaded."""
    if not _check_rate(sub, rate):
        return 0.0
    return sub.input_bits * sub.lo_ratio * sub.eo_ratio / rate


def subtask_delay(
    sub: SubtaskSpec,
    offloaded: bool,
    allocation: float,
    local_capacity: float,
    uplink_rate: float,
    downlink_rate: float,
) -> DelayBreakdown:
    """Delay of one subtask; a non-offloaded subtask runs entirely locally."""
    if not offloaded:
        return DelayBreakdown(
            edge_exec_s=0.0,
            local_exec_s=sub.workload / _positive_capacity(local_capacity),
            uplink_s=0.0,
            downlink_s=0.0,
        )
    return DelayBreakdown(
        edge_exec_s=edge_exec_delay(sub, allocation),
        local_exec_s=local_exec_delay(sub, local_capacity),
        uplink_s=uplink_delay(sub, uplink_rate),
        downlink_s=downlink_delay(sub, downlink_rate),
    )


def total_task_delay(
    sub: SubtaskSpec,
    decision,
    local_capacity: float,
    uplink_rate: float,
    downlink_rate: float,
) -> DelayBreakdown:
    """Delay breakdown of ``sub`` under an offload decision.

    Args:
        sub: Subtask being executed
        decision: Object with ``server`` (None for no offload) and ``allocation``
        local_capacity: Owner vehicle's compute capacity
        uplink_rate: Owner-to-server rate in bit/s
        downlink_rate: Server-to-owner rate in bit/s
    """
    return subtask_delay(
        sub,
        decision.server is not None,
        decision.allocation,
        local_capacity,
        uplink_rate,
        downlink_rate,
    )


def _positive_capacity(local_capacity: float) -> float:
    if not local_capacity > 0:
        raise InvalidParameterError(f"local capacity must be > 0, got {local_capacity}")
    return local_capacity


def reduction_rate(delay_s: float, workload: float, local_capacity: float) -> float:
    """De * C / W: 1 means no gain over running locally, below 1 is a speed-up.

    Evaluated as De / (W / C) so that a purely local delay gives exactly 1.
    """
    if not workload > 0:
        raise InvalidParameterError(f"workload must be > 0, got {workload}")
    if not local_capacity > 0:
        raise InvalidParameterError(f"local capacity must be > 0, got {local_capacity}")
    if delay_s < 0:
        raise InvalidParameterError(f"delay must be >= 0, got {delay_s}")
    return delay_s / (workload / local_capacity)


def average_reduction_rate(rates: Sequence[float]) -> Optional[float]:
    """Arithmetic mean, or None when there is nothing to average."""
    if not rates:
        return None
    return sum(rates) / len(rates)
