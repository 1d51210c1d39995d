"""Vehicles, roadside units and the edge servers they host."""

import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Union

from src.errors import EntityNotFoundError, InvalidParameterError, InvariantViolationError

logger = logging.getLogger(__name__)

# Relative slack when comparing summed allocations against a capacity
CAPACITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Position:
    """Point in road coordinates: x along the road, y lateral, z height (m)."""

    x: float
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise InvalidParameterError(f"non-finite coordinate in {self}")


def distance(a: Position, b: Position) -> float:
    """Euclidean distance in 3-D."""
    return math.dist((a.x, a.y, a.z), (b.x, b.y, b.z))


@dataclass(frozen=True)
class VehicleState:
    """A connected vehicle moving at constant speed along +x."""

    id: str
    position: Position
    speed: float
    compute_capacity: float
    transmit_power: float

    def __post_init__(self):
        if self.speed < 0:
            raise InvalidParameterError(f"{self.id}: speed must be >= 0")
        if not self.compute_capacity > 0:
            raise InvalidParameterError(f"{self.id}: compute capacity must be > 0")
        if not self.transmit_power > 0:
            raise InvalidParameterError(f"{self.id}: transmit power must be > 0")

    def position_at(
        self, step: int, dt: float, wrap_length: Optional[float] = None
    ) -> Position:
        x = self.position.x + self.speed * step * dt
        if wrap_length:
            x = math.fmod(x, wrap_length)
        return replace(self.position, x=x)


@dataclass(frozen=True)
class RoadsideUnit:
    """Static roadside infrastructure node."""

    id: str
    position: Position
    compute_capacity: float
    transmit_power: float

    def __post_init__(self):
        if not self.compute_capacity > 0:
            raise InvalidParameterError(f"{self.id}: compute capacity must be > 0")
        if not self.transmit_power > 0:
            raise InvalidParameterError(f"{self.id}: transmit power must be > 0")

    def position_at(self, step: int, dt: float, wrap_length: Optional[float] = None):
        return self.position


Entity = Union[VehicleState, RoadsideUnit]


@dataclass
class EdgeServer:
    """Compute endpoint hosted by a vehicle or an RSU.

    ``committed`` is the capacity currently allocated to running subtasks.
    """

    id: str
    host: str
    capacity: float
    committed: float = 0.0

    @property
    def remaining(self) -> float:
        return max(self.capacity - self.committed, 0.0)

    def commit(self, amount: float) -> None:
        if amount < 0:
            raise InvalidParameterError(f"{self.id}: negative allocation {amount}")
        if self.committed + amount > self.capacity * (1 + CAPACITY_TOLERANCE):
            raise InvariantViolationError(
                f"{self.id}: allocating {amount:.6g} exceeds remaining "
                f"{self.remaining:.6g} of {self.capacity:.6g}"
            )
        self.committed += amount

    def release(self, amount: float) -> None:
        self.committed -= amount
        if self.committed < -self.capacity * CAPACITY_TOLERANCE:
            raise InvariantViolationError(
                f"{self.id}: released more capacity than was committed"
            )
        if self.committed < self.capacity * CAPACITY_TOLERANCE:
            self.committed = 0.0


def server_id_for(host_id: str) -> str:
    return f"M-{host_id}"


class EntityRegistry:
    """Vehicles and RSUs of one scenario, addressable by id.

    Args:
        vehicles: Vehicle states at t_0
        rsus: Roadside units
        wrap_length: When set, vehicle x positions wrap modulo this length
    """

    def __init__(
        self,
        vehicles: Iterable[VehicleState],
        rsus: Iterable[RoadsideUnit],
        wrap_length: Optional[float] = None,
    ):
        self.vehicles: Dict[str, VehicleState] = {v.id: v for v in vehicles}
        self.rsus: Dict[str, RoadsideUnit] = {r.id: r for r in rsus}
        self.wrap_length = wrap_length

    def get(self, entity_id: str) -> Entity:
        if entity_id in self.vehicles:
            return self.vehicles[entity_id]
        if entity_id in self.rsus:
            return self.rsus[entity_id]
        raise EntityNotFoundError(f"unknown entity '{entity_id}'")

    def position_at(self, entity_id: str, step: int, dt: float) -> Position:
        """Position of a vehicle or RSU at time step ``step``.

        Vehicles move linearly, x(t_k) = x(t_0) + speed * t_k * dt; RSUs stay put.

        Raises:
            EntityNotFoundError: If the id is unknown
        """
        return self.get(entity_id).position_at(step, dt, self.wrap_length)

    def transmit_power(self, entity_id: str) -> float:
        return self.get(entity_id).transmit_power
