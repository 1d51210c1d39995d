"""Scenario generation: road, RSUs, vehicles and per-vehicle task sequences."""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from src.config import ScenarioConfig, TaskSection
from src.latency_model import SubtaskSpec, TaskSpec
from src.mobility.entities import (
    EdgeServer,
    EntityRegistry,
    Position,
    RoadsideUnit,
    VehicleState,
    server_id_for,
)
from src.rng import stream

logger = logging.getLogger(__name__)


def vehicle_id(index: int) -> str:
    return f"V{index:03d}"


def rsu_id(index: int) -> str:
    return f"R{index:02d}"


def task_id(owner: str, sequence: int) -> str:
    return f"{owner}/T{sequence:03d}"


def _uniform(rng: np.random.Generator, bounds) -> float:
    lo, hi = bounds
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


class TaskCatalog:
    """Deterministic task sequence of every vehicle.

    Each vehicle draws from its own ``tasks/<vehicle-id>`` stream: first the
    arrival step of its first task, then its tasks one after the other. The
    sequence is cached, so a shadow run asking for the same tasks gets
    identical specs whatever order the requests come in.
    """

    def __init__(self, section: TaskSection, seed: int, vehicle_ids: List[str]):
        self.section = section
        self._rngs = {vid: stream(seed, f"tasks/{vid}") for vid in vehicle_ids}
        self._first_arrival: Dict[str, int] = {}
        self._specs: Dict[str, List[TaskSpec]] = {vid: [] for vid in vehicle_ids}
        for vid in vehicle_ids:
            window = section.arrival_window_steps
            self._first_arrival[vid] = int(self._rngs[vid].integers(0, window + 1))

    def first_arrival(self, owner: str) -> int:
        return self._first_arrival[owner]

    def task(self, owner: str, sequence: int, arrival_step: int) -> TaskSpec:
        """The ``sequence``-th task of ``owner``, stamped with ``arrival_step``."""
        specs = self._specs[owner]
        while len(specs) <= sequence:
            specs.append(self._draw(owner, len(specs)))
        spec = specs[sequence]
        return TaskSpec(spec.id, spec.owner, spec.subtasks, arrival_step)

    def _draw(self, owner: str, sequence: int) -> TaskSpec:
        rng = self._rngs[owner]
        s = self.section
        lo, hi = s.subtask_count_range
        count = int(rng.integers(lo, hi + 1))
        subtasks = tuple(
            SubtaskSpec(
                workload=_uniform(rng, s.workload_range),
                input_bits=_uniform(rng, s.input_bits_range),
                lam=_uniform(rng, s.lambda_range),
                lo_ratio=_uniform(rng, s.lo_ratio_range),
                eo_ratio=_uniform(rng, s.eo_ratio_range),
            )
            for _ in range(count)
        )
        return TaskSpec(task_id(owner, sequence), owner, subtasks)


@dataclass
class Scenario:
    """Physical scenario and workload of one run.

    Attributes:
        registry: Vehicles and RSUs at t_0
        servers: Edge servers by id, one per RSU and one per vehicle
        catalog: Per-vehicle task sequences
        initial_tasks: First task of every vehicle, by task id
    """

    registry: EntityRegistry
    servers: Dict[str, EdgeServer]
    catalog: TaskCatalog
    initial_tasks: Dict[str, TaskSpec] = field(default_factory=dict)

    @property
    def vehicle_ids(self) -> List[str]:
        return sorted(self.registry.vehicles)

    def fresh_servers(self) -> Dict[str, EdgeServer]:
        """Copies of the servers with nothing committed."""
        return {
            sid: EdgeServer(s.id, s.host, s.capacity) for sid, s in sorted(self.servers.items())
        }


def rsu_positions(cfg: ScenarioConfig) -> List[Position]:
    """Centered grid: one RSU per full spacing interval along the road."""
    count = int(math.floor(cfg.scenario.road_length_m / cfg.rsu.spacing_m + 1e-9))
    return [
        Position(cfg.rsu.spacing_m * (i + 0.5), cfg.rsu.lateral_offset_m, cfg.rsu.height_m)
        for i in range(count)
    ]


def generate_scenario(cfg: ScenarioConfig) -> Scenario:
    """Place RSUs and vehicles and prepare every vehicle's task sequence.

    Args:
        cfg: Validated configuration; ``simulation.seed`` drives all draws

    Returns:
        Scenario: Identical for identical (config, seed)
    """
    seed = cfg.simulation.seed
    rng = stream(seed, "scenario")

    rsus = [
        RoadsideUnit(
            id=rsu_id(i),
            position=position,
            compute_capacity=_uniform(rng, cfg.rsu.capacity_range),
            transmit_power=cfg.rsu.transmit_power_w,
        )
        for i, position in enumerate(rsu_positions(cfg))
    ]

    vehicles = []
    for i in range(cfg.scenario.vehicle_count):
        lane = int(rng.integers(cfg.scenario.lanes))
        vehicles.append(
            VehicleState(
                id=vehicle_id(i),
                position=Position(
                    float(rng.uniform(0.0, cfg.scenario.road_length_m)),
                    (lane + 0.5) * cfg.scenario.lane_width_m,
                    0.0,
                ),
                speed=_uniform(rng, cfg.vehicles.speed_range),
                compute_capacity=_uniform(rng, cfg.vehicles.capacity_range),
                transmit_power=cfg.vehicles.transmit_power_w,
            )
        )

    wrap = cfg.scenario.road_length_m if cfg.scenario.wrap_around else None
    registry = EntityRegistry(vehicles, rsus, wrap_length=wrap)

    servers = {}
    for host in [*rsus, *vehicles]:
        sid = server_id_for(host.id)
        servers[sid] = EdgeServer(sid, host.id, host.compute_capacity)

    catalog = TaskCatalog(cfg.tasks, seed, [v.id for v in vehicles])
    initial = {}
    for v in vehicles:
        spec = catalog.task(v.id, 0, catalog.first_arrival(v.id))
        initial[spec.id] = spec

    logger.info(
        "Scenario: %d vehicles, %d RSUs on a %.0f m road (seed %d)",
        len(vehicles), len(rsus), cfg.scenario.road_length_m, seed,
    )
    return Scenario(registry, servers, catalog, initial)
