"""Discrete-time simulation loop.

At every step the engine
    1. retires subtasks whose execution finished, releasing server capacity,
    2. makes the next subtask of each task (or a newly arrived task) ready,
    3. collects a privacy-filtered context report for each ready subtask and
       lets the decision center re-optimize the affected candidate set,
    4. commits allocations and computes the true delays from true positions,
    5. checks the capacity invariant and records metrics.

Decisions are made on reported context; execution uses the true one.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config import ScenarioConfig
from src.errors import InvariantViolationError
from src.latency_model import SubtaskSpec, TaskSpec, total_task_delay
from src.mobility.channel import ChannelModel, ChannelParams
from src.mobility.entities import (
    CAPACITY_TOLERANCE,
    EdgeServer,
    Position,
    distance,
    server_id_for,
)
from src.optimizer import (
    CandidateTask,
    DecisionSet,
    LinkEstimate,
    OffloadDecision,
    OffloadProblem,
    bm_baseline,
    branch_and_bound,
    candidate_set,
    cm_baseline,
    rm_baseline,
)
from src.privacy.context import ContextReporter, PerturbedContext
from src.rng import stream
from src.simulation.metrics import MetricsRecord, MetricsSeries, RateTracker, multiplier
from src.simulation.scenario import Scenario, generate_scenario

logger = logging.getLogger(__name__)

# Completions within this many seconds of a step boundary count for that step
TIME_SLACK = 1e-12


@dataclass
class SubtaskRun:
    """The subtask a task is currently executing, with its true delay."""

    index: int
    sub: SubtaskSpec
    start_s: float
    decision: Optional[OffloadDecision] = None
    delay_s: float = 0.0

    @property
    def completion_s(self) -> float:
        return self.start_s + self.delay_s


@dataclass
class TaskRun:
    spec: TaskSpec
    sequence: int
    current: Optional[SubtaskRun] = None
    next_index: int = 0
    weighted_rate: float = 0.0
    workload_done: float = 0.0

    @property
    def id(self) -> str:
        return self.spec.id

    @property
    def owner(self) -> str:
        return self.spec.owner


@dataclass
class Report:
    context: PerturbedContext
    step: int


@dataclass
class StepOutcome:
    step: int
    completed: int
    decisions: List[DecisionSet] = field(default_factory=list)


class Simulation:
    """One run of the offloading scheme over a generated scenario.

    Args:
        cfg: Validated configuration
        scenario: Pre-generated scenario; generated from ``cfg`` when omitted
        offloading: False gives the all-local shadow run (no channel, no
            privacy, every decision local)
    """

    def __init__(
        self,
        cfg: ScenarioConfig,
        scenario: Optional[Scenario] = None,
        offloading: bool = True,
    ):
        self.cfg = cfg
        self.scenario = scenario or generate_scenario(cfg)
        self.offloading = offloading
        self.dt = cfg.simulation.dt_s
        self.horizon = cfg.simulation.horizon_steps
        seed = cfg.simulation.seed

        self.servers: Dict[str, EdgeServer] = self.scenario.fresh_servers()
        self.tasks: Dict[str, TaskRun] = {}
        self.pending: Dict[str, Tuple[TaskSpec, int]] = {
            tid: (spec, 0) for tid, spec in self.scenario.initial_tasks.items()
        }
        self.ready: List[str] = []
        self._batch: List[str] = []
        self.reports: Dict[str, Report] = {}
        self.rates = RateTracker(cfg.metrics.window_steps)
        self.step_index = 0

        self.channel: Optional[ChannelModel] = None
        self.reporter: Optional[ContextReporter] = None
        self._rm_rng: Optional[np.random.Generator] = None
        if offloading:
            c = cfg.channel
            self.channel = ChannelModel(
                ChannelParams(
                    c.bandwidth_hz, c.ref_gain, c.path_loss_exp, c.noise_power_w,
                    c.fading, c.min_distance_m,
                ),
                stream(seed, "channel/fading"),
            )
            self.reporter = self._build_reporter(seed)
            self._rm_rng = stream(seed, "optimizer/rm")

    def _build_reporter(self, seed: int) -> ContextReporter:
        p = self.cfg.privacy
        registry = self.scenario.registry
        vehicles = [registry.vehicles[v] for v in self.scenario.vehicle_ids]
        return ContextReporter.from_release(
            mode=p.mode,
            epsilon=p.epsilon,
            true_speeds=[v.speed for v in vehicles],
            true_positions=[v.position.x for v in vehicles],
            speed_domain=p.speed_domain,
            speed_bins=p.speed_bins,
            position_domain=p.position_domain,
            position_bins=p.position_bins,
            mwem_iterations=p.mwem_iterations,
            query_depth=p.query_depth,
            history_passes=p.history_passes,
            release_rng=stream(seed, "privacy/release"),
            report_rng=stream(seed, "privacy/reports"),
        )

    # ===== Step phases =====

    @property
    def active(self) -> bool:
        """Whether any task is still pending or running."""
        return bool(self.pending or self.tasks)

    def _now(self, step: int) -> float:
        return step * self.dt

    def _retire(self, step: int) -> int:
        completed = 0
        now = self._now(step)
        for tid in sorted(self.tasks):
            run = self.tasks[tid]
            current = run.current
            if current is None or current.completion_s > now + TIME_SLACK:
                continue
            decision = current.decision
            if decision is not None and decision.server is not None:
                self.servers[decision.server].release(decision.allocation)

            owner_capacity = self.scenario.registry.vehicles[run.owner].compute_capacity
            rate = current.delay_s / (current.sub.workload / owner_capacity)
            run.weighted_rate += rate * current.sub.workload
            run.workload_done += current.sub.workload
            run.current = None

            if run.next_index < len(run.spec.subtasks):
                self.ready.append(tid)
                continue

            del self.tasks[tid]
            completed += 1
            self.rates.add(step, run.weighted_rate / run.workload_done)
            logger.debug("Task %s completed at step %d", tid, step)
            if self.cfg.tasks.regenerate and step < self.horizon:
                spec = self.scenario.catalog.task(run.owner, run.sequence + 1, step + 1)
                self.pending[spec.id] = (spec, run.sequence + 1)
        return completed

    def _arrive(self, step: int) -> None:
        for tid in sorted(self.pending):
            spec, sequence = self.pending[tid]
            if spec.arrival_step <= step:
                del self.pending[tid]
                self.tasks[tid] = TaskRun(spec, sequence)
                self.ready.append(tid)

    def _true_position(self, entity_id: str, step: int) -> Position:
        return self.scenario.registry.position_at(entity_id, step, self.dt)

    def _report(self, vehicle: str, step: int) -> None:
        position = self._true_position(vehicle, step)
        speed = self.scenario.registry.vehicles[vehicle].speed
        self.reports[vehicle] = Report(self.reporter.report(speed, position.x), step)

    def _estimated_position(self, entity_id: str, step: int) -> Optional[Position]:
        """Where the decision center believes ``entity_id`` is.

        RSUs are at known positions. A vehicle is extrapolated from its latest
        report, read at grid resolution; its lane is public. Vehicles that
        never reported are unknown.
        """
        registry = self.scenario.registry
        if entity_id in registry.rsus:
            return registry.rsus[entity_id].position
        report = self.reports.get(entity_id)
        if report is None:
            return None
        position, speed = self.reporter.resolve(report.context)
        x = position + speed * (step - report.step) * self.dt
        if registry.wrap_length:
            x = math.fmod(x, registry.wrap_length)
        return Position(x, registry.vehicles[entity_id].position.y, 0.0)

    def _reach(self, run: TaskRun, positions: Dict[str, Optional[Position]]) -> List[tuple]:
        """Nearest servers within the reach radius, as ``(distance, id, host position)``.

        A vehicle never offloads to the server it hosts itself.
        """
        owner_position = positions[run.owner]
        if owner_position is None:
            return []
        radius = self.cfg.optimizer.reach_radius_m
        own_server = server_id_for(run.owner)

        reachable = []
        for sid, server in self.servers.items():
            host_position = positions[server.host]
            if sid == own_server or host_position is None:
                continue
            dist = distance(owner_position, host_position)
            if dist <= radius:
                reachable.append((dist, sid, host_position))
        reachable.sort(key=lambda item: (item[0], item[1]))
        return reachable[: self.cfg.optimizer.max_servers_per_task]

    def _links(
        self, run: TaskRun, reach: List[tuple], positions: Dict[str, Optional[Position]], step: int
    ) -> Dict[str, LinkEstimate]:
        registry = self.scenario.registry
        owner_position = positions[run.owner]
        owner_power = registry.transmit_power(run.owner)
        links = {}
        for dist, sid, host_position in reach:
            host = self.servers[sid].host
            links[sid] = LinkEstimate(
                distance_m=dist,
                uplink_bps=self.channel.transmission_rate(
                    run.owner, owner_position, owner_power, host, host_position,
                    step, expected=True,
                ),
                downlink_bps=self.channel.transmission_rate(
                    host, host_position, registry.transmit_power(host), run.owner,
                    owner_position, step, expected=True,
                ),
            )
        return links

    def build_problem(
        self,
        candidate_ids: List[str],
        links: Dict[str, Dict[str, LinkEstimate]],
        step: int,
    ) -> OffloadProblem:
        """Offloading problem for a candidate set from reported context.

        Each server offers its capacity minus what tasks outside the
        candidate set hold.
        """
        registry = self.scenario.registry
        divisor = self.cfg.optimizer.quantum_divisor
        involved = sorted({sid for tid in candidate_ids for sid in links[tid]})

        remaining = {sid: self.servers[sid].remaining for sid in involved}
        for tid in candidate_ids:
            current = self.tasks[tid].current
            held = current.decision if current is not None else None
            if held is not None and held.server in remaining:
                remaining[held.server] += held.allocation
        remaining = {
            sid: min(value, self.servers[sid].capacity) for sid, value in remaining.items()
        }

        tasks = []
        for tid in candidate_ids:
            run = self.tasks[tid]
            sub = run.current.sub if run.current is not None else run.spec.subtasks[run.next_index]
            tasks.append(
                CandidateTask(
                    task_id=tid,
                    sub=sub,
                    local_capacity=registry.vehicles[run.owner].compute_capacity,
                    links=links[tid],
                )
            )
        quanta = {sid: self.servers[sid].capacity / divisor for sid in involved}
        return OffloadProblem(tasks, remaining, quanta, step)

    def _decide(self, problem: OffloadProblem) -> DecisionSet:
        algorithm = self.cfg.optimizer.algorithm
        if algorithm == "bnb":
            return branch_and_bound(problem)
        if algorithm == "rm":
            return rm_baseline(problem, self._rm_rng)
        if algorithm == "cm":
            return cm_baseline(problem)
        return bm_baseline(problem)

    def _true_delay_s(
        self, run: TaskRun, sub: SubtaskSpec, decision: OffloadDecision, step: int
    ) -> float:
        registry = self.scenario.registry
        local_capacity = registry.vehicles[run.owner].compute_capacity
        if decision.server is None:
            return total_task_delay(sub, decision, local_capacity, 0.0, 0.0).total_s

        host = self.servers[decision.server].host
        owner_position = self._true_position(run.owner, step)
        host_position = self._true_position(host, step)
        uplink = self.channel.transmission_rate(
            run.owner, owner_position, registry.transmit_power(run.owner),
            host, host_position, step,
        )
        downlink = self.channel.transmission_rate(
            host, host_position, registry.transmit_power(host),
            run.owner, owner_position, step,
        )
        return total_task_delay(sub, decision, local_capacity, uplink, downlink).total_s

    def _apply(self, run: TaskRun, decision: OffloadDecision, step: int) -> None:
        current = run.current
        if current is None:
            sub = run.spec.subtasks[run.next_index]
            current = SubtaskRun(run.next_index, sub, start_s=self._now(step))
            run.current = current
            run.next_index += 1
        elif current.decision == decision:
            return
        current.decision = decision
        current.delay_s = self._true_delay_s(run, current.sub, decision, step)

    def _schedule(self, tid: str, step: int) -> DecisionSet:
        """Decide the newly ready subtask of ``tid``.

        Tasks decided earlier in this step's batch have not started yet; those
        sharing a server with ``tid`` may be re-decided together with it.
        """
        run = self.tasks[tid]
        if not self.offloading:
            decision = OffloadDecision(tid, None, 0.0, step)
            self._apply(run, decision, step)
            return DecisionSet([decision], 1.0)

        self._report(run.owner, step)
        decided = [t for t in self._batch if t != tid]
        positions = {
            host: self._estimated_position(host, step)
            for host in {s.host for s in self.servers.values()} | {run.owner}
        }
        reach = {t: self._reach(self.tasks[t], positions) for t in [tid, *decided]}
        distances = {t: {sid: dist for dist, sid, _ in r} for t, r in reach.items()}
        candidates = candidate_set(tid, decided, distances, self.cfg.optimizer.candidate_limit)
        links = {t: self._links(self.tasks[t], reach[t], positions, step) for t in candidates}

        problem = self.build_problem(candidates, links, step)
        result = self._decide(problem)
        logger.debug(
            "Step %d: %s decided with %d candidates, objective %.4f (%d nodes)",
            step, tid, len(candidates), result.objective, result.stats.explored_nodes,
        )

        for decision in result.decisions:
            held = self.tasks[decision.task_id].current
            if held is not None and held.decision is not None and held.decision.server is not None:
                self.servers[held.decision.server].release(held.decision.allocation)
        for decision in result.decisions:
            if decision.server is not None:
                self.servers[decision.server].commit(decision.allocation)
            self._apply(self.tasks[decision.task_id], decision, step)
        return result

    def _check_capacity(self, step: int) -> None:
        holders: Dict[str, float] = {}
        for run in self.tasks.values():
            current = run.current
            if current is None or current.decision is None or current.decision.server is None:
                continue
            holders[current.decision.server] = (
                holders.get(current.decision.server, 0.0) + current.decision.allocation
            )
        for sid, server in self.servers.items():
            held = holders.get(sid, 0.0)
            if held > server.capacity * (1 + CAPACITY_TOLERANCE):
                raise InvariantViolationError(
                    f"step {step}: server {sid} holds {held:.6g} of capacity {server.capacity:.6g}"
                )
            if abs(held - server.committed) > server.capacity * 1e-6:
                raise InvariantViolationError(
                    f"step {step}: server {sid} ledger {server.committed:.6g} != held {held:.6g}"
                )

    def step(self, step: int) -> StepOutcome:
        """Advance the simulation by one time step."""
        outcome = StepOutcome(step, self._retire(step))
        self._arrive(step)
        ready, self.ready = sorted(set(self.ready)), []
        self._batch = []
        for tid in ready:
            outcome.decisions.append(self._schedule(tid, step))
            self._batch.append(tid)
        self._check_capacity(step)
        self.step_index = step + 1
        return outcome

    def run_steps(self) -> List[Tuple[int, Optional[float], int]]:
        """Run the horizon and drain; ``(step, avg_reduction_rate, completed)`` per step."""
        history = []
        step = 0
        limit = self.horizon + self.cfg.simulation.max_drain_steps
        while step < self.horizon or (self.active and step < limit):
            self.step(step)
            history.append((step, self.rates.average(step), self.rates.count))
            step += 1
        if self.active:
            logger.warning(
                "Drain cap of %d steps reached with %d tasks unfinished",
                self.cfg.simulation.max_drain_steps, len(self.tasks) + len(self.pending),
            )
        return history


def _merge(
    history: List[Tuple[int, Optional[float], int]],
    shadow: List[Tuple[int, Optional[float], int]],
    dt: float,
) -> List[MetricsRecord]:
    shadow_by_step = {s: completed for s, _, completed in shadow}
    last_shadow = 0
    last_run: Tuple[Optional[float], int] = (None, 0)
    run_by_step = {s: (rate, completed) for s, rate, completed in history}
    records = []
    for step in range(max(len(history), len(shadow))):
        last_shadow = shadow_by_step.get(step, last_shadow)
        last_run = run_by_step.get(step, last_run)
        rate, completed = last_run
        records.append(
            MetricsRecord(
                step=step,
                time_s=step * dt,
                avg_reduction_rate=rate,
                completed_tasks=completed,
                completed_tasks_local_baseline=last_shadow,
                task_multiplier=multiplier(completed, last_shadow),
            )
        )
    return records


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def run(cfg: ScenarioConfig, experiment: int = 0) -> MetricsSeries:
    """Run one configuration and its all-local shadow.

    Args:
        cfg: Validated configuration
        experiment: Experiment number stamped on the series (0 for single runs)

    Returns:
        MetricsSeries: Per-step records over the horizon and the drain
    """
    p = cfg.privacy
    logger.info(
        "Run start: seed=%d algorithm=%s privacy=%s epsilon=%g",
        cfg.simulation.seed, cfg.optimizer.algorithm, p.mode, p.epsilon,
    )
    scenario = generate_scenario(cfg)
    history = Simulation(cfg, scenario).run_steps()
    shadow = Simulation(cfg, scenario, offloading=False).run_steps()

    series = MetricsSeries(
        algorithm=cfg.optimizer.algorithm,
        privacy=p.mode,
        epsilon=p.epsilon,
        seed=cfg.simulation.seed,
        records=_merge(history, shadow, cfg.simulation.dt_s),
        experiment=experiment,
    )
    final = series.final
    logger.info(
        "Run finished after %d steps: %d tasks, avg reduction rate %s, multiplier %s",
        len(series.records),
        final.completed_tasks if final else 0,
        _fmt(final.avg_reduction_rate if final else None),
        _fmt(final.task_multiplier if final else None),
    )
    return series
