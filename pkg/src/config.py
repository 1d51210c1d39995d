"""Centralized configuration management with validation.

Two layers:
    RuntimeSettings: process-level settings from environment variables (.env)
    ScenarioConfig: the simulation configuration, loaded from a YAML file
"""

import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml
from dotenv import load_dotenv

from src.errors import ConfigError

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class RuntimeSettings:
    """Process settings loaded from environment variables.

    Nothing here changes simulation results; it only decides where files go,
    how chatty the logs are and how many worker processes run experiments.
    """

    def __init__(self):
        """Initialize settings from environment variables."""
        # Load .env file
        load_dotenv()

        self.CONFIG_PATH: Optional[str] = os.getenv("VEC_CONFIG_PATH") or None
        self.OUTPUT_DIR: str = os.getenv("VEC_OUTPUT_DIR", "results")
        self.LOG_LEVEL: str = self._get_choice("VEC_LOG_LEVEL", "INFO", LOG_LEVELS)
        self.WORKERS: int = self._get_positive_int("VEC_WORKERS", 1)

    def _get_choice(self, key: str, default: str, choices: Tuple[str, ...]) -> str:
        value = os.getenv(key, default).upper()
        if value not in choices:
            raise ValueError(f"Environment variable '{key}' must be one of {', '.join(choices)}")
        return value

    def _get_positive_int(self, key: str, default: int) -> int:
        """Get an integer environment variable that must be >= 1.

        Raises:
            ValueError: If the value is not a positive integer
        """
        raw = os.getenv(key)
        if not raw:
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"Environment variable '{key}' must be an integer, got '{raw}'")
        if value < 1:
            raise ValueError(f"Environment variable '{key}' must be >= 1, got {value}")
        return value


def print_config_error(message: str) -> None:
    print("=" * 60)
    print("ERROR: Configuration validation failed")
    print("=" * 60)
    print(f"\n{message}\n")
    print("Environment settings (all optional):")
    print("  - VEC_CONFIG_PATH (default scenario config file)")
    print("  - VEC_OUTPUT_DIR (defaults to 'results')")
    print(f"  - VEC_LOG_LEVEL (one of {', '.join(LOG_LEVELS)}, defaults to INFO)")
    print("  - VEC_WORKERS (parallel experiment processes, defaults to 1)")
    print("\nScenario files are YAML; see config/default.yaml for every key.")
    print("=" * 60)


def load_settings() -> RuntimeSettings:
    """Load runtime settings from the environment.

    Exits:
        Exits with status 2 and a banner if a variable is invalid
    """
    try:
        return RuntimeSettings()
    except ValueError as e:
        print_config_error(str(e))
        sys.exit(2)


# ===== Scenario configuration =====

Range = Tuple[float, float]


@dataclass(frozen=True)
class ScenarioSection:
    road_length_m: float = 2000.0
    lanes: int = 4
    lane_width_m: float = 3.0
    vehicle_count: int = 40
    wrap_around: bool = True


@dataclass(frozen=True)
class RsuSection:
    spacing_m: float = 500.0
    lateral_offset_m: float = 20.0
    height_m: float = 10.0
    capacity_range: Range = (8.0e9, 12.0e9)
    transmit_power_w: float = 0.01


@dataclass(frozen=True)
class VehicleSection:
    speed_range: Range = (5.0, 25.0)
    capacity_range: Range = (5.0e8, 1.0e9)
    transmit_power_w: float = 0.1


@dataclass(frozen=True)
class TaskSection:
    subtask_count_range: Tuple[int, int] = (3, 8)
    workload_range: Range = (1.0e9, 4.0e9)
    input_bits_range: Range = (1.0e6, 2.0e7)
    lambda_range: Range = (0.5, 1.0)
    lo_ratio_range: Range = (0.2, 1.0)
    eo_ratio_range: Range = (0.1, 0.5)
    arrival_window_steps: int = 10
    regenerate: bool = True


@dataclass(frozen=True)
class ChannelSection:
    bandwidth_hz: float = 1.0e7
    ref_gain: float = 1.0e-3
    path_loss_exp: float = 3.0
    noise_power_w: float = 1.0e-13
    fading: str = "deterministic"
    min_distance_m: float = 1.0


@dataclass(frozen=True)
class PrivacySection:
    mode: str = "ldp"
    epsilon: float = 5.0
    mwem_iterations: int = 10
    query_depth: int = 4
    history_passes: int = 0
    speed_domain: Range = (0.0, 100.0)
    speed_bins: int = 100
    position_domain: Range = (0.0, 1000.0)
    position_bins: int = 100


@dataclass(frozen=True)
class OptimizerSection:
    algorithm: str = "bnb"
    candidate_limit: int = 5
    quantum_divisor: int = 4
    reach_radius_m: float = 500.0
    max_servers_per_task: int = 4


@dataclass(frozen=True)
class SimulationSection:
    dt_s: float = 1.0
    horizon_steps: int = 200
    max_drain_steps: int = 5000
    seed: int = 0


@dataclass(frozen=True)
class MetricsSection:
    window_steps: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved simulation configuration, one attribute per YAML section."""

    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    rsu: RsuSection = field(default_factory=RsuSection)
    vehicles: VehicleSection = field(default_factory=VehicleSection)
    tasks: TaskSection = field(default_factory=TaskSection)
    channel: ChannelSection = field(default_factory=ChannelSection)
    privacy: PrivacySection = field(default_factory=PrivacySection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    simulation: SimulationSection = field(default_factory=SimulationSection)
    metrics: MetricsSection = field(default_factory=MetricsSection)

    def __post_init__(self):
        _validate(self)

    def with_overrides(
        self,
        seed: Optional[int] = None,
        algorithm: Optional[str] = None,
        privacy: Optional[str] = None,
        epsilon: Optional[float] = None,
    ) -> "ScenarioConfig":
        """Return a copy with command-line overrides applied and re-validated."""
        simulation, optimizer, privacy_section = self.simulation, self.optimizer, self.privacy
        if seed is not None:
            simulation = dataclasses.replace(
                simulation, seed=_coerce("simulation.seed", seed, int)
            )
        if algorithm is not None:
            optimizer = dataclasses.replace(optimizer, algorithm=algorithm)
        if privacy is not None:
            privacy_section = dataclasses.replace(privacy_section, mode=privacy)
        if epsilon is not None:
            privacy_section = dataclasses.replace(
                privacy_section, epsilon=_coerce("privacy.epsilon", epsilon, float)
            )
        return dataclasses.replace(
            self, simulation=simulation, optimizer=optimizer, privacy=privacy_section
        )


SECTIONS = {f.name: f.default_factory for f in dataclasses.fields(ScenarioConfig)}

ALGORITHM_CHOICES = ("bnb", "rm", "cm", "bm")
PRIVACY_CHOICES = ("none", "rr", "ldp")
FADING_CHOICES = ("deterministic", "exponential")


def _require(ok: bool, key: str, constraint: str) -> None:
    if not ok:
        raise ConfigError(f"must satisfy {constraint}", key=key)


def _check_range(key: str, bounds: tuple, lower: float = -math.inf, open_lower: bool = False):
    lo, hi = bounds
    _require(lo <= hi, key, "range[0] <= range[1]")
    if open_lower:
        _require(lo > lower, key, f"range values > {lower:g}")
    else:
        _require(lo >= lower, key, f"range values >= {lower:g}")


def _validate(cfg: ScenarioConfig) -> None:
    s = cfg.scenario
    _require(s.road_length_m > 0, "scenario.road_length_m", "> 0")
    _require(s.lanes >= 1, "scenario.lanes", ">= 1")
    _require(s.lane_width_m > 0, "scenario.lane_width_m", "> 0")
    _require(s.vehicle_count >= 0, "scenario.vehicle_count", ">= 0")

    r = cfg.rsu
    _require(r.spacing_m > 0, "rsu.spacing_m", "> 0")
    _require(r.height_m >= 0, "rsu.height_m", ">= 0")
    _check_range("rsu.capacity_range", r.capacity_range, 0.0, open_lower=True)
    _require(r.transmit_power_w > 0, "rsu.transmit_power_w", "> 0")

    v = cfg.vehicles
    _check_range("vehicles.speed_range", v.speed_range, 0.0)
    _check_range("vehicles.capacity_range", v.capacity_range, 0.0, open_lower=True)
    _require(v.transmit_power_w > 0, "vehicles.transmit_power_w", "> 0")

    t = cfg.tasks
    _check_range("tasks.subtask_count_range", t.subtask_count_range, 1)
    _check_range("tasks.workload_range", t.workload_range, 0.0, open_lower=True)
    _check_range("tasks.input_bits_range", t.input_bits_range, 0.0, open_lower=True)
    _check_range("tasks.lambda_range", t.lambda_range, 0.0)
    _require(t.lambda_range[1] <= 1.0, "tasks.lambda_range", "range values <= 1")
    _check_range("tasks.lo_ratio_range", t.lo_ratio_range, 0.0)
    _check_range("tasks.eo_ratio_range", t.eo_ratio_range, 0.0)
    _require(t.arrival_window_steps >= 0, "tasks.arrival_window_steps", ">= 0")

    c = cfg.channel
    for name in ("bandwidth_hz", "ref_gain", "path_loss_exp", "noise_power_w", "min_distance_m"):
        _require(getattr(c, name) > 0, f"channel.{name}", "> 0")
    _require(c.fading in FADING_CHOICES, "channel.fading", f"one of {FADING_CHOICES}")

    p = cfg.privacy
    _require(p.mode in PRIVACY_CHOICES, "privacy.mode", f"one of {PRIVACY_CHOICES}")
    _require(p.epsilon > 0, "privacy.epsilon", "> 0")
    _require(p.mwem_iterations >= 1, "privacy.mwem_iterations", ">= 1")
    _require(p.query_depth >= 0, "privacy.query_depth", ">= 0")
    _require(p.history_passes >= 0, "privacy.history_passes", ">= 0")
    _require(p.speed_domain[0] < p.speed_domain[1], "privacy.speed_domain", "lo < hi")
    _require(p.speed_bins >= 2, "privacy.speed_bins", ">= 2")
    _require(p.position_domain[0] < p.position_domain[1], "privacy.position_domain", "lo < hi")
    _require(p.position_bins >= 2, "privacy.position_bins", ">= 2")

    o = cfg.optimizer
    _require(o.algorithm in ALGORITHM_CHOICES, "optimizer.algorithm", f"one of {ALGORITHM_CHOICES}")
    _require(o.candidate_limit >= 1, "optimizer.candidate_limit", ">= 1")
    _require(o.quantum_divisor >= 1, "optimizer.quantum_divisor", ">= 1")
    _require(o.reach_radius_m > 0, "optimizer.reach_radius_m", "> 0")
    _require(o.max_servers_per_task >= 1, "optimizer.max_servers_per_task", ">= 1")

    sim = cfg.simulation
    _require(sim.dt_s > 0, "simulation.dt_s", "> 0")
    _require(sim.horizon_steps >= 1, "simulation.horizon_steps", ">= 1")
    _require(sim.max_drain_steps >= 0, "simulation.max_drain_steps", ">= 0")
    _require(0 <= sim.seed < 2**64, "simulation.seed", "0 <= seed < 2^64")

    _require(cfg.metrics.window_steps >= 0, "metrics.window_steps", ">= 0")


def _coerce(key: str, value: Any, kind: type) -> Any:
    """Convert a YAML scalar to ``kind`` or raise ConfigError naming ``key``."""
    if isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"expected {kind.__name__}, got a boolean", key=key)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError("expected true or false", key=key)
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError("expected a string", key=key)
        return value
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            return int(value)
        if not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
        return value
    # PyYAML reads exponent literals without a dot (1e9) as strings
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", key=key)
    if not math.isfinite(number):
        raise ConfigError("expected a finite number", key=key)
    return number


def _coerce_field(key: str, value: Any, default: Any) -> Any:
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(default):
            raise ConfigError(f"expected a list of {len(default)} values", key=key)
        kind = type(default[0])
        return tuple(_coerce(key, item, kind) for item in value)
    return _coerce(key, value, type(default))


def config_from_dict(data: Optional[Dict[str, Any]]) -> ScenarioConfig:
    """Build a validated config from nested mappings; missing keys take defaults.

    Raises:
        ConfigError: Unknown section or key, wrong type, or range violation
    """
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping of sections")

    sections = {}
    for name, values in data.items():
        if name not in SECTIONS:
            raise ConfigError("unknown section", key=str(name))
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError("section must be a mapping", key=name)
        defaults = SECTIONS[name]()
        known = {f.name for f in dataclasses.fields(defaults)}
        kwargs = {}
        for key, value in values.items():
            dotted = f"{name}.{key}"
            if key not in known:
                raise ConfigError("unknown key", key=dotted)
            kwargs[key] = _coerce_field(dotted, value, getattr(defaults, key))
        sections[name] = dataclasses.replace(defaults, **kwargs)
    return ScenarioConfig(**sections)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Load and validate a scenario config file.

    Args:
        path: YAML file with any subset of the known sections

    Returns:
        ScenarioConfig: Fully resolved configuration

    Raises:
        ConfigError: Missing file, YAML syntax error (with line number),
            unknown key, or range violation
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e.strerror}")

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"YAML parse error: {problem}", line=mark.line + 1 if mark else None)

    cfg = config_from_dict(data)
    logging.getLogger(__name__).debug("Loaded config from %s", path)
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> Dict[str, Dict[str, Any]]:
    """Nested plain-Python view of ``cfg`` (tuples become lists)."""
    result = {}
    for name in SECTIONS:
        section = dataclasses.asdict(getattr(cfg, name))
        result[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in section.items()}
    return result


def dump_config(cfg: ScenarioConfig) -> str:
    """Serialize the fully resolved config as YAML, sections in canonical order."""
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)
