"""Command-line interface: run, experiment, oracle and replay."""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from src.config import (
    ALGORITHM_CHOICES,
    PRIVACY_CHOICES,
    RuntimeSettings,
    ScenarioConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    load_settings,
    print_config_error,
)
from src.errors import ConfigError, InvariantViolationError
from src.optimizer.oracle import oracle_check
from src.output import (
    MANIFEST_NAME,
    RunManifest,
    emit_plot_data,
    plot_file_names,
    read_manifest,
    write_manifest,
    write_metrics_csv,
)
from src.simulation import EXPERIMENT_KINDS, experiment_cells, run, run_experiment, summarize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

METRICS_FILE = "metrics.csv"
PLOTS_DIR = "plots"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vec-offload",
        description="Privacy-aware task offloading simulator for vehicular edge computing",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="Run a single configuration")
    run_cmd.add_argument("--config", help="YAML scenario config (defaults when omitted)")
    run_cmd.add_argument("--seed", type=int, help="Root seed (overrides simulation.seed)")
    run_cmd.add_argument("--algorithm", choices=ALGORITHM_CHOICES)
    run_cmd.add_argument("--privacy", choices=PRIVACY_CHOICES)
    run_cmd.add_argument("--epsilon", type=float)
    run_cmd.add_argument("--out", help="Output directory")

    exp_cmd = commands.add_parser("experiment", help="Run one of the three experiment grids")
    exp_cmd.add_argument("--kind", type=int, choices=EXPERIMENT_KINDS, required=True)
    exp_cmd.add_argument("--config", help="YAML scenario config (defaults when omitted)")
    exp_cmd.add_argument("--seeds", type=int, default=1, help="Use seeds 0..N-1")
    exp_cmd.add_argument("--out", help="Output directory")
    exp_cmd.add_argument("--workers", type=int, help="Worker processes")

    oracle_cmd = commands.add_parser("oracle", help="Check branch-and-bound against brute force")
    oracle_cmd.add_argument("--instances", type=int, default=200)
    oracle_cmd.add_argument("--seed", type=int, default=0)

    replay_cmd = commands.add_parser("replay", help="Reproduce outputs from a manifest")
    replay_cmd.add_argument("--manifest", required=True)
    replay_cmd.add_argument("--out", help="Output directory (defaults to the manifest's)")
    return parser


def _base_config(path: Optional[str], settings: RuntimeSettings) -> ScenarioConfig:
    path = path or settings.CONFIG_PATH
    return load_config(path) if path else ScenarioConfig()


def execute_run(cfg: ScenarioConfig, out_dir: Path) -> None:
    write_manifest(
        RunManifest(
            command="run",
            arguments={},
            config=config_to_dict(cfg),
            seed=cfg.simulation.seed,
            outputs=[METRICS_FILE],
        ),
        out_dir,
    )
    series = run(cfg)
    write_metrics_csv(series, out_dir / METRICS_FILE)

    final = series.final
    print(f"Run complete: {len(series.records)} steps")
    if final is not None:
        rate = final.avg_reduction_rate
        mult = final.task_multiplier
        print(
            f"  completed tasks: {final.completed_tasks} "
            f"(all-local: {final.completed_tasks_local_baseline})"
        )
        print(f"  avg reduction rate: {'n/a' if rate is None else f'{rate:.6f}'}")
        print(f"  task multiplier: {'n/a' if mult is None else f'{mult:.6f}'}")
    print(f"  results: {out_dir}")


def execute_experiment(
    kind: int, cfg: ScenarioConfig, seeds: List[int], out_dir: Path, workers: int
) -> None:
    plot_files = plot_file_names(kind, experiment_cells(kind, cfg))
    write_manifest(
        RunManifest(
            command="experiment",
            arguments={"kind": kind, "seeds": seeds},
            config=config_to_dict(cfg),
            seed=seeds[0] if seeds else cfg.simulation.seed,
            outputs=[METRICS_FILE]
            + [f"{PLOTS_DIR}/{name}" for name in plot_files]
            + [f"{PLOTS_DIR}/index.txt"],
        ),
        out_dir,
    )
    table = run_experiment(kind, cfg, seeds, workers)
    write_metrics_csv(table, out_dir / METRICS_FILE)
    if table:
        emit_plot_data(table, out_dir / PLOTS_DIR)

    print(f"Experiment {kind} complete: {len(table)} runs over {len(seeds)} seed(s)")
    summary = summarize(table)
    if not summary.empty:
        print(summary.to_string(index=False, float_format=lambda v: f"{v:.6f}"))
    print(f"  results: {out_dir}")


def execute_replay(manifest_path: Path, out_dir: Optional[Path], workers: int) -> None:
    manifest = read_manifest(manifest_path)
    cfg = config_from_dict(manifest.config)
    out_dir = out_dir or manifest_path.parent
    logger.info("Replaying %s command from %s into %s", manifest.command, manifest_path, out_dir)
    if manifest.command == "run":
        execute_run(cfg, out_dir)
    elif manifest.command == "experiment":
        args = manifest.arguments
        seeds = [int(s) for s in args["seeds"]]
        execute_experiment(int(args["kind"]), cfg, seeds, out_dir, workers)
    else:
        raise ConfigError(
            f"manifest command '{manifest.command}' cannot be replayed", key="command"
        )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the command and map failures to exit codes.

    Returns:
        0 on success, 2 for configuration errors, 3 for invariant violations
        or oracle mismatches
    """
    args = build_parser().parse_args(argv)
    settings = load_settings()
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL),
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "run":
            cfg = _base_config(args.config, settings).with_overrides(
                seed=args.seed,
                algorithm=args.algorithm,
                privacy=args.privacy,
                epsilon=args.epsilon,
            )
            execute_run(cfg, Path(args.out or settings.OUTPUT_DIR))
        elif args.command == "experiment":
            if args.seeds < 1:
                raise ConfigError("must be >= 1", key="--seeds")
            cfg = _base_config(args.config, settings)
            execute_experiment(
                args.kind,
                cfg,
                list(range(args.seeds)),
                Path(args.out or settings.OUTPUT_DIR),
                args.workers or settings.WORKERS,
            )
        elif args.command == "oracle":
            report = oracle_check(args.instances, args.seed)
            print(
                f"Oracle: {report.checked} instances, {len(report.mismatches)} mismatches, "
                f"{len(report.infeasible)} infeasible"
            )
            for index, searched, exact in report.mismatches:
                print(f"  instance {index}: branch-and-bound {searched!r} vs brute force {exact!r}")
            if not report.ok:
                return EXIT_INVARIANT
        elif args.command == "replay":
            manifest = Path(args.manifest)
            if manifest.is_dir():
                manifest = manifest / MANIFEST_NAME
            execute_replay(manifest, Path(args.out) if args.out else None, settings.WORKERS)
    except ConfigError as e:
        print_config_error(str(e))
        return EXIT_CONFIG
    except InvariantViolationError as e:
        logger.error("Invariant violated: %s", e)
        print(f"ERROR: invariant violated: {e}")
        return EXIT_INVARIANT
    return EXIT_OK
