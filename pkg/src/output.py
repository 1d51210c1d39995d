"""Result files: metrics CSV, plot-ready curve files and the run manifest."""

import logging
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import pandas as pd
import yaml

from src.errors import ConfigError, InvalidParameterError
from src.simulation.metrics import MetricsSeries, average_series

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "experiment",
    "algorithm",
    "privacy",
    "epsilon",
    "seed",
    "step",
    "time_s",
    "avg_reduction_rate",
    "completed_tasks",
    "task_multiplier",
]
SORT_COLUMNS = ["experiment", "algorithm", "privacy", "epsilon", "seed", "step"]
FLOAT_FORMAT = "%.9g"

MANIFEST_NAME = "manifest.yaml"
PACKAGE_NAME = "vec-private-offloading"


def tool_version() -> str:
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return "0.1.0"


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e


def metrics_frame(table: Sequence[MetricsSeries]) -> pd.DataFrame:
    """All records of ``table`` as one sorted DataFrame in CSV column order."""
    frames = [s.to_frame() for s in table if s.records]
    if not frames:
        return pd.DataFrame(columns=CSV_COLUMNS)
    frame = pd.concat(frames, ignore_index=True)[CSV_COLUMNS]
    for column in ("epsilon", "time_s", "avg_reduction_rate", "task_multiplier"):
        frame[column] = frame[column].astype(float)
    return frame.sort_values(SORT_COLUMNS, kind="mergesort").reset_index(drop=True)


def write_metrics_csv(
    table: Union[MetricsSeries, Sequence[MetricsSeries]], path: Union[str, Path]
) -> None:
    """Write per-step metrics to a CSV file.

    Floats carry 9 significant digits; missing values are empty fields.

    Args:
        table: One series or an experiment table
        path: Destination file

    Raises:
        OSError: If the file cannot be written, naming the path
    """
    if isinstance(table, MetricsSeries):
        table = [table]
    frame = metrics_frame(table)
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    _write_text(Path(path), text)
    logger.info("Wrote %d metric rows to %s", len(frame), path)


def read_metrics_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)


# ===== Plot data =====


@dataclass(frozen=True)
class Figure:
    number: int
    experiment: int
    metric: str
    privacy: str = ""


FIGURES = [
    Figure(2, 1, "avg_reduction_rate"),
    Figure(3, 1, "task_multiplier"),
    Figure(4, 2, "avg_reduction_rate"),
    Figure(5, 2, "task_multiplier"),
    Figure(6, 3, "avg_reduction_rate", "rr"),
    Figure(7, 3, "task_multiplier", "rr"),
    Figure(8, 3, "avg_reduction_rate", "ldp"),
    Figure(9, 3, "task_multiplier", "ldp"),
]


def _curve_name(figure: Figure, series: Any) -> str:
    if figure.experiment == 1:
        return series.privacy
    if figure.experiment == 2:
        return series.algorithm
    return f"eps{series.epsilon:g}"


def _curve_label(figure: Figure, curve: str) -> str:
    grouping = {1: "privacy mode", 2: "algorithm", 3: "privacy budget"}[figure.experiment]
    scope = f", {figure.privacy} privacy" if figure.privacy else ""
    return f"experiment {figure.experiment}{scope}, {figure.metric} by {grouping}: {curve}"


def emit_plot_data(table: Sequence[MetricsSeries], out_dir: Union[str, Path]) -> List[Path]:
    """Write one ``fig{N}_{curve}.dat`` file per curve plus ``index.txt``.

    Each file holds ``step value`` lines with the seed-averaged metric; steps
    where the metric has no value yet are left out.

    Returns:
        Paths of the written curve files, in index order

    Raises:
        InvalidParameterError: If the table is empty
    """
    if not table:
        raise InvalidParameterError("cannot emit plot data for an empty experiment table")

    out_dir = Path(out_dir)
    written: List[Path] = []
    index_lines = []
    for figure in FIGURES:
        curves: Dict[str, List[MetricsSeries]] = {}
        for series in table:
            if series.experiment != figure.experiment:
                continue
            if figure.privacy and series.privacy != figure.privacy:
                continue
            curves.setdefault(_curve_name(figure, series), []).append(series)

        for curve in sorted(curves, key=lambda name: min(_order(s) for s in curves[name])):
            averaged = average_series(curves[curve])[figure.metric].dropna()
            lines = [f"# step {figure.metric}"]
            lines += [f"{int(step)} {FLOAT_FORMAT % value}" for step, value in averaged.items()]
            path = out_dir / f"fig{figure.number}_{curve}.dat"
            _write_text(path, "\n".join(lines) + "\n")
            written.append(path)
            index_lines.append(f"{path.name}\t{_curve_label(figure, curve)}")

    _write_text(out_dir / "index.txt", "\n".join(index_lines) + "\n")
    logger.info("Wrote %d plot data files to %s", len(written), out_dir)
    return written


def _order(series: Any) -> tuple:
    # Curves appear in experiment-grid order
    privacy_order = {"none": 0, "rr": 1, "ldp": 2}
    algorithm_order = {"rm": 0, "cm": 1, "bm": 2, "bnb": 3}
    return (
        privacy_order.get(series.privacy, 9),
        algorithm_order.get(series.algorithm, 9),
        series.epsilon,
    )


# ===== Manifest =====


@dataclass
class RunManifest:
    """Everything needed to reproduce a command's outputs.

    Attributes:
        command: CLI command that produced the outputs (``run`` or ``experiment``)
        arguments: Command arguments other than the config (kind, seeds, ...)
        config: Fully resolved configuration, defaults expanded
        seed: Root seed of a single run, or the first seed of an experiment
        tool_version: Package version that wrote the outputs
        outputs: Output files relative to the output directory
    """

    command: str
    arguments: Dict[str, Any]
    config: Dict[str, Any]
    seed: int
    tool_version: str = field(default_factory=tool_version)
    outputs: List[str] = field(default_factory=list)


def write_manifest(manifest: RunManifest, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    _write_text(path, yaml.safe_dump(asdict(manifest), sort_keys=False, default_flow_style=None))
    return path


def read_manifest(path: Union[str, Path]) -> RunManifest:
    """Load a manifest written by ``write_manifest``.

    Raises:
        ConfigError: If the file is unreadable or lacks manifest fields
    """
    try:
        data = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read manifest {path}: {e.strerror}")
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark else None
        raise ConfigError(f"manifest {path} is not valid YAML", line=line)

    if not isinstance(data, dict):
        raise ConfigError(f"manifest {path} must be a mapping")
    try:
        return RunManifest(**data)
    except TypeError as e:
        raise ConfigError(f"manifest {path}: {e}")


def plot_file_names(kind: int, cells: Sequence[Any]) -> List[str]:
    """Curve files ``emit_plot_data`` writes for an experiment grid.

    ``cells`` need ``algorithm``, ``privacy`` and ``epsilon`` attributes.
    """
    names = []
    for figure in FIGURES:
        if figure.experiment != kind:
            continue
        for cell in sorted(cells, key=_order):
            if figure.privacy and cell.privacy != figure.privacy:
                continue
            names.append(f"fig{figure.number}_{_curve_name(figure, cell)}.dat")
    return names
