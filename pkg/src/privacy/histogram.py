"""Binned histograms over a bounded 1-D domain and linear queries on them."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from src.errors import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Histogram:
    """Counts over ``bin_count`` equal-width bins covering [domain_lo, domain_hi)."""

    domain_lo: float
    domain_hi: float
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        if counts.ndim != 1 or counts.size == 0:
            raise InvalidParameterError("histogram needs at least one bin")
        if not self.domain_hi > self.domain_lo:
            raise InvalidParameterError(
                f"empty domain [{self.domain_lo}, {self.domain_hi}]"
            )
        if not np.all(np.isfinite(counts)) or np.any(counts < 0):
            raise InvalidParameterError("histogram counts must be finite and >= 0")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def bin_count(self) -> int:
        return int(self.counts.size)

    @property
    def width(self) -> float:
        return (self.domain_hi - self.domain_lo) / self.bin_count

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def bin_of(self, value: float) -> int:
        """Index of the bin holding ``value``, clamped to the valid range."""
        index = math.floor((value - self.domain_lo) / self.width)
        return min(max(index, 0), self.bin_count - 1)

    def bin_edges(self, index: int) -> tuple:
        """Return ``(lo, hi)`` of bin ``index``."""
        lo = self.domain_lo + index * self.width
        return lo, lo + self.width

    def bin_midpoint(self, index: int) -> float:
        lo, hi = self.bin_edges(index)
        return 0.5 * (lo + hi)

    def with_counts(self, counts: np.ndarray) -> "Histogram":
        """Same domain and binning, different counts."""
        return Histogram(self.domain_lo, self.domain_hi, np.asarray(counts, dtype=float))

    @classmethod
    def uniform(cls, domain_lo: float, domain_hi: float, bin_count: int, mass: float):
        if bin_count < 1:
            raise InvalidParameterError(f"bin_count must be >= 1, got {bin_count}")
        return cls(domain_lo, domain_hi, np.full(bin_count, mass / bin_count))

    @classmethod
    def from_values(
        cls,
        values: Iterable[float],
        domain_lo: float,
        domain_hi: float,
        bin_count: int,
    ) -> "Histogram":
        """Count raw observations into bins; out-of-domain values are clamped."""
        empty = cls.uniform(domain_lo, domain_hi, bin_count, 0.0)
        counts = np.zeros(bin_count)
        for value in values:
            counts[empty.bin_of(value)] += 1
        return empty.with_counts(counts)

    # ===== TEXT FORMAT =====

    @classmethod
    def from_text(cls, source: Union[str, Path]) -> "Histogram":
        """Load a histogram from the plain-text fixture format.

        The first non-blank line is ``domain_lo domain_hi bin_count``; every
        following non-blank line holds one count.

        Args:
            source: Path to the file

        Returns:
            The parsed histogram

        Raises:
            InvalidParameterError: If the header or counts are malformed
        """
        lines = [
            line.strip()
            for line in Path(source).read_text().splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        if not lines:
            raise InvalidParameterError(f"{source}: empty histogram file")

        header = lines[0].split()
        if len(header) != 3:
            raise InvalidParameterError(
                f"{source}: header must be 'domain_lo domain_hi bin_count'"
            )
        try:
            domain_lo, domain_hi, bin_count = float(header[0]), float(header[1]), int(header[2])
            counts = [float(line) for line in lines[1:]]
        except ValueError as e:
            raise InvalidParameterError(f"{source}: {e}") from e

        if len(counts) != bin_count:
            raise InvalidParameterError(
                f"{source}: header declares {bin_count} bins, found {len(counts)} counts"
            )
        return cls(domain_lo, domain_hi, np.array(counts))

    def to_text(self) -> str:
        lines = [f"{self.domain_lo!r} {self.domain_hi!r} {self.bin_count}"]
        lines.extend(repr(float(c)) for c in self.counts)
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LinearQuery:
    """Weights in [-1, +1], one per histogram bin; q(H) = sum_x w[x] * H[x]."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise InvalidParameterError("query needs at least one weight")
        if np.any(weights < -1.0) or np.any(weights > 1.0):
            raise InvalidParameterError("query weights must lie in [-1, +1]")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def evaluate(self, counts: Union[Histogram, np.ndarray]) -> float:
        values = counts.counts if isinstance(counts, Histogram) else counts
        if len(values) != self.weights.size:
            raise InvalidParameterError(
                f"query has {self.weights.size} weights, histogram has {len(values)} bins"
            )
        return float(np.dot(self.weights, values))

    @classmethod
    def interval(cls, bin_count: int, start: int, stop: int) -> "LinearQuery":
        """Indicator of bins ``start`` (inclusive) to ``stop`` (exclusive)."""
        if not 0 <= start < stop <= bin_count:
            raise InvalidParameterError(
                f"interval [{start}, {stop}) outside 0..{bin_count}"
            )
        weights = np.zeros(bin_count)
        weights[start:stop] = 1.0
        return cls(weights)


def dyadic_interval_queries(bin_count: int, max_depth: int) -> List[LinearQuery]:
    """All dyadic interval indicators from the full domain down to ``max_depth``.

    Level ``l`` splits the domain into ``2**l`` intervals. When ``bin_count``
    is not a power of two the split points are rounded to bin boundaries and
    empty or duplicate intervals are skipped.
    """
    if bin_count < 1 or max_depth < 0:
        raise InvalidParameterError("bin_count must be >= 1 and max_depth >= 0")

    seen = set()
    queries = []
    for level in range(max_depth + 1):
        parts = 2**level
        bounds = [round(i * bin_count / parts) for i in range(parts + 1)]
        for start, stop in zip(bounds, bounds[1:]):
            if stop > start and (start, stop) not in seen:
                seen.add((start, stop))
                queries.append(LinearQuery.interval(bin_count, start, stop))
    return queries


def partition_queries(bin_count: int, parts: int) -> List[LinearQuery]:
    """``parts`` interval indicators that tile the domain with equal width."""
    if not 1 <= parts <= bin_count:
        raise InvalidParameterError(f"parts must be in 1..{bin_count}, got {parts}")
    bounds = [round(i * bin_count / parts) for i in range(parts + 1)]
    return [LinearQuery.interval(bin_count, a, b) for a, b in zip(bounds, bounds[1:])]
