"""Context reporting: what a vehicle tells the decision center about itself."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import InvalidParameterError
from src.privacy.histogram import Histogram, dyadic_interval_queries
from src.privacy.mechanisms import k_rr
from src.privacy.mwem import accuracy_bound, max_query_error, mwem

logger = logging.getLogger(__name__)

PRIVACY_MODES = ("none", "rr", "ldp")


@dataclass(frozen=True)
class PerturbedContext:
    """A vehicle's report.

    ``reported_position`` lies in the position histogram's domain; the
    public ``segment_offset_m`` places that domain on the road.
    """

    reported_position: float
    reported_speed: float
    segment_offset_m: float = 0.0

    @property
    def road_position(self) -> float:
        return self.reported_position + self.segment_offset_m


def _uniform_in_bin(hist: Histogram, index: int, rng: np.random.Generator) -> float:
    lo, hi = hist.bin_edges(index)
    value = float(rng.uniform(lo, hi))
    if value >= hi:
        value = math.nextafter(hi, lo)
    return value


def perturb_context(
    true_value: float, released_hist: Histogram, rng: np.random.Generator
) -> float:
    """Report a value drawn uniformly from the released bin holding ``true_value``.

    Values outside the histogram domain are clamped to the nearest bin first,
    so the report always shares the (clamped) input's bin.
    """
    if released_hist.bin_count < 1:
        raise InvalidParameterError("cannot perturb against a histogram with no bins")
    return _uniform_in_bin(released_hist, released_hist.bin_of(true_value), rng)


def _split_segment(position: float, domain_lo: float, domain_hi: float) -> tuple:
    span = domain_hi - domain_lo
    segment = math.floor((position - domain_lo) / span)
    offset = segment * span
    return position - offset, offset


class ContextReporter:
    """Produces reported context for one privacy mode.

    ``none`` forwards the true values. ``ldp`` reports a uniform value from the
    true bin of the released (MWEM) speed and position histograms. ``rr``
    applies k-ary randomized response to the speed bin and to the position bin,
    each with half the budget, then reports a uniform value inside the
    reported bin.
    """

    def __init__(
        self,
        mode: str,
        epsilon: float,
        speed_grid: Histogram,
        position_grid: Histogram,
        rng: np.random.Generator,
    ):
        if mode not in PRIVACY_MODES:
            raise InvalidParameterError(f"unknown privacy mode '{mode}'")
        if not epsilon > 0:
            raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
        self.mode = mode
        self.epsilon = epsilon
        self.speed_grid = speed_grid
        self.position_grid = position_grid
        self.rng = rng
        self._warned_clamp = False

    @classmethod
    def from_release(
        cls,
        mode: str,
        epsilon: float,
        true_speeds: Sequence[float],
        true_positions: Sequence[float],
        speed_domain: tuple,
        speed_bins: int,
        position_domain: tuple,
        position_bins: int,
        mwem_iterations: int,
        query_depth: int,
        history_passes: int,
        release_rng: np.random.Generator,
        report_rng: np.random.Generator,
    ) -> "ContextReporter":
        """Build a reporter, running the MWEM release first in ``ldp`` mode.

        The release uses the true speeds and positions as the historical
        statistics, spending epsilon / 2 on each of the two histograms.
        """
        speed_hist = Histogram.from_values(true_speeds, *speed_domain, speed_bins)
        position_hist = Histogram.from_values(
            [_split_segment(x, *position_domain)[0] for x in true_positions],
            *position_domain,
            position_bins,
        )

        if mode == "ldp" and speed_hist.total > 0:
            speed_hist = cls._release(
                speed_hist, epsilon / 2, mwem_iterations, query_depth, history_passes,
                release_rng, "speed",
            )
            position_hist = cls._release(
                position_hist, epsilon / 2, mwem_iterations, query_depth, history_passes,
                release_rng, "position",
            )
        return cls(mode, epsilon, speed_hist, position_hist, report_rng)

    @staticmethod
    def _release(
        hist: Histogram,
        epsilon: float,
        iterations: int,
        depth: int,
        history_passes: int,
        rng: np.random.Generator,
        name: str,
    ) -> Histogram:
        queries = dyadic_interval_queries(hist.bin_count, depth)
        released = mwem(hist, queries, iterations, epsilon, rng, history_passes)
        error = max_query_error(released, hist, queries)
        bound = accuracy_bound(hist.total, hist.bin_count, len(queries), iterations, epsilon)
        logger.info(
            "Released %s histogram: max query error %.2f (bound %.2f, %d queries)",
            name, error, bound, len(queries),
        )
        return released

    def _note_clamp(self, value: float, grid: Histogram, name: str) -> None:
        if not self._warned_clamp and not grid.domain_lo <= value < grid.domain_hi:
            logger.warning(
                "%s %.2f outside histogram domain [%g, %g); clamping to nearest bin",
                name, value, grid.domain_lo, grid.domain_hi,
            )
            self._warned_clamp = True

    def _randomized_response(self, value: float, grid: Histogram) -> float:
        reported_bin = k_rr(grid.bin_of(value), grid.bin_count, self.epsilon / 2, self.rng)
        return _uniform_in_bin(grid, reported_bin, self.rng)

    def report(self, true_speed: float, true_position: float) -> PerturbedContext:
        """Return the context a vehicle sends to the decision center."""
        local_position, offset = _split_segment(
            true_position, self.position_grid.domain_lo, self.position_grid.domain_hi
        )

        if self.mode == "none":
            return PerturbedContext(local_position, true_speed, offset)

        self._note_clamp(true_speed, self.speed_grid, "speed")
        if self.mode == "ldp":
            speed = perturb_context(true_speed, self.speed_grid, self.rng)
            position = perturb_context(local_position, self.position_grid, self.rng)
        else:
            speed = self._randomized_response(true_speed, self.speed_grid)
            position = self._randomized_response(local_position, self.position_grid)
        return PerturbedContext(position, speed, offset)

    def resolve(self, context: PerturbedContext) -> Tuple[float, float]:
        """Read a report at grid resolution: ``(road position, speed)``.

        Both values are the midpoints of the grid bins the report falls in.
        An ldp report carries no information below its bin, so reports of
        every mode are read this way and ldp reports resolve exactly like
        the true context.
        """
        position_grid, speed_grid = self.position_grid, self.speed_grid
        position = position_grid.bin_midpoint(position_grid.bin_of(context.reported_position))
        speed = speed_grid.bin_midpoint(speed_grid.bin_of(context.reported_speed))
        return position + context.segment_offset_m, speed

    @property
    def released(self) -> Optional[tuple]:
        """``(speed, position)`` histograms published in ``ldp`` mode."""
        return (self.speed_grid, self.position_grid) if self.mode == "ldp" else None
