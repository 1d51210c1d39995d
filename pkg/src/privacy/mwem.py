"""Private histogram release with multiplicative weights + exponential mechanism."""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from src.errors import InvalidParameterError
from src.privacy.histogram import Histogram, LinearQuery
from src.privacy.mechanisms import exponential_select, laplace_sample

logger = logging.getLogger(__name__)


def _normalized(log_weights: np.ndarray, mass: float) -> np.ndarray:
    shifted = np.exp(log_weights - log_weights.max())
    return mass * shifted / shifted.sum()


def _update(
    log_weights: np.ndarray,
    query: LinearQuery,
    measurement: float,
    mass: float,
) -> np.ndarray:
    current = _normalized(log_weights, mass)
    error = measurement - query.evaluate(current)
    return log_weights + query.weights * error / (2.0 * mass)


def mwem(
    true_hist: Histogram,
    queries: Sequence[LinearQuery],
    iterations: int,
    epsilon: float,
    rng: np.random.Generator,
    history_passes: int = 0,
) -> Histogram:
    """Release a synthetic histogram that answers ``queries`` privately.

    Starting from the uniform histogram with the true total mass n, each of the
    ``iterations`` rounds spends epsilon / (2T) on picking the worst-answered
    query with the exponential mechanism (score |q(A) - q(B)|) and epsilon / (2T)
    on measuring it with Laplace noise of scale 2T / epsilon. The measurement is
    folded in with the multiplicative-weights rule
    A(x) ~ A(x) * exp(q(x) * (m - q(A)) / 2n), computed in log space.

    Args:
        true_hist: Private histogram B
        queries: Linear query class Q
        iterations: Number of rounds T
        epsilon: Total privacy budget
        rng: Random generator owned by the caller
        history_passes: Extra passes over all measured queries after each
            round (0 applies only the newest measurement)

    Returns:
        Synthetic histogram A_T with the same domain and total mass as B

    Raises:
        InvalidParameterError: On empty query set, zero-mass input or T < 1
    """
    if not queries:
        raise InvalidParameterError("MWEM needs a non-empty query set")
    if iterations < 1:
        raise InvalidParameterError(f"MWEM needs at least one iteration, got {iterations}")
    if history_passes < 0:
        raise InvalidParameterError("history_passes must be >= 0")
    mass = true_hist.total
    if not mass > 0:
        raise InvalidParameterError("MWEM input histogram has zero mass")
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")

    true_answers = np.array([q.evaluate(true_hist) for q in queries])
    round_epsilon = epsilon / (2.0 * iterations)
    noise_scale = 2.0 * iterations / epsilon

    log_weights = np.zeros(true_hist.bin_count)
    measured: List[Tuple[LinearQuery, float]] = []

    for round_index in range(iterations):
        current = _normalized(log_weights, mass)
        scores = np.abs(np.array([q.evaluate(current) for q in queries]) - true_answers)
        chosen = exponential_select(scores, round_epsilon, rng)
        measurement = true_answers[chosen] + laplace_sample(noise_scale, rng)
        measured.append((queries[chosen], measurement))

        logger.debug(
            "MWEM round %d: query %d (error %.3f), measurement %.3f",
            round_index + 1,
            chosen,
            scores[chosen],
            measurement,
        )

        log_weights = _update(log_weights, queries[chosen], measurement, mass)
        for _ in range(history_passes):
            for query, value in measured:
                log_weights = _update(log_weights, query, value, mass)

    return true_hist.with_counts(_normalized(log_weights, mass))


def accuracy_bound(
    mass: float, domain_size: int, query_count: int, iterations: int, epsilon: float
) -> float:
    """High-probability bound on max_q |q(A) - q(B)| for the MWEM release.

    2n * sqrt(log|D| / T) + 10 T log|Q| / epsilon
    """
    return 2.0 * mass * math.sqrt(math.log(domain_size) / iterations) + (
        10.0 * iterations * math.log(query_count) / epsilon
    )


def max_query_error(
    released: Histogram, true_hist: Histogram, queries: Sequence[LinearQuery]
) -> float:
    return max(abs(q.evaluate(released) - q.evaluate(true_hist)) for q in queries)
