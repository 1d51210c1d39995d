"""Laplace, exponential and k-ary randomized-response mechanisms.

Every sampler takes an explicit ``numpy.random.Generator`` so that results are
reproducible and callers never share hidden state.
"""

import math
from typing import Sequence

import numpy as np

from src.errors import InvalidParameterError


def _check_epsilon(epsilon: float) -> None:
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise InvalidParameterError(f"epsilon must be a positive finite number, got {epsilon}")


def laplace_sample(scale: float, rng: np.random.Generator) -> float:
    """Draw from the zero-centered Laplace distribution.

    Args:
        scale: Laplace scale b (variance is 2 * b**2)
        rng: Random generator owned by the caller

    Returns:
        One Laplace draw

    Raises:
        InvalidParameterError: If scale is not positive
    """
    if not scale > 0:
        raise InvalidParameterError(f"Laplace scale must be positive, got {scale}")
    return float(rng.laplace(0.0, scale))


def exponential_probabilities(
    scores: Sequence[float], epsilon: float, sensitivity: float = 1.0
) -> np.ndarray:
    """Selection probabilities of the exponential mechanism.

    P[i] is proportional to exp(epsilon * scores[i] / (2 * sensitivity)).
    The maximum exponent is subtracted before exponentiating.
    """
    _check_epsilon(epsilon)
    if not sensitivity > 0:
        raise InvalidParameterError(f"sensitivity must be positive, got {sensitivity}")
    values = np.asarray(scores, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidParameterError("exponential mechanism needs at least one score")
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError("scores must be finite")

    exponents = epsilon * values / (2.0 * sensitivity)
    weights = np.exp(exponents - exponents.max())
    return weights / weights.sum()


def exponential_select(
    scores: Sequence[float],
    epsilon: float,
    rng: np.random.Generator,
    sensitivity: float = 1.0,
) -> int:
    """Pick an index with the exponential mechanism (higher score, likelier)."""
    probabilities = exponential_probabilities(scores, epsilon, sensitivity)
    return int(rng.choice(probabilities.size, p=probabilities))


def k_rr(true_bin: int, k: int, epsilon: float, rng: np.random.Generator) -> int:
    """k-ary randomized response.

    Reports ``true_bin`` with probability e^eps / (e^eps + k - 1), otherwise a
    uniformly random other bin.
    """
    if k < 2:
        raise InvalidParameterError(f"k-RR needs k >= 2, got {k}")
    if not 0 <= true_bin < k:
        raise InvalidParameterError(f"true_bin {true_bin} outside 0..{k - 1}")
    _check_epsilon(epsilon)

    # 1 / (1 + (k-1) e^-eps) avoids overflow for large epsilon
    keep = 1.0 / (1.0 + (k - 1) * math.exp(-epsilon))
    if rng.random() < keep:
        return true_bin
    other = int(rng.integers(k - 1))
    return other if other < true_bin else other + 1


def k_rr_table(k: int, epsilon: float) -> np.ndarray:
    """Closed-form k x k table P[reported | true] of :func:`k_rr`.

    The diagonal entry is formed as e^eps times the off-diagonal entry so the
    ratio check compares identically computed floats.
    """
    if k < 2:
        raise InvalidParameterError(f"k-RR needs k >= 2, got {k}")
    _check_epsilon(epsilon)
    scale = math.exp(epsilon)
    other = 1.0 / (scale + k - 1)
    table = np.full((k, k), other)
    np.fill_diagonal(table, scale * other)
    return table


def k_rr_estimate(reports: Sequence[int], k: int, epsilon: float) -> np.ndarray:
    """Unbiased frequency estimate from k-RR reports, clipped at zero.

    Returns estimated counts per bin (same total scale as ``len(reports)``).
    """
    if len(reports) == 0:
        raise InvalidParameterError("no reports to aggregate")
    table = k_rr_table(k, epsilon)
    keep, other = table[0, 0], table[0, 1]
    observed = np.bincount(np.asarray(reports, dtype=int), minlength=k).astype(float)
    estimate = (observed - len(reports) * other) / (keep - other)
    return estimate.clip(0)


def dp_ratio_check(table: Sequence[Sequence[float]], epsilon: float) -> bool:
    """Check the epsilon-DP ratio bound on a mechanism's probability table.

    ``table[i][o]`` is P[output o | input i]. True iff for all inputs i, i'
    and outputs o: table[i][o] <= e^eps * table[i'][o].

    Raises:
        InvalidParameterError: If the table is not a matrix of probability
            rows (each row sums to 1 within 1e-9)
    """
    _check_epsilon(epsilon)
    matrix = np.asarray(table, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise InvalidParameterError("probability table must be a non-empty 2-D array")
    if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
        raise InvalidParameterError("probabilities must be finite and >= 0")
    if np.any(np.abs(matrix.sum(axis=1) - 1.0) > 1e-9):
        raise InvalidParameterError("each table row must sum to 1")

    # e^709 is the largest finite double
    scale = math.exp(min(epsilon, 709.0))
    column_max = matrix.max(axis=0)
    column_min = matrix.min(axis=0)
    return bool(np.all(column_max <= scale * column_min))
