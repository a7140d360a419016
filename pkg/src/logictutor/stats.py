"""Small-sample statistics: rank-sum comparison, median split, and a
multiple-comparison threshold."""

from __future__ import annotations

import math
from statistics import median
from typing import Callable, NamedTuple, Optional, Sequence, TypeVar

T = TypeVar("T")


class MannWhitneyResult(NamedTuple):
    u: float  # min(u_a, u_b)
    u_a: float
    u_b: float
    z: float
    p: float  # two-sided, normal approximation


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        average = (i + j) / 2 + 1  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = average
        i = j + 1
    return ranks


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> MannWhitneyResult:
    """Two-sided rank-sum comparison of independent samples.

    Ties share average ranks and shrink the variance by the usual tie
    correction; the z statistic uses a 0.5 continuity correction.  With
    no rank variance at all (every value identical) the result is p=1.
    """
    n_a, n_b = len(a), len(b)
    if n_a == 0 or n_b == 0:
        raise ValueError("both samples must be nonempty")
    combined = list(a) + list(b)
    ranks = _average_ranks(combined)
    r_a = sum(ranks[:n_a])
    u_a = r_a - n_a * (n_a + 1) / 2
    u_b = n_a * n_b - u_a
    u = min(u_a, u_b)

    n = n_a + n_b
    tie_sizes: dict[float, int] = {}
    for value in combined:
        tie_sizes[value] = tie_sizes.get(value, 0) + 1
    tie_term = sum(t**3 - t for t in tie_sizes.values())
    mean = n_a * n_b / 2
    variance = n_a * n_b / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return MannWhitneyResult(u, u_a, u_b, 0.0, 1.0)
    z = (u - mean + 0.5) / math.sqrt(variance)
    p = min(1.0, 2.0 * _phi(z))
    return MannWhitneyResult(u, u_a, u_b, z, p)


def _phi(z: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def median_split(
    items: Sequence[T], key: Optional[Callable[[T], float]] = None
) -> tuple[list[T], list[T]]:
    """Partition items around the sample median: strictly above goes
    high, at or below goes low.  Input order is preserved."""
    if not items:
        raise ValueError("cannot split an empty sequence")
    get = key if key is not None else (lambda item: item)
    cut = median(get(item) for item in items)
    low = [item for item in items if get(item) <= cut]
    high = [item for item in items if get(item) > cut]
    return low, high


def bonferroni_threshold(comparisons: int, alpha: float = 0.05) -> float:
    if comparisons < 1:
        raise ValueError("need at least one comparison")
    return alpha / comparisons


def bonferroni(p_values: Sequence[float], alpha: float = 0.05) -> list[bool]:
    """Familywise significance flags: p < alpha / m."""
    threshold = bonferroni_threshold(len(p_values), alpha)
    return [p < threshold for p in p_values]
