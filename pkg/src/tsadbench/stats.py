"""Statistical comparison of detectors: Wilcoxon signed-rank, Friedman,
and the Nemenyi critical difference."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import AllZeroDifferences, DegenerateShape, UnsupportedK

ALTERNATIVES = ("two_sided", "greater", "less")

# Nemenyi q constants (Demsar normalization: studentized range at infinite
# degrees of freedom divided by sqrt(2)), k = 2..50
_Q_TABLE = {
    0.05: (
        1.9600, 2.3437, 2.5690, 2.7278, 2.8497, 2.9483, 3.0309, 3.1017, 3.1637,
        3.2187, 3.2680, 3.3127, 3.3536, 3.3912, 3.4260, 3.4584, 3.4887, 3.5171,
        3.5438, 3.5690, 3.5929, 3.6156, 3.6373, 3.6579, 3.6776, 3.6964, 3.7145,
        3.7319, 3.7486, 3.7647, 3.7802, 3.7952, 3.8097, 3.8237, 3.8373, 3.8504,
        3.8632, 3.8756, 3.8876, 3.8993, 3.9107, 3.9219, 3.9327, 3.9432, 3.9535,
        3.9636, 3.9734, 3.9830, 3.9923,
    ),
    0.10: (
        1.6449, 2.0523, 2.2913, 2.4595, 2.5885, 2.6927, 2.7799, 2.8546, 2.9199,
        2.9778, 3.0297, 3.0767, 3.1197, 3.1592, 3.1957, 3.2297, 3.2615, 3.2912,
        3.3192, 3.3457, 3.3707, 3.3945, 3.4171, 3.4387, 3.4593, 3.4790, 3.4979,
        3.5160, 3.5335, 3.5503, 3.5665, 3.5822, 3.5973, 3.6119, 3.6261, 3.6398,
        3.6531, 3.6661, 3.6786, 3.6908, 3.7027, 3.7143, 3.7256, 3.7366, 3.7473,
        3.7578, 3.7680, 3.7780, 3.7877,
    ),
}

_EXACT_LIMIT = 12


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties averaged."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_signed_rank(
    a, b, alternative: str = "two_sided"
) -> tuple[float, float]:
    """Paired signed-rank test: (W = smaller rank sum, p-value).

    Zero differences are dropped; tied magnitudes share average ranks. The
    p-value is exact (all sign patterns enumerated) up to 12 effective
    pairs, then a tie-corrected normal approximation with continuity
    correction. "greater" means a tends above b.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("wilcoxon needs two equal-length 1-D samples")
    diffs = a - b
    diffs = diffs[diffs != 0]
    n = diffs.size
    if n == 0:
        raise AllZeroDifferences("all paired differences are zero")
    ranks = average_ranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w = min(w_plus, w_minus)

    if alternative == "greater":
        observed = w_minus
    elif alternative == "less":
        observed = w_plus
    else:
        observed = w

    if n <= _EXACT_LIMIT:
        # each sign pattern assigns the same rank magnitudes; count patterns
        # whose statistic is at least as extreme as observed
        signs = np.array(
            [[(pattern >> i) & 1 for i in range(n)] for pattern in range(1 << n)],
            dtype=np.float64,
        )
        plus = signs @ ranks
        total = ranks.sum()
        minus = total - plus
        if alternative == "greater":
            count = int((minus <= observed).sum())
        elif alternative == "less":
            count = int((plus <= observed).sum())
        else:
            count = int((np.minimum(plus, minus) <= observed).sum())
        p = count / (1 << n)
    else:
        mean = n * (n + 1) / 4.0
        _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
        tie_term = float(((tie_counts**3 - tie_counts).sum())) / 48.0
        sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
        z = (observed - mean + 0.5) / sigma
        p = 1.0 - _normal_sf(z)
        if alternative == "two_sided":
            p = min(1.0, 2.0 * p)
    # p is strictly positive; guard the open bound against tail underflow
    return w, min(1.0, max(p, math.ulp(0.0)))


def friedman(results) -> tuple[float, float]:
    """Friedman rank test over a (k methods x N datasets) matrix.

    Returns (chi-square statistic, p-value from the chi-square tail with
    k-1 degrees of freedom). Higher values rank 1.
    """
    results = np.asarray(results, dtype=np.float64)
    if results.ndim != 2:
        raise DegenerateShape("friedman needs a 2-D methods-by-datasets matrix")
    k, n = results.shape
    if k < 3 or n < 2:
        raise DegenerateShape(f"friedman needs k >= 3 methods and N >= 2 datasets, got {k}x{n}")
    ranks = np.column_stack([average_ranks(-results[:, j]) for j in range(n)])
    mean_ranks = ranks.mean(axis=1)
    statistic = 12.0 * n / (k * (k + 1)) * float(((mean_ranks - (k + 1) / 2.0) ** 2).sum())
    return statistic, float(chi2.sf(statistic, k - 1))


def nemenyi_cd(k: int, n: int, alpha: float = 0.05) -> float:
    """Critical mean-rank difference for k methods over n datasets."""
    if alpha not in _Q_TABLE:
        raise ValueError(f"alpha must be one of {sorted(_Q_TABLE)}")
    if not 2 <= k <= 50:
        raise UnsupportedK(f"critical values available for 2 <= k <= 50, got {k}")
    if n < 1:
        raise ValueError("n must be positive")
    return _Q_TABLE[alpha][k - 2] * math.sqrt(k * (k + 1) / (6.0 * n))


@dataclass(frozen=True)
class RankTable:
    """Mean ranks plus the groups the critical difference cannot separate."""

    methods: tuple[str, ...]  # sorted by mean rank, best first
    mean_ranks: dict[str, float]
    cd: float
    groups: tuple[tuple[str, ...], ...]


def rank_table(values, methods, higher_better: bool = True, alpha: float = 0.05) -> RankTable:
    """Rank methods over datasets and mark CD-connected groups.

    values is (k methods x N datasets); rank 1 is best per dataset. Groups
    are maximal runs of rank-adjacent methods whose extremes differ by less
    than the critical difference.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != len(methods):
        raise DegenerateShape("values must be (len(methods), N)")
    k, n = values.shape
    signed = -values if higher_better else values
    ranks = np.column_stack([average_ranks(signed[:, j]) for j in range(n)])
    means = ranks.mean(axis=1)
    cd = nemenyi_cd(k, n, alpha)

    order = np.argsort(means, kind="stable")
    sorted_methods = tuple(methods[i] for i in order)
    sorted_means = means[order]
    groups: list[tuple[str, ...]] = []
    reach = -1
    for i in range(k):
        j = i
        while j + 1 < k and sorted_means[j + 1] - sorted_means[i] < cd:
            j += 1
        if j > reach:
            groups.append(tuple(sorted_methods[i : j + 1]))
            reach = j
    return RankTable(
        methods=sorted_methods,
        mean_ranks={m: float(r) for m, r in zip(sorted_methods, sorted_means)},
        cd=cd,
        groups=tuple(groups),
    )
