"""Fixed-size window expansion and per-point score aggregation.

Detectors that score subsequences emit one value per window; the benchmark
protocol requires exactly one score per time point, so window scores are
broadcast back onto the points the window covers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WindowTooLarge

OVERLAP_MODES = ("non_overlapping", "overlapping")


@dataclass(frozen=True)
class WindowPolicy:
    window: int = 32
    overlap: str = "non_overlapping"

    def __post_init__(self) -> None:
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if self.overlap not in OVERLAP_MODES:
            raise ValueError(f"overlap must be one of {OVERLAP_MODES}")


def expand_windows(length: int, policy: WindowPolicy) -> list[tuple[int, int]]:
    """Window [start, end) spans covering [0, length) under the policy.

    Non-overlapping windows step by the window size; when the length is not
    a multiple, one extra window is pinned to the end so coverage is total.
    Overlapping windows use stride 1.
    """
    w = policy.window
    if length < w:
        raise WindowTooLarge(f"window {w} exceeds series length {length}")
    if policy.overlap == "overlapping":
        return [(i, i + w) for i in range(length - w + 1)]
    spans = [(s, s + w) for s in range(0, length - w + 1, w)]
    if spans[-1][1] < length:
        spans.append((length - w, length))
    return spans


def scores_to_points(window_scores: np.ndarray, length: int, policy: WindowPolicy) -> np.ndarray:
    """Broadcast one score per window onto one score per point.

    Points in several non-overlapping windows (the pinned tail) take the
    final window's score; overlapping mode averages all covering windows.
    """
    spans = expand_windows(length, policy)
    window_scores = np.asarray(window_scores, dtype=np.float64)
    if window_scores.shape != (len(spans),):
        raise ValueError(f"expected {len(spans)} window scores, got {window_scores.shape}")
    if policy.overlap == "overlapping":
        totals = np.zeros(length)
        counts = np.zeros(length)
        for (start, end), score in zip(spans, window_scores):
            totals[start:end] += score
            counts[start:end] += 1
        return totals / counts
    out = np.empty(length)
    for (start, end), score in zip(spans, window_scores):
        out[start:end] = score
    return out
