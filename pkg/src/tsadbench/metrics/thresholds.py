"""Score thresholding, point metrics, and the point-adjustment transform."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import PredictionSeries, ScoreSeries, extract_events

# The benchmark-wide threshold set; values are top-percentages of points to flag.
DEFAULT_PERCENTILES = (0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0, 25.0)


@dataclass(frozen=True)
class ThresholdPolicy:
    """The sweep set Theta of top-percentile cutoffs."""

    percentiles: tuple[float, ...] = field(default=DEFAULT_PERCENTILES)

    def __post_init__(self) -> None:
        values = tuple(float(t) for t in self.percentiles)
        if not values:
            raise ValueError("threshold policy needs at least one percentile")
        if any(not 0 < t < 100 for t in values):
            raise ValueError("percentiles must lie in (0, 100)")
        if list(values) != sorted(values):
            raise ValueError("percentiles must be sorted ascending")
        object.__setattr__(self, "percentiles", values)


def threshold(scores: ScoreSeries | np.ndarray, percentile: float) -> PredictionSeries:
    """Flag the top percentile% of scores by nearest-rank cutoff; ties flood.

    The cutoff is the k-th largest score with k = ceil(percentile% of L), and
    every point scoring >= cutoff is flagged, so at least k points are always
    predicted anomalous.
    """
    if not 0 < percentile < 100:
        raise ValueError("percentile must lie in (0, 100)")
    if isinstance(scores, ScoreSeries):
        offset = scores.aligned_offset
        values = scores.scores
    else:
        offset = 0
        values = np.asarray(scores, dtype=np.float64).ravel()
    length = values.shape[0]
    k = min(length, max(1, math.ceil(percentile / 100 * length)))
    cutoff = np.partition(values, length - k)[length - k]
    preds = (values >= cutoff).astype(np.uint8)
    return PredictionSeries(preds, percentile=float(percentile), aligned_offset=offset)


def point_adjust(preds: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Expand predictions over every truth event containing at least one hit.

    Known to inflate F1 scores; the protocol keeps it off by default and
    exposes it only for the inflation demonstration.
    """
    preds = np.asarray(preds).ravel()
    truth = np.asarray(truth).ravel()
    if preds.shape != truth.shape:
        raise ValueError("preds and truth must have equal length")
    adjusted = preds.astype(np.uint8).copy()
    for start, end in extract_events(truth):
        if adjusted[start:end].any():
            adjusted[start:end] = 1
    return adjusted


def point_metrics(preds: np.ndarray, truth: np.ndarray) -> dict[str, float]:
    """Accuracy, precision, recall, F1 with the 0/0 := 0 convention."""
    preds = np.asarray(preds).ravel().astype(bool)
    truth = np.asarray(truth).ravel().astype(bool)
    if preds.shape != truth.shape:
        raise ValueError("preds and truth must have equal length")
    tp = float(np.count_nonzero(preds & truth))
    fp = float(np.count_nonzero(preds & ~truth))
    fn = float(np.count_nonzero(~preds & truth))
    tn = float(np.count_nonzero(~preds & ~truth))
    accuracy = (tp + tn) / preds.size if preds.size else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"Acc": accuracy, "P": precision, "R": recall, "F1": f1}
