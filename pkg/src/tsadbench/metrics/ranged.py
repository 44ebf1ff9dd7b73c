"""Range-based precision/recall over events, with positional bias and
cardinality weighting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import AnomalyEvent, extract_events

_BIASES = ("flat", "front", "back", "middle")
_CARDINALITIES = ("one", "reciprocal")


@dataclass(frozen=True)
class RangeParams:
    """Knobs of the range-based metrics.

    alpha is the existence weight on the recall side; the positional bias
    shapes per-position credit inside an event; cardinality penalizes one
    event being covered by many fragments.
    """

    alpha: float = 0.0
    bias: str = "flat"
    cardinality: str = "reciprocal"

    def __post_init__(self) -> None:
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if self.bias not in _BIASES:
            raise ValueError(f"bias must be one of {_BIASES}")
        if self.cardinality not in _CARDINALITIES:
            raise ValueError(f"cardinality must be one of {_CARDINALITIES}")


def _positional_weights(length: int, bias: str) -> np.ndarray:
    positions = np.arange(1, length + 1, dtype=np.float64)
    if bias == "flat":
        return np.ones(length)
    if bias == "front":
        return positions[::-1].copy()
    if bias == "back":
        return positions
    return np.minimum(positions, positions[::-1])


def _overlap_reward(base: AnomalyEvent, other: AnomalyEvent, bias: str) -> float:
    """Weighted fraction of base covered by other; 0 when disjoint."""
    lo = max(base.start, other.start)
    hi = min(base.end, other.end)
    if lo >= hi:
        return 0.0
    weights = _positional_weights(base.length, bias)
    covered = weights[lo - base.start : hi - base.start].sum()
    return float(covered / weights.sum())


def _cardinality_factor(n_overlaps: int, cardinality: str) -> float:
    if n_overlaps <= 1 or cardinality == "one":
        return 1.0
    return 1.0 / n_overlaps


def _one_side(
    base_events: list[AnomalyEvent],
    other_events: list[AnomalyEvent],
    alpha: float,
    bias: str,
    cardinality: str,
) -> float:
    if not base_events:
        return 0.0
    total = 0.0
    for event in base_events:
        rewards = [_overlap_reward(event, other, bias) for other in other_events]
        rewards = [r for r in rewards if r > 0]
        existence = 1.0 if rewards else 0.0
        overlap = _cardinality_factor(len(rewards), cardinality) * sum(rewards)
        total += alpha * existence + (1 - alpha) * overlap
    return total / len(base_events)


def range_pr(
    preds: np.ndarray, truth: np.ndarray, params: RangeParams | None = None
) -> dict[str, float]:
    """Range precision/recall/F1.

    Recall averages per truth event alpha*existence + (1-alpha)*gamma*overlap;
    precision is the symmetric computation over predicted events with no
    existence credit. An empty side scores 0.
    """
    params = params or RangeParams()
    preds = np.asarray(preds).ravel()
    truth = np.asarray(truth).ravel()
    if preds.shape != truth.shape:
        raise ValueError("preds and truth must have equal length")
    truth_events = extract_events(truth)
    pred_events = extract_events(preds)
    recall = _one_side(truth_events, pred_events, params.alpha, params.bias, params.cardinality)
    precision = _one_side(pred_events, truth_events, 0.0, params.bias, params.cardinality)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"R-P": precision, "R-R": recall, "R-F1": f1}
