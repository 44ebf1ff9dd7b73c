"""Threshold-free metrics: AUC-ROC/PR and their buffered generalizations.

All curves are built the same way: sweep the distinct score values as cutoffs,
accumulate true-positive mass (label weight of flagged points), and integrate
by trapezoid. Plain AUC uses binary labels as weights; R-AUC uses smoothed
labels, which makes r_auc at buffer 0 reduce to the plain AUC exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ScoreSeries, extract_events
from ..errors import SingleClassTruth

_CURVES = ("roc", "pr")


@dataclass(frozen=True)
class VusParams:
    """Buffer grid for the volume-under-surface metrics."""

    ell_max: float = 16.0
    grid: int = 21

    def __post_init__(self) -> None:
        if self.ell_max < 0:
            raise ValueError("ell_max must be non-negative")
        if self.grid < 2:
            raise ValueError("grid must have at least 2 samples")


def _as_scores(scores: ScoreSeries | np.ndarray) -> np.ndarray:
    if isinstance(scores, ScoreSeries):
        return scores.scores
    return np.asarray(scores, dtype=np.float64).ravel()


def _check_two_class(truth: np.ndarray) -> np.ndarray:
    truth = np.asarray(truth).ravel()
    positives = np.count_nonzero(truth)
    if positives == 0 or positives == truth.size:
        raise SingleClassTruth("truth must contain both classes")
    return truth


def _curve_masses(scores: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """TP mass and flagged count at every distinct cutoff, descending."""
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    cum_tp = np.cumsum(weights[order])
    last = np.append(np.flatnonzero(np.diff(sorted_scores) != 0), scores.size - 1)
    return cum_tp[last], (last + 1).astype(np.float64)


def _trapezoid(ys: np.ndarray, xs: np.ndarray) -> float:
    return float(((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1]) / 2).sum())


def _weighted_auc(scores: np.ndarray, weights: np.ndarray, curve: str) -> float:
    if curve not in _CURVES:
        raise ValueError(f"curve must be one of {_CURVES}")
    p_total = weights.sum()
    n_total = scores.size - p_total
    tp, flagged = _curve_masses(scores, weights)
    if curve == "roc":
        xs = np.concatenate(([0.0], (flagged - tp) / n_total))
        ys = np.concatenate(([0.0], tp / p_total))
    else:
        precision = tp / flagged
        xs = np.concatenate(([0.0], tp / p_total))
        ys = np.concatenate(([precision[0]], precision))
    return _trapezoid(ys, xs)


def auc_roc(scores: ScoreSeries | np.ndarray, truth: np.ndarray) -> float:
    """P(score_pos > score_neg) + half credit for ties."""
    scores = _as_scores(scores)
    truth = _check_two_class(truth)
    return _weighted_auc(scores, truth.astype(np.float64), "roc")


def auc_pr(scores: ScoreSeries | np.ndarray, truth: np.ndarray) -> float:
    """Trapezoid over the PR curve, anchored at recall 0 with the first
    precision value."""
    scores = _as_scores(scores)
    truth = _check_two_class(truth)
    return _weighted_auc(scores, truth.astype(np.float64), "pr")


def smooth_labels(truth: np.ndarray, ell: float) -> np.ndarray:
    """Real-valued labels: 1 inside events, sqrt(1 - d/ell) within ell points
    of a boundary, 0 elsewhere. Overlapping shoulders take the max."""
    truth = np.asarray(truth).ravel()
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if not extract_events(truth):
        return truth.astype(np.float64)
    # distance to the nearest anomalous point, by two linear sweeps
    distance = np.where(truth != 0, 0.0, np.inf)
    for i in range(1, distance.size):
        distance[i] = min(distance[i], distance[i - 1] + 1)
    for i in range(distance.size - 2, -1, -1):
        distance[i] = min(distance[i], distance[i + 1] + 1)
    smoothed = np.zeros(truth.size)
    smoothed[distance == 0] = 1.0
    if ell > 0:
        shoulder = (distance > 0) & (distance <= ell)
        smoothed[shoulder] = np.sqrt(1.0 - distance[shoulder] / ell)
    return smoothed


def r_auc(
    scores: ScoreSeries | np.ndarray, truth: np.ndarray, ell: float, curve: str = "roc"
) -> float:
    """AUC over smoothed labels: TP mass is the smoothed weight of flagged
    points. At ell=0 this equals the plain AUC exactly."""
    scores = _as_scores(scores)
    truth = _check_two_class(truth)
    return _weighted_auc(scores, smooth_labels(truth, ell), curve)


def vus(
    scores: ScoreSeries | np.ndarray,
    truth: np.ndarray,
    params: VusParams | None = None,
    curve: str = "roc",
) -> float:
    """Trapezoidal average of r_auc over the buffer grid [0, ell_max]."""
    params = params or VusParams()
    scores = _as_scores(scores)
    truth = _check_two_class(truth)
    ells = np.linspace(0.0, params.ell_max, params.grid)
    values = np.array([_weighted_auc(scores, smooth_labels(truth, ell), curve) for ell in ells])
    if params.ell_max == 0:
        return float(values.mean())
    return _trapezoid(values, ells) / params.ell_max
