"""Full metric suite evaluation with the best-over-thresholds report."""

from __future__ import annotations

import numpy as np

from ..core import MetricReport, ScoreSeries
from .affiliation import affiliation
from .curves import VusParams, _as_scores, _check_two_class, auc_pr, auc_roc, r_auc, vus
from .ranged import RangeParams, range_pr
from .thresholds import ThresholdPolicy, point_adjust, point_metrics, threshold

LABEL_METRICS = ("Acc", "P", "R", "F1", "R-P", "R-R", "R-F1", "Aff-P", "Aff-R", "Aff-F1")
SCORE_METRICS = ("A-P", "A-R", "R-A-P", "R-A-R", "V-PR", "V-ROC")
METRIC_NAMES = LABEL_METRICS + SCORE_METRICS


def _label_metrics_at(preds: np.ndarray, truth: np.ndarray, range_params: RangeParams) -> dict[str, float]:
    row = point_metrics(preds, truth)
    row.update(range_pr(preds, truth, range_params))
    row.update(affiliation(preds, truth))
    return row


def evaluate_all(
    scores: ScoreSeries | np.ndarray,
    truth: np.ndarray,
    policy: ThresholdPolicy | None = None,
    range_params: RangeParams | None = None,
    vus_params: VusParams | None = None,
    enable_point_adjust: bool = False,
) -> tuple[MetricReport, dict[float, dict[str, float]]]:
    """Evaluate every metric of the suite.

    Score-based metrics are computed once from the raw scores and are never
    recomputed after point adjustment. Label-based metrics are computed at
    every threshold of the sweep; the report carries each one's best value
    and the percentile that produced it. Point adjustment is an experiment
    flag, off by default.
    """
    policy = policy or ThresholdPolicy()
    range_params = range_params or RangeParams()
    vus_params = vus_params or VusParams()
    score_values = _as_scores(scores)
    truth = _check_two_class(truth)
    if score_values.shape != truth.shape:
        raise ValueError("scores and truth must have equal length")

    entries: dict[str, float] = {
        "A-P": auc_pr(score_values, truth),
        "A-R": auc_roc(score_values, truth),
        "R-A-P": r_auc(score_values, truth, vus_params.ell_max, "pr"),
        "R-A-R": r_auc(score_values, truth, vus_params.ell_max, "roc"),
        "V-PR": vus(score_values, truth, vus_params, "pr"),
        "V-ROC": vus(score_values, truth, vus_params, "roc"),
    }

    per_threshold: dict[float, dict[str, float]] = {}
    for percentile in policy.percentiles:
        preds = threshold(score_values, percentile).preds
        if enable_point_adjust:
            preds = point_adjust(preds, truth)
        per_threshold[percentile] = _label_metrics_at(preds, truth, range_params)

    best_thresholds: dict[str, float] = {}
    for name in LABEL_METRICS:
        best_t = max(per_threshold, key=lambda t: (per_threshold[t][name], -t))
        entries[name] = per_threshold[best_t][name]
        best_thresholds[name] = best_t

    report = MetricReport(
        entries=entries,
        best_thresholds=best_thresholds,
        threshold_used=best_thresholds["F1"],
    )
    return report, per_threshold
