"""Evaluation metric suite: thresholding, point/range/affiliation metrics,
AUCs, buffered AUCs, and volume-under-surface."""

from .affiliation import affiliation
from .curves import VusParams, auc_pr, auc_roc, r_auc, smooth_labels, vus
from .evaluate import LABEL_METRICS, METRIC_NAMES, SCORE_METRICS, evaluate_all
from .ranged import RangeParams, range_pr
from .thresholds import (
    DEFAULT_PERCENTILES,
    ThresholdPolicy,
    point_adjust,
    point_metrics,
    threshold,
)

__all__ = [
    "DEFAULT_PERCENTILES",
    "LABEL_METRICS",
    "METRIC_NAMES",
    "RangeParams",
    "SCORE_METRICS",
    "ThresholdPolicy",
    "VusParams",
    "affiliation",
    "auc_pr",
    "auc_roc",
    "evaluate_all",
    "point_adjust",
    "point_metrics",
    "r_auc",
    "range_pr",
    "smooth_labels",
    "threshold",
    "vus",
]
