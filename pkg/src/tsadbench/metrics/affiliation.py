"""Affiliation precision/recall: event-local directed distances normalized
against a random-prediction baseline.

The axis is partitioned into one zone per truth event, split at midpoints
between consecutive events. Within each zone the average directed distance
(predictions to event for precision, event to predictions for recall) is
converted into the probability that a single uniformly random point in the
zone would do at least as badly. Zones without predictions contribute recall
0 and are excluded from the precision average; with no predictions anywhere
both sides are 0 by convention.
"""

from __future__ import annotations

import numpy as np

from ..core import AnomalyEvent, extract_events
from ..errors import NoTruthEvents


def _zone_bounds(events: list[AnomalyEvent], length: int) -> list[int]:
    bounds = [0]
    for left, right in zip(events, events[1:]):
        bounds.append((left.end + right.start) // 2)
    bounds.append(length)
    return bounds


def _distance_to_event(indices: np.ndarray, event: AnomalyEvent) -> np.ndarray:
    below = np.maximum(event.start - indices, 0)
    above = np.maximum(indices - (event.end - 1), 0)
    return (below + above).astype(np.float64)


def affiliation(preds: np.ndarray, truth: np.ndarray) -> dict[str, float]:
    """Affiliation precision, recall, and their harmonic mean."""
    preds = np.asarray(preds).ravel()
    truth = np.asarray(truth).ravel()
    if preds.shape != truth.shape:
        raise ValueError("preds and truth must have equal length")
    events = extract_events(truth)
    if not events:
        raise NoTruthEvents("affiliation metrics need at least one truth event")
    length = truth.shape[0]
    pred_idx = np.flatnonzero(preds)
    bounds = _zone_bounds(events, length)

    precision_probs: list[float] = []
    recall_probs: list[float] = []
    for event, z_start, z_end in zip(events, bounds, bounds[1:]):
        zone = np.arange(z_start, z_end)
        zone_preds = pred_idx[(pred_idx >= z_start) & (pred_idx < z_end)]
        if zone_preds.size == 0:
            recall_probs.append(0.0)
            continue

        zone_dist = _distance_to_event(zone, event)
        observed_p = _distance_to_event(zone_preds, event).mean()
        precision_probs.append(float((zone_dist >= observed_p).mean()))

        event_points = np.arange(event.start, event.end)
        observed_r = np.abs(event_points[:, None] - zone_preds[None, :]).min(axis=1).mean()
        baseline_r = np.abs(event_points[None, :] - zone[:, None]).mean(axis=1)
        recall_probs.append(float((baseline_r >= observed_r).mean()))

    aff_p = float(np.mean(precision_probs)) if precision_probs else 0.0
    aff_r = float(np.mean(recall_probs))
    aff_f1 = 2 * aff_p * aff_r / (aff_p + aff_r) if aff_p + aff_r else 0.0
    return {"Aff-P": aff_p, "Aff-R": aff_r, "Aff-F1": aff_f1}
