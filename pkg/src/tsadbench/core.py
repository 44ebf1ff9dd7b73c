"""Shared value types: series, splits, scores, events, reports, manifests.

Everything here is immutable after construction so that runs cannot
accidentally mutate their inputs mid-benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import NonFiniteValue


class AnomalyEvent(NamedTuple):
    """Half-open index interval [start, end) of consecutive anomalous points."""

    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeSeries:
    """A labelled series: values is (T, D) float64, labels is (T,) in {0, 1}."""

    name: str
    values: np.ndarray
    labels: np.ndarray
    domain: str = "unknown"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] == 0:
            raise ValueError(f"values must be a non-empty (T, D) matrix, got shape {values.shape}")
        if not np.isfinite(values).all():
            raise NonFiniteValue(f"series {self.name!r} contains non-finite values")
        labels = np.asarray(self.labels)
        if labels.shape != (values.shape[0],):
            raise ValueError(f"labels must be one per time step, got shape {labels.shape}")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be binary")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "labels", _freeze(labels.astype(np.uint8)))

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def anomaly_ratio(self) -> float:
        return float(self.labels.mean())

    def events(self) -> list[AnomalyEvent]:
        return extract_events(self.labels)


@dataclass(frozen=True)
class Split:
    """Segment boundaries: train [0, train_end), val [train_end, val_end),
    test [val_end, test_end)."""

    train_end: int
    val_end: int
    test_end: int

    def __post_init__(self) -> None:
        if not 0 <= self.train_end <= self.val_end <= self.test_end:
            raise ValueError(f"split boundaries out of order: {self}")

    @property
    def train_length(self) -> int:
        return self.train_end

    @property
    def val_length(self) -> int:
        return self.val_end - self.train_end

    @property
    def test_length(self) -> int:
        return self.test_end - self.val_end


@dataclass(frozen=True)
class ScoreSeries:
    """Per-point anomaly scores for a segment; higher means more anomalous.

    aligned_offset is the absolute index of the first scored point, so scores
    can always be mapped back onto the full series.
    """

    scores: np.ndarray
    aligned_offset: int = 0

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64).ravel()
        if scores.shape[0] == 0:
            raise ValueError("empty score vector")
        if not np.isfinite(scores).all():
            raise NonFiniteValue("scores contain non-finite values")
        if self.aligned_offset < 0:
            raise ValueError("aligned_offset must be non-negative")
        object.__setattr__(self, "scores", _freeze(scores))

    @property
    def length(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class PredictionSeries:
    """Binary predictions produced by thresholding a ScoreSeries."""

    preds: np.ndarray
    percentile: float | None = None
    aligned_offset: int = 0

    def __post_init__(self) -> None:
        preds = np.asarray(self.preds).ravel()
        if not np.isin(preds, (0, 1)).all():
            raise ValueError("predictions must be binary")
        object.__setattr__(self, "preds", _freeze(preds.astype(np.uint8)))

    @property
    def length(self) -> int:
        return self.preds.shape[0]

    def events(self) -> list[AnomalyEvent]:
        return extract_events(self.preds)


@dataclass(frozen=True)
class MetricReport:
    """One evaluation outcome: metric name -> value.

    Label-based metrics are reported at their best threshold over the sweep;
    best_thresholds records the producing percentile per metric and
    threshold_used the percentile behind the reported F1.
    """

    entries: dict[str, float]
    best_thresholds: dict[str, float] = field(default_factory=dict)
    threshold_used: float | None = None

    def __getitem__(self, key: str) -> float:
        return self.entries[key]


@dataclass(frozen=True)
class RunRecord:
    """Full provenance of a single (detector, series, strategy) run."""

    run_id: str
    detector_id: str
    kind: str
    hyperparams: dict
    window: int
    strategy: str
    series_name: str
    dataset: str
    tags: dict = field(default_factory=dict)
    seed: int | None = None
    train_seconds: float = 0.0
    infer_seconds: float = 0.0
    peak_memory_bytes: int | None = None
    report: MetricReport | None = None
    per_threshold: dict[float, dict[str, float]] | None = None
    status: str = "ok"
    error: str | None = None
    zero_shot_fit_on_test: bool = False

    def __post_init__(self) -> None:
        if self.train_seconds < 0 or self.infer_seconds < 0:
            raise ValueError("timings must be non-negative")
        if self.status not in ("ok", "failed"):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "failed" and self.report is not None:
            raise ValueError("failed runs must not carry metrics")


@dataclass(frozen=True)
class ManifestEntry:
    """One series as listed in a corpus manifest."""

    name: str
    path: str
    domain: str
    dim: int
    length: int
    anomaly_ratio: float
    train_end: int | None = None
    val_end: int | None = None
    tags: dict = field(default_factory=dict)

    @property
    def dataset(self) -> str:
        """Named group the series belongs to; falls back to the domain."""
        return str(self.tags.get("dataset", self.domain))


@dataclass(frozen=True)
class DatasetManifest:
    """An ordered corpus listing, as persisted in manifest.json."""

    entries: tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("manifest series names must be unique")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def by_name(self, name: str) -> ManifestEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)


def extract_events(labels: np.ndarray) -> list[AnomalyEvent]:
    """Return maximal runs of 1s as half-open [start, end) events."""
    labels = np.asarray(labels).ravel().astype(bool)
    if labels.size == 0:
        return []
    padded = np.diff(labels.astype(np.int8), prepend=0, append=0)
    starts = np.flatnonzero(padded == 1)
    ends = np.flatnonzero(padded == -1)
    return [AnomalyEvent(int(s), int(e)) for s, e in zip(starts, ends)]


def render_events(events: list[AnomalyEvent] | list[tuple[int, int]], length: int) -> np.ndarray:
    """Paint events onto a zero vector of the given length.

    Inverse of extract_events for sorted events separated by at least one
    normal point.
    """
    out = np.zeros(length, dtype=np.uint8)
    for start, end in events:
        if not 0 <= start < end <= length:
            raise ValueError(f"event ({start}, {end}) outside [0, {length})")
        out[start:end] = 1
    return out
