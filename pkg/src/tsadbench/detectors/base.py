"""Detector base classes: the universal fit/score contract and the shared
window-embedding plumbing.

Every detector consumes a (T, D) float matrix and emits one non-negative
anomaly score per test point, higher meaning more anomalous. Feature
detectors see the data as flattened length-w windows: stride 1 on train
(richest sample), protocol windows on test. Channel detectors score each
channel as a 1-D series and aggregate channels by max.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InsufficientTrainData, WindowTooLarge
from ..windowing import WindowPolicy, expand_windows, scores_to_points


def as_matrix(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise ValueError(f"expected a (T, D) matrix, got shape {values.shape}")
    return values


def window_features(values: np.ndarray, window: int) -> np.ndarray:
    """Stride-1 embedding of a (T, D) matrix into (T-w+1, w*D) rows."""
    if values.shape[0] < window:
        raise WindowTooLarge(f"window {window} exceeds segment length {values.shape[0]}")
    view = sliding_window_view(values, (window, values.shape[1]))[:, 0]
    return view.reshape(view.shape[0], -1)


class Detector(ABC):
    """One detector instance bound to its spec; fit once, score many."""

    kind: str
    accepts_empty_train = False

    def __init__(self, spec):
        self.spec = spec
        self.fitted = False

    def min_train_rows(self) -> int:
        """Smallest train length fit accepts (0 when empty train is fine)."""
        return 0 if self.accepts_empty_train else 2

    def fit(self, train) -> "Detector":
        train = as_matrix(train) if train is not None else np.empty((0, 1))
        if train.shape[0] == 0 and self.accepts_empty_train:
            self._fit_empty()
        elif train.shape[0] < self.min_train_rows():
            raise InsufficientTrainData(
                f"{self.kind} needs at least {self.min_train_rows()} train rows, got {train.shape[0]}"
            )
        else:
            self._fit(train)
        self.fitted = True
        return self

    def score(self, test, overlap: str = "non_overlapping") -> np.ndarray:
        if not self.fitted:
            raise RuntimeError(f"{self.kind} must be fit before scoring")
        test = as_matrix(test)
        out = self._score(test, overlap)
        return np.ascontiguousarray(out, dtype=np.float64)

    @abstractmethod
    def _fit(self, train: np.ndarray) -> None: ...

    def _fit_empty(self) -> None:
        raise InsufficientTrainData(f"{self.kind} cannot fit on an empty train segment")

    @abstractmethod
    def _score(self, test: np.ndarray, overlap: str) -> np.ndarray: ...


class FeatureDetector(Detector):
    """Scores flattened windows; subclasses see only feature rows."""

    def min_feature_rows(self) -> int:
        return 2

    def min_train_rows(self) -> int:
        return self.spec.window + self.min_feature_rows() - 1

    def _fit(self, train: np.ndarray) -> None:
        self._fit_features(window_features(train, self.spec.window))

    def _score(self, test: np.ndarray, overlap: str) -> np.ndarray:
        policy = WindowPolicy(window=self.spec.window, overlap=overlap)
        spans = expand_windows(test.shape[0], policy)
        rows = np.stack([test[s:e].reshape(-1) for s, e in spans])
        return scores_to_points(self._score_features(rows), test.shape[0], policy)

    @abstractmethod
    def _fit_features(self, rows: np.ndarray) -> None: ...

    @abstractmethod
    def _score_features(self, rows: np.ndarray) -> np.ndarray: ...


class ChannelDetector(Detector):
    """Scores each channel independently and aggregates by max."""

    def _score(self, test: np.ndarray, overlap: str) -> np.ndarray:
        per_channel = np.stack(
            [self._score_channel(test[:, d], d) for d in range(test.shape[1])]
        )
        return per_channel.max(axis=0)

    @abstractmethod
    def _score_channel(self, x: np.ndarray, channel: int) -> np.ndarray: ...
