"""Per-point detectors on the raw series: z-score and autoregressive
one-step-ahead forecasting."""

from __future__ import annotations

import numpy as np

from .base import ChannelDetector, Detector

_STD_FLOOR = 1e-12


class ZScore(ChannelDetector):
    """Absolute standardized deviation from the train mean, max over channels.

    With an empty train segment the statistics come from the scored series
    itself (test-only mode).
    """

    kind = "zscore"
    accepts_empty_train = True

    def _fit(self, train: np.ndarray) -> None:
        self._mean = train.mean(axis=0)
        self._std = np.maximum(train.std(axis=0), _STD_FLOOR)

    def _fit_empty(self) -> None:
        self._mean = None
        self._std = None

    def _score_channel(self, x: np.ndarray, channel: int) -> np.ndarray:
        if self._mean is None:
            mean, std = x.mean(), max(x.std(), _STD_FLOOR)
        else:
            mean, std = self._mean[channel], self._std[channel]
        return np.abs(x - mean) / std


class ArForecast(Detector):
    """Least-squares AR(order) per channel; score = forecast residual norm.

    Each test point is predicted from the preceding test points (the first
    `order` points see an edge-padded history), so scoring needs no train
    context and the residual is comparable across strategies.
    """

    kind = "ar_forecast"

    @property
    def order(self) -> int:
        return int(self.spec.hyperparams["order"])

    def min_train_rows(self) -> int:
        return self.order + 2

    def _fit(self, train: np.ndarray) -> None:
        self._coef = []
        for d in range(train.shape[1]):
            x = train[:, d]
            design = self._design(x)[self.order :]
            target = x[self.order :]
            coef, *_ = np.linalg.lstsq(design, target, rcond=None)
            self._coef.append(coef)

    def _design(self, x: np.ndarray) -> np.ndarray:
        # row t = [x[t-1], ..., x[t-order], 1], edge-padded before the start
        padded = np.concatenate([np.full(self.order, x[0]), x])
        lags = np.column_stack(
            [padded[self.order - 1 - j : self.order - 1 - j + x.size] for j in range(self.order)]
        )
        return np.column_stack([lags, np.ones(x.size)])

    def _score(self, test: np.ndarray, overlap: str) -> np.ndarray:
        residuals = np.empty_like(test)
        for d in range(test.shape[1]):
            predicted = self._design(test[:, d]) @ self._coef[d]
            residuals[:, d] = test[:, d] - predicted
        return np.sqrt((residuals**2).sum(axis=1))
