"""Histogram-density detectors over window features: HBOS and LODA."""

from __future__ import annotations

import math

import numpy as np

from .base import FeatureDetector

_EPS = 1e-9


class _Histogram:
    """Equal-width density over the train range; out-of-range density is 0."""

    def __init__(self, values: np.ndarray, bins: int):
        self.lo = float(values.min())
        self.hi = float(values.max())
        if self.hi == self.lo:
            # degenerate range: one bin holding all mass
            self.edges = None
            self.density = np.array([1.0])
        else:
            counts, self.edges = np.histogram(values, bins=bins, range=(self.lo, self.hi))
            self.density = counts / values.size

    def lookup(self, values: np.ndarray) -> np.ndarray:
        if self.edges is None:
            return np.where(values == self.lo, 1.0, 0.0)
        idx = np.searchsorted(self.edges, values, side="right") - 1
        # the top edge belongs to the last bin, matching np.histogram
        idx = np.where(values == self.hi, len(self.density) - 1, idx)
        inside = (values >= self.lo) & (values <= self.hi)
        return np.where(inside, self.density[np.clip(idx, 0, len(self.density) - 1)], 0.0)


class Hbos(FeatureDetector):
    """Sum over features of the negative log histogram density."""

    kind = "hbos"

    def min_feature_rows(self) -> int:
        return 1

    def _fit_features(self, rows: np.ndarray) -> None:
        bins = int(self.spec.hyperparams["bins"])
        self._hists = [_Histogram(rows[:, j], bins) for j in range(rows.shape[1])]

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        out = np.zeros(rows.shape[0])
        for j, hist in enumerate(self._hists):
            out -= np.log(hist.lookup(rows[:, j]) + _EPS)
        return out


class Loda(FeatureDetector):
    """Mean negative log density over sparse random 1-D projections."""

    kind = "loda"

    def min_feature_rows(self) -> int:
        return 2

    def _fit_features(self, rows: np.ndarray) -> None:
        n_proj = int(self.spec.hyperparams["projections"])
        bins = int(self.spec.hyperparams["bins"])
        rng = np.random.default_rng(self.spec.seed)
        dim = rows.shape[1]
        nonzero = max(1, math.ceil(math.sqrt(dim)))
        self._vectors = np.zeros((n_proj, dim))
        for i in range(n_proj):
            idx = rng.choice(dim, size=nonzero, replace=False)
            self._vectors[i, idx] = rng.normal(0.0, 1.0, size=nonzero)
        projected = rows @ self._vectors.T
        self._hists = [_Histogram(projected[:, i], bins) for i in range(n_proj)]

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        projected = rows @ self._vectors.T
        out = np.zeros(rows.shape[0])
        for i, hist in enumerate(self._hists):
            out -= np.log(hist.lookup(projected[:, i]) + _EPS)
        return out / len(self._hists)
