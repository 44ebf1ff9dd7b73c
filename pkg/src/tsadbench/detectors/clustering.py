"""Centroid-based detectors over window features: KMeans and CBLOF."""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientTrainData
from .base import FeatureDetector

_RESTARTS = 10
_MAX_ITER = 100


def _dists_to(rows: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    sq = ((rows[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(np.maximum(sq, 0.0))


def _kmeans_pp(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centroids = np.empty((k, rows.shape[1]))
    centroids[0] = rows[rng.integers(rows.shape[0])]
    d2 = ((rows - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            centroids[j] = rows[rng.choice(rows.shape[0], p=d2 / total)]
        else:
            centroids[j] = rows[rng.integers(rows.shape[0])]
        d2 = np.minimum(d2, ((rows - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(rows: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Iterate to a fixed point; empty clusters re-seed at the worst-fit row."""
    k = centroids.shape[0]
    assign = None
    for _ in range(_MAX_ITER):
        dists = _dists_to(rows, centroids)
        new_assign = dists.argmin(axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = rows[assign == j]
            if members.shape[0]:
                centroids[j] = members.mean(axis=0)
            else:
                centroids[j] = rows[dists.min(axis=1).argmax()]
    dists = _dists_to(rows, centroids)
    assign = dists.argmin(axis=1)
    inertia = float((dists.min(axis=1) ** 2).sum())
    return centroids, assign, inertia


def fit_kmeans(rows: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Best of several seeded kmeans++ / Lloyd restarts by inertia."""
    if rows.shape[0] < k:
        raise InsufficientTrainData(f"kmeans needs at least k={k} rows, got {rows.shape[0]}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(_RESTARTS):
        centroids, assign, inertia = _lloyd(rows, _kmeans_pp(rows, k, rng))
        if best is None or inertia < best[2]:
            best = (centroids.copy(), assign, inertia)
    return best[0], best[1]


class KMeans(FeatureDetector):
    """Distance to the nearest train centroid."""

    kind = "kmeans"

    @property
    def k(self) -> int:
        return int(self.spec.hyperparams["k"])

    def min_feature_rows(self) -> int:
        return self.k

    def _fit_features(self, rows: np.ndarray) -> None:
        self._centroids, _ = fit_kmeans(rows, self.k, self.spec.seed)

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        return _dists_to(rows, self._centroids).min(axis=1)


class Cblof(FeatureDetector):
    """Cluster-based LOF: size-weighted centroid distances.

    Clusters sorted by size form the large set as the smallest prefix
    holding at least `alpha` of the training mass. A row assigned to a large
    cluster scores its own centroid distance; a small-cluster row scores its
    distance to the nearest large centroid. Both are weighted by the
    assigned cluster's size.
    """

    kind = "cblof"

    @property
    def k(self) -> int:
        return int(self.spec.hyperparams["k"])

    def min_feature_rows(self) -> int:
        return self.k

    def _fit_features(self, rows: np.ndarray) -> None:
        self._centroids, assign = fit_kmeans(rows, self.k, self.spec.seed)
        self._sizes = np.bincount(assign, minlength=self.k).astype(np.float64)
        order = np.argsort(-self._sizes, kind="stable")
        covered = np.cumsum(self._sizes[order])
        alpha = float(self.spec.hyperparams["alpha"])
        cut = int(np.searchsorted(covered, alpha * rows.shape[0] - 1e-9)) + 1
        self._large = np.zeros(self.k, dtype=bool)
        self._large[order[:cut]] = True

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        dists = _dists_to(rows, self._centroids)
        assign = dists.argmin(axis=1)
        own = dists[np.arange(rows.shape[0]), assign]
        to_large = dists[:, self._large].min(axis=1)
        raw = np.where(self._large[assign], own, to_large)
        return self._sizes[assign] * raw
