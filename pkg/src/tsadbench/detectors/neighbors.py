"""Distance-to-neighbor detectors over window features: KNN and LOF."""

from __future__ import annotations

import numpy as np

from .base import FeatureDetector

# chunk bounds the (chunk, n_ref, dim) broadcast below ~50MB while keeping
# the exact squared-difference formulation (the dot-product identity loses
# digits the oracle comparisons cannot afford)
_CHUNK = 128


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distances, rows of a against rows of b."""
    sq = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(np.maximum(sq, 0.0))


def _chunked_neighbor_dists(queries: np.ndarray, reference: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k nearest reference rows per query: (distances, indices), both (n, k)."""
    dists = np.empty((queries.shape[0], k))
    idx = np.empty((queries.shape[0], k), dtype=np.intp)
    for lo in range(0, queries.shape[0], _CHUNK):
        block = _pairwise(queries[lo : lo + _CHUNK], reference)
        order = np.argsort(block, axis=1, kind="stable")[:, :k]
        dists[lo : lo + _CHUNK] = np.take_along_axis(block, order, axis=1)
        idx[lo : lo + _CHUNK] = order
    return dists, idx


class Knn(FeatureDetector):
    """Distance to the k-th nearest train window."""

    kind = "knn"

    @property
    def k(self) -> int:
        return int(self.spec.hyperparams["k"])

    def min_feature_rows(self) -> int:
        return self.k

    def _fit_features(self, rows: np.ndarray) -> None:
        self._train = rows

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        dists, _ = _chunked_neighbor_dists(rows, self._train, self.k)
        return dists[:, -1]


class Lof(FeatureDetector):
    """Classic local outlier factor against the train windows.

    Train-internal k-distances and local reachability densities exclude the
    self match; query scoring keeps every train row (duplicates count as
    density evidence).
    """

    kind = "lof"

    @property
    def k(self) -> int:
        return int(self.spec.hyperparams["k"])

    def min_feature_rows(self) -> int:
        return self.k + 1

    def _fit_features(self, rows: np.ndarray) -> None:
        self._train = rows
        dists, idx = _chunked_neighbor_dists(rows, rows, self.k + 1)
        # drop the self column: distance 0 at the stable-sort front
        self._kdist = dists[:, -1]
        neighbor_dists = dists[:, 1:]
        neighbor_idx = idx[:, 1:]
        reach = np.maximum(self._kdist[neighbor_idx], neighbor_dists)
        self._lrd = 1.0 / np.maximum(reach.mean(axis=1), 1e-300)

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        dists, idx = _chunked_neighbor_dists(rows, self._train, self.k)
        reach = np.maximum(self._kdist[idx], dists)
        query_lrd = 1.0 / np.maximum(reach.mean(axis=1), 1e-300)
        return self._lrd[idx].mean(axis=1) / query_lrd
