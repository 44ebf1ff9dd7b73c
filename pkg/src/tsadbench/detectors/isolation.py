"""Isolation forest over window features."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .base import FeatureDetector


@lru_cache(maxsize=None)
def average_path_length(m: int) -> float:
    """Expected unsuccessful-search path length c(m) in a BST of m points.

    Uses the exact harmonic sum, so c(1) = 0 and c(2) = 1 exactly.
    """
    if m <= 1:
        return 0.0
    harmonic = sum(1.0 / i for i in range(1, m))
    return 2.0 * harmonic - 2.0 * (m - 1) / m


class _Tree:
    """One isolation tree stored as parallel node arrays."""

    __slots__ = ("feature", "threshold", "left", "right", "leaf_size")

    def __init__(self):
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.leaf_size: list[int] = []

    def _add(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_size.append(0)
        return len(self.feature) - 1

    def build(self, rows: np.ndarray, depth_limit: int, rng: np.random.Generator) -> None:
        stack = [(rows, 0, self._add())]
        while stack:
            block, depth, node = stack.pop()
            spread = block.max(axis=0) - block.min(axis=0)
            splittable = np.flatnonzero(spread > 0)
            if depth >= depth_limit or block.shape[0] <= 1 or splittable.size == 0:
                self.leaf_size[node] = block.shape[0]
                continue
            q = int(rng.choice(splittable))
            lo, hi = block[:, q].min(), block[:, q].max()
            cut = float(rng.uniform(lo, hi))
            mask = block[:, q] < cut
            self.feature[node] = q
            self.threshold[node] = cut
            self.left[node] = self._add()
            self.right[node] = self._add()
            stack.append((block[mask], depth + 1, self.left[node]))
            stack.append((block[~mask], depth + 1, self.right[node]))

    def path_length(self, row: np.ndarray) -> float:
        node, depth = 0, 0
        while self.feature[node] >= 0:
            node = self.left[node] if row[self.feature[node]] < self.threshold[node] else self.right[node]
            depth += 1
        return depth + average_path_length(self.leaf_size[node])


class IForest(FeatureDetector):
    """Score 2^(-E[path length]/c(sample size)); 0.5 marks average isolation."""

    kind = "iforest"

    def _fit_features(self, rows: np.ndarray) -> None:
        trees = int(self.spec.hyperparams["trees"])
        subsample = min(int(self.spec.hyperparams["subsample"]), rows.shape[0])
        rng = np.random.default_rng(self.spec.seed)
        depth_limit = math.ceil(math.log2(max(subsample, 2)))
        self._trees = []
        for _ in range(trees):
            sample = rows[rng.choice(rows.shape[0], size=subsample, replace=False)]
            tree = _Tree()
            tree.build(sample, depth_limit, rng)
            self._trees.append(tree)
        self._norm = average_path_length(subsample)

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        out = np.empty(rows.shape[0])
        for i, row in enumerate(rows):
            mean_path = sum(tree.path_length(row) for tree in self._trees) / len(self._trees)
            out[i] = 2.0 ** (-mean_path / self._norm)
        return out
