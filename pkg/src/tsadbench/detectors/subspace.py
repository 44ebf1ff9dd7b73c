"""Principal-subspace reconstruction detector over window features."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateData
from .base import FeatureDetector


class Pca(FeatureDetector):
    """Reconstruction error outside the dominant train subspace.

    Keeps the smallest leading set of principal components whose explained
    variance reaches the `variance` fraction; the score is the Euclidean
    distance between a centered row and its projection onto that subspace.
    """

    kind = "pca"

    def _fit_features(self, rows: np.ndarray) -> None:
        self._mean = rows.mean(axis=0)
        centered = rows - self._mean
        _, singular, vt = np.linalg.svd(centered, full_matrices=False)
        variances = singular**2
        total = variances.sum()
        if total <= 0:
            raise DegenerateData("pca needs nonconstant train windows")
        target = float(self.spec.hyperparams["variance"])
        fractions = np.cumsum(variances) / total
        rank = int(np.searchsorted(fractions, target - 1e-12)) + 1
        self._basis = vt[:rank]

    def _score_features(self, rows: np.ndarray) -> np.ndarray:
        centered = rows - self._mean
        reconstructed = (centered @ self._basis.T) @ self._basis
        return np.sqrt(((centered - reconstructed) ** 2).sum(axis=1))
