"""Left matrix profile detector: distance to the nearest earlier subsequence."""

from __future__ import annotations

import numpy as np

from ..errors import WindowTooLarge
from .base import ChannelDetector


def znormalize_rows(rows: np.ndarray) -> np.ndarray:
    """Z-normalize each row; near-constant rows map to the zero vector."""
    mean = rows.mean(axis=1, keepdims=True)
    std = rows.std(axis=1, keepdims=True)
    flat = std[:, 0] < 1e-12
    out = np.where(flat[:, None], 0.0, (rows - mean) / np.where(flat[:, None], 1.0, std))
    return out


def left_profile(x: np.ndarray, window: int) -> np.ndarray:
    """Per-subsequence min z-normalized distance to any earlier subsequence.

    The first subsequence has no left neighbor and scores 0.
    """
    if x.size < window:
        raise WindowTooLarge(f"window {window} exceeds segment length {x.size}")
    subs = np.lib.stride_tricks.sliding_window_view(x, window)
    normed = znormalize_rows(subs)
    n = normed.shape[0]
    profile = np.zeros(n)
    for i in range(1, n):
        diffs = normed[:i] - normed[i]
        profile[i] = np.sqrt(np.maximum((diffs * diffs).sum(axis=1).min(), 0.0))
    return profile


class MatrixProfile(ChannelDetector):
    """Streaming-style discord score; a point takes the max profile value
    over the subsequences covering it."""

    kind = "matrix_profile"
    accepts_empty_train = True

    def _fit(self, train: np.ndarray) -> None:
        pass

    def _fit_empty(self) -> None:
        pass

    def _score_channel(self, x: np.ndarray, channel: int) -> np.ndarray:
        window = self.spec.window
        profile = left_profile(x, window)
        out = np.zeros(x.size)
        for i, value in enumerate(profile):
            out[i : i + window] = np.maximum(out[i : i + window], value)
        return out
