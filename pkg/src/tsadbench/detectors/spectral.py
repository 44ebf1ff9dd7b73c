"""Frequency-domain channel detectors: spectral residual saliency and
multi-level Haar wavelet deviation."""

from __future__ import annotations

import numpy as np

from .base import ChannelDetector

_EPS = 1e-12


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    """Centered moving average with edge replication, same length."""
    half = width // 2
    padded = np.concatenate([np.full(half, x[0]), x, np.full(width - 1 - half, x[-1])])
    kernel = np.ones(width) / width
    return np.convolve(padded, kernel, mode="valid")


class SpectralResidual(ChannelDetector):
    """Saliency of the log-amplitude spectrum after removing its local trend.

    Needs no training; a flat spectrum (constant series) yields a flat
    saliency map and near-zero scores.
    """

    kind = "spectral_residual"
    accepts_empty_train = True

    def _fit(self, train: np.ndarray) -> None:
        pass

    def _fit_empty(self) -> None:
        pass

    def _score_channel(self, x: np.ndarray, channel: int) -> np.ndarray:
        spectrum = np.fft.fft(x)
        amplitude = np.abs(spectrum)
        log_amp = np.log(amplitude + _EPS)
        q = int(self.spec.hyperparams["q"])
        residual = log_amp - _moving_average(log_amp, q)
        # a dead frequency must stay dead: the log ratio turns 0/0 into
        # exp(0) = 1, which plants a spurious impulse on constant series
        live = amplitude > 1e-9 * amplitude.max() if amplitude.max() > 0 else np.zeros(x.size, bool)
        phase = np.angle(spectrum)
        saliency_spectrum = np.where(live, np.exp(residual), 0.0) * np.exp(1j * phase)
        saliency = np.abs(np.fft.ifft(saliency_spectrum))
        base = saliency.mean()
        return (saliency - base) / (base + _EPS)


class DwtMlead(ChannelDetector):
    """Max across Haar decomposition levels of the detail-coefficient z-score.

    Each level's detail coefficients are standardized against that level's
    own statistics and broadcast back onto the dyadic span of original
    points they summarize.
    """

    kind = "dwt_mlead"
    accepts_empty_train = True

    def _fit(self, train: np.ndarray) -> None:
        pass

    def _fit_empty(self) -> None:
        pass

    def _score_channel(self, x: np.ndarray, channel: int) -> np.ndarray:
        size = x.size
        out = np.zeros(size)
        # pad to a power of two by edge replication so every level pairs up
        padded_len = 1 << max(1, int(np.ceil(np.log2(max(size, 2)))))
        approx = np.concatenate([x, np.full(padded_len - size, x[-1])])
        level = 0
        while approx.size >= 2:
            level += 1
            pairs = approx.reshape(-1, 2)
            detail = (pairs[:, 0] - pairs[:, 1]) / np.sqrt(2.0)
            approx = (pairs[:, 0] + pairs[:, 1]) / np.sqrt(2.0)
            if detail.size < 2:
                break
            z = np.abs(detail - detail.mean()) / (detail.std() + _EPS)
            span = 1 << level
            starts = np.arange(detail.size) * span
            for i, start in enumerate(starts):
                if start >= size:
                    break
                stop = min(start + span, size)
                out[start:stop] = np.maximum(out[start:stop], z[i])
        return out
