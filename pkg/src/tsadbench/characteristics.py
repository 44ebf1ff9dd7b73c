"""Data-characteristic scores (trend, seasonality, shifting, transition,
stationarity) and series tagging.

The scores are module-local definitions: each is a deterministic statistic in
[0, 1], and a characteristic is flagged when its score clears a threshold.
Thresholds live in CharacteristicThresholds so they can be tuned per corpus
without code changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats


@dataclass(frozen=True)
class CharacteristicThresholds:
    """Flag cutoffs; a characteristic is present when score >= threshold."""

    trend: float = 0.6
    seasonality: float = 0.5
    shifting: float = 0.3
    stationarity: float = 0.7


@dataclass(frozen=True)
class CharacteristicProfile:
    """Scores, flags, and the dominant period for one series.

    Multivariate series carry one profile per channel plus majority-vote
    aggregate flags; aggregate scores are channel means.
    """

    trend_score: float
    trend: bool
    seasonality_score: float
    period: int | None
    seasonality: bool
    shifting_score: float
    shifting: bool
    transition: bool
    stationarity_score: float
    stationarity: bool
    channels: tuple["CharacteristicProfile", ...] = ()

    def flags(self) -> dict[str, bool]:
        return {
            "trend": self.trend,
            "seasonality": self.seasonality,
            "shifting": self.shifting,
            "transition": self.transition,
            "stationarity": self.stationarity,
        }

    def to_dict(self) -> dict:
        out = {
            "trend": {"score": self.trend_score, "flag": self.trend},
            "seasonality": {
                "score": self.seasonality_score,
                "period": self.period,
                "flag": self.seasonality,
            },
            "shifting": {"score": self.shifting_score, "flag": self.shifting},
            "transition": {"flag": self.transition},
            "stationarity": {"score": self.stationarity_score, "flag": self.stationarity},
        }
        if self.channels:
            out["channels"] = [c.to_dict() for c in self.channels]
        return out


def _as_channel(series) -> np.ndarray:
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if values.ndim == 2:
        if values.shape[1] != 1:
            raise ValueError("expected a univariate series")
        values = values[:, 0]
    return values


def _detrend(x: np.ndarray) -> np.ndarray:
    t = np.arange(x.size, dtype=np.float64)
    slope, intercept = np.polyfit(t, x, 1)
    return x - (slope * t + intercept)


def trend_score(series) -> float:
    """Variance fraction explained by an ordinary least-squares line."""
    x = _as_channel(series)
    if x.size < 8:
        raise ValueError("trend_score needs at least 8 points")
    total_var = x.var()
    if total_var < 1e-24:
        return 0.0
    return float(max(0.0, 1.0 - _detrend(x).var() / total_var))


def lag_correlations(series) -> tuple[np.ndarray, np.ndarray]:
    """Per-lag Pearson correlation of the detrended series with its shift.

    Returns (lags, correlations) for lags 2..T/2; both shifted segments are
    re-centered per lag, so amplitude and offset are irrelevant.
    """
    x = _as_channel(series)
    size = x.size
    if size < 16:
        raise ValueError("lag correlations need at least 16 points")
    y = _detrend(x)
    max_lag = size // 2

    # all lag statistics in O(T log T): cross terms by FFT autocorrelation,
    # segment sums and squares by prefix sums
    padded = np.fft.rfft(y, 2 * size)
    cross_full = np.fft.irfft(padded * np.conj(padded), 2 * size)[:size]
    csum = np.concatenate(([0.0], np.cumsum(y)))
    csum2 = np.concatenate(([0.0], np.cumsum(y * y)))

    lags = np.arange(2, max_lag + 1)
    n = size - lags
    sum_ab = cross_full[lags]
    sum_a = csum[size - lags]
    sum_b = csum[size] - csum[lags]
    sum_a2 = csum2[size - lags]
    sum_b2 = csum2[size] - csum2[lags]
    cov = sum_ab - sum_a * sum_b / n
    var_a = sum_a2 - sum_a**2 / n
    var_b = sum_b2 - sum_b**2 / n
    denom = np.sqrt(np.maximum(var_a, 0.0) * np.maximum(var_b, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 1e-12, cov / np.maximum(denom, 1e-300), 0.0)
    return lags, corr


def seasonality_score(series) -> tuple[float, int]:
    """Strongest lag correlation of the detrended series.

    Scans lags 2..T/2 and returns (max correlation clamped to [0, 1],
    argmax lag). The first lag attaining the maximum wins ties.
    """
    lags, corr = lag_correlations(series)
    # ties (e.g. exact lag multiples of a pure tone) go to the smallest lag;
    # the epsilon absorbs float jitter between mathematically equal peaks
    best = int(np.flatnonzero(corr >= corr.max() - 1e-9)[0])
    return float(min(1.0, max(0.0, corr[best]))), int(lags[best])


def shifting_score(series) -> float:
    """Two-sample Kolmogorov-Smirnov statistic between the series halves."""
    x = _as_channel(series)
    half = x.size // 2
    return float(_scipy_stats.ks_2samp(x[:half], x[half:]).statistic)


def stationarity_score(series) -> float:
    """One minus the normalized dispersion of rolling means and stds.

    The series is cut into 10 equal windows; the score is
    1 - std(window means)/overall std - std(window stds)/overall std,
    clamped to [0, 1]. A constant series scores 1.
    """
    x = _as_channel(series)
    if x.size < 10:
        raise ValueError("stationarity_score needs at least 10 points")
    overall = x.std()
    if overall < 1e-12:
        return 1.0
    windows = np.array_split(x, 10)
    means = np.array([w.mean() for w in windows])
    stds = np.array([w.std() for w in windows])
    score = 1.0 - means.std() / overall - stds.std() / overall
    return float(min(1.0, max(0.0, score)))


def _classify_channel(x: np.ndarray, thresholds: CharacteristicThresholds) -> CharacteristicProfile:
    t_score = trend_score(x)
    s_score, period = seasonality_score(x)
    sh_score = shifting_score(x)
    st_score = stationarity_score(x)
    t_flag = t_score >= thresholds.trend
    s_flag = s_score >= thresholds.seasonality
    return CharacteristicProfile(
        trend_score=t_score,
        trend=t_flag,
        seasonality_score=s_score,
        period=period if s_flag else None,
        seasonality=s_flag,
        shifting_score=sh_score,
        shifting=sh_score >= thresholds.shifting,
        transition=t_flag and s_flag,
        stationarity_score=st_score,
        stationarity=st_score >= thresholds.stationarity,
    )


def classify(series, thresholds: CharacteristicThresholds | None = None) -> CharacteristicProfile:
    """Compute the five characteristics; multivariate flags by majority vote."""
    thresholds = thresholds or CharacteristicThresholds()
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    profiles = [_classify_channel(values[:, d], thresholds) for d in range(values.shape[1])]
    if len(profiles) == 1:
        return profiles[0]

    majority = len(profiles) / 2

    def vote(flag_name: str) -> bool:
        return sum(1 for p in profiles if getattr(p, flag_name)) > majority

    trend_flag = vote("trend")
    seasonality_flag = vote("seasonality")
    flagged_periods = sorted(p.period for p in profiles if p.period is not None)
    period = flagged_periods[0] if seasonality_flag and flagged_periods else None
    return CharacteristicProfile(
        trend_score=float(np.mean([p.trend_score for p in profiles])),
        trend=trend_flag,
        seasonality_score=float(np.mean([p.seasonality_score for p in profiles])),
        period=period,
        seasonality=seasonality_flag,
        shifting_score=float(np.mean([p.shifting_score for p in profiles])),
        shifting=vote("shifting"),
        transition=trend_flag and seasonality_flag,
        stationarity_score=float(np.mean([p.stationarity_score for p in profiles])),
        stationarity=vote("stationarity"),
        channels=tuple(profiles),
    )
