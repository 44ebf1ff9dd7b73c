"""Synthetic corpus generation: sinusoidal bases plus a six-kind anomaly
taxonomy (global, contextual, shapelet, seasonal, trend, mixed).

Anomalies are injected only inside the test segment so the train segment
stays clean for semi-supervised detectors. Generation is a pure function of
the specs: the same seeds always produce bit-identical corpora.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .characteristics import classify, lag_correlations
from .core import AnomalyEvent, DatasetManifest, ManifestEntry, Split, TimeSeries
from .errors import RegionOverflow
from .ingest import save_manifest, save_series, split_series

KINDS = ("global", "contextual", "shapelet", "seasonal", "trend", "mixed")
POINT_KINDS = ("global", "contextual")
SUBSEQUENCE_KINDS = ("shapelet", "seasonal", "trend")

# magnitudes in units of the relevant sigma; chosen so global spikes are
# near-trivial for a z-score detector while contextual stays in-range
DEFAULT_MAGNITUDES = {"global": 8.0, "contextual": 3.0, "trend": 3.0}

_MAX_ANOMALY_RATIO = 0.10
_POINT_GAP = 6  # keeps every 11-point neighborhood free of other injections
_REGION_GAP = 8


@dataclass(frozen=True)
class BaseSignalSpec:
    """Carrier signal: a*sin(2*pi*t/p) + m*t + N(0, sigma^2) noise."""

    length: int
    dim: int = 1
    period: float = 48.0
    amplitude: float = 1.0
    slope: float = 0.0
    noise_std: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.length < 1 or self.dim < 1:
            raise ValueError("length and dim must be positive")
        if self.period < 4:
            raise ValueError("period must be at least 4")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")


@dataclass(frozen=True)
class AnomalySpec:
    """What to inject: kind, how many regions, how long, how strong.

    length None resolves to 1 for point kinds and to the series' fitted
    period for subsequence kinds; magnitude None resolves to the kind
    default (units of the relevant sigma).
    """

    kind: str
    count: int = 1
    length: int | None = None
    magnitude: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.length is not None and self.length < 1:
            raise ValueError("length must be positive")


def gen_base(spec: BaseSignalSpec, name: str = "base") -> TimeSeries:
    """Generate a clean labeled-normal carrier series."""
    t = np.arange(spec.length, dtype=np.float64)
    signal = spec.amplitude * np.sin(2 * np.pi * t / spec.period) + spec.slope * t
    rng = np.random.default_rng(spec.seed)
    noise = rng.normal(0.0, spec.noise_std, size=(spec.length, spec.dim))
    values = signal[:, None] + noise
    return TimeSeries(name=name, values=values, labels=np.zeros(spec.length, dtype=np.uint8), domain="synthetic")


# ---------------------------------------------------------------------------
# injection


def _fit_sinusoid(x: np.ndarray) -> tuple[float, float, float, float, float, np.ndarray]:
    """Least-squares decomposition into line + sinusoid + residual.

    Returns (period, amplitude, phase, slope, intercept, residual).
    """
    t = np.arange(x.size, dtype=np.float64)
    if x.size >= 16:
        lags, corr = lag_correlations(x)
        # noise jitters the peaks at lag multiples by ~1e-4, so a loose
        # tolerance is needed to land on the fundamental rather than a harmonic
        period = int(lags[np.flatnonzero(corr >= corr.max() - 1e-3)[0]])
    else:
        period = max(4, x.size // 2)
    design = np.column_stack(
        [np.sin(2 * np.pi * t / period), np.cos(2 * np.pi * t / period), t, np.ones_like(t)]
    )
    # joint fit: sequential line-then-wave fitting leaks a cross-term because
    # the discrete line and sinusoid are not orthogonal
    coef, *_ = np.linalg.lstsq(design, x, rcond=None)
    c_sin, c_cos, slope, intercept = (float(c) for c in coef)
    amplitude = math.hypot(c_sin, c_cos)
    phase = math.atan2(c_cos, c_sin)
    residual = x - design @ coef
    return float(period), amplitude, phase, slope, intercept, residual


def _neighborhood(i: int, length: int) -> np.ndarray:
    idx = np.arange(max(0, i - 5), min(length, i + 6))
    return idx[idx != i]


def _contextual_candidates(values: np.ndarray, i: int, k: float) -> list[np.ndarray] | None:
    """Per-channel target values for a contextual point, or None if no sign
    keeps every channel inside its global clean range."""
    length, dim = values.shape
    neigh = _neighborhood(i, length)
    targets = []
    for d in range(dim):
        channel = values[:, d]
        local = channel[neigh]
        mu, sigma = local.mean(), max(local.std(), 1e-6)
        lo, hi = channel.min(), channel.max()
        options = [v for v in (mu + k * sigma, mu - k * sigma) if lo <= v <= hi]
        if not options:
            return None
        targets.append(np.asarray(options))
    return targets


def _place_regions(
    rng: np.random.Generator,
    test_start: int,
    test_end: int,
    items: list[tuple[str, int]],
    gap: int,
    values: np.ndarray,
    magnitudes: dict[str, float],
) -> list[tuple[int, int, str]]:
    """Pick disjoint (start, length, kind) regions inside the test segment."""
    placed: list[tuple[int, int, str]] = []
    for kind, length in items:
        lo, hi = test_start + 1, test_end - length - 1
        if hi < lo:
            raise RegionOverflow(f"{kind} region of length {length} does not fit in the test segment")
        candidates = rng.permutation(np.arange(lo, hi + 1))
        chosen = None
        for start in candidates:
            start = int(start)
            separated = all(
                start + length + gap <= s or s + l + gap <= start for s, l, _ in placed
            )
            if not separated:
                continue
            if kind == "contextual" and _contextual_candidates(values, start, magnitudes["contextual"]) is None:
                continue
            chosen = start
            break
        if chosen is None:
            raise RegionOverflow(f"could not place {kind} region of length {length} disjointly")
        placed.append((chosen, length, kind))
    return sorted(placed)


class _Workbench:
    """Clean snapshot plus the mutable output; all statistics and fits come
    from the snapshot so regions are independent of application order."""

    def __init__(self, values: np.ndarray):
        self.clean = values.copy()
        self.out = values.copy()
        self.sigma = self.clean.std(axis=0)
        self._fits: dict[int, tuple] = {}

    def fit(self, d: int) -> tuple:
        if d not in self._fits:
            self._fits[d] = _fit_sinusoid(self.clean[:, d])
        return self._fits[d]


def _apply_global(wb: _Workbench, start: int, k: float, rng: np.random.Generator) -> None:
    sign = 1.0 if rng.random() < 0.5 else -1.0
    wb.out[start, :] = wb.clean[start, :] + sign * k * wb.sigma


def _apply_contextual(wb: _Workbench, start: int, k: float, rng: np.random.Generator) -> None:
    targets = _contextual_candidates(wb.clean, start, k)
    if targets is None:
        raise RegionOverflow("contextual point lost feasibility during injection")
    for d, options in enumerate(targets):
        wb.out[start, d] = options[int(rng.integers(len(options)))]


def _apply_shapelet(wb: _Workbench, start: int, length: int) -> None:
    t = np.arange(wb.clean.shape[0], dtype=np.float64)
    window = slice(start, start + length)
    for d in range(wb.clean.shape[1]):
        period, amp, phase, slope, intercept, residual = wb.fit(d)
        square = amp * np.sign(np.sin(2 * np.pi * t[window] / period + phase))
        wb.out[window, d] = intercept + slope * t[window] + square + residual[window]


def _apply_seasonal(wb: _Workbench, start: int, length: int) -> None:
    t = np.arange(wb.clean.shape[0], dtype=np.float64)
    window = slice(start, start + length)
    for d in range(wb.clean.shape[1]):
        period, amp, phase, slope, intercept, residual = wb.fit(d)
        doubled = amp * np.sin(2 * np.pi * t[window] / (period / 2) + phase)
        wb.out[window, d] = intercept + slope * t[window] + doubled + residual[window]


def _apply_trend(wb: _Workbench, start: int, length: int, k: float) -> None:
    ramp = np.arange(1, length + 1, dtype=np.float64) / length
    for d in range(wb.clean.shape[1]):
        wb.out[start : start + length, d] = wb.clean[start : start + length, d] + k * wb.sigma[d] * ramp


def _resolve_items(
    spec: AnomalySpec, values: np.ndarray, rng: np.random.Generator
) -> list[tuple[str, int]]:
    """Expand a spec into per-region (kind, length) work items."""

    def region_length(kind: str) -> int:
        if kind in POINT_KINDS:
            return 1
        if spec.length is not None:
            return spec.length
        period, *_ = _fit_sinusoid(values[:, 0])
        full = max(4, round(period))
        return full if spec.kind != "mixed" else max(4, full // 2)

    if spec.kind != "mixed":
        return [(spec.kind, region_length(spec.kind)) for _ in range(spec.count)]
    pure = list(POINT_KINDS + SUBSEQUENCE_KINDS)
    n_kinds = int(rng.integers(2, len(pure) + 1))
    chosen = [pure[i] for i in sorted(rng.choice(len(pure), size=n_kinds, replace=False))]
    return [(chosen[j % n_kinds], region_length(chosen[j % n_kinds])) for j in range(spec.count)]


def inject(
    series: TimeSeries, spec: AnomalySpec, split: Split | None = None
) -> tuple[TimeSeries, list[AnomalyEvent]]:
    """Inject anomalies of the requested kind into the test segment.

    The input must be label-free; the output's label 1-positions are exactly
    the returned events, the series is bit-identical to the input outside
    them, and the resulting anomaly ratio is at most 10% by construction.
    """
    if series.labels.any():
        raise ValueError("inject expects a label-free base series")
    split = split or split_series(series)
    rng = np.random.default_rng(spec.seed)
    wb = _Workbench(series.values)
    magnitudes = dict(DEFAULT_MAGNITUDES)
    if spec.magnitude is not None:
        magnitudes[spec.kind] = spec.magnitude
        if spec.kind == "mixed":
            magnitudes = {k: spec.magnitude for k in magnitudes}

    items = _resolve_items(spec, wb.clean, rng)
    budget = sum(length for _, length in items)
    if budget > _MAX_ANOMALY_RATIO * series.length:
        raise RegionOverflow(
            f"requested {budget} anomalous points exceed {_MAX_ANOMALY_RATIO:.0%} of T={series.length}"
        )
    gap = _REGION_GAP if any(kind not in POINT_KINDS for kind, _ in items) else _POINT_GAP
    regions = _place_regions(rng, split.val_end, split.test_end, items, gap, wb.clean, magnitudes)

    labels = np.zeros(series.length, dtype=np.uint8)
    events = []
    for start, length, kind in regions:
        if kind == "global":
            _apply_global(wb, start, magnitudes["global"], rng)
        elif kind == "contextual":
            _apply_contextual(wb, start, magnitudes["contextual"], rng)
        elif kind == "shapelet":
            _apply_shapelet(wb, start, length)
        elif kind == "seasonal":
            _apply_seasonal(wb, start, length)
        else:
            _apply_trend(wb, start, length, magnitudes["trend"])
        labels[start : start + length] = 1
        events.append(AnomalyEvent(start, start + length))

    injected = TimeSeries(name=series.name, values=wb.out, labels=labels, domain=series.domain)
    return injected, events


# ---------------------------------------------------------------------------
# suites

SUITE_LENGTH = 1200
SUITE_COUNTS = {"global": 12, "contextual": 12, "shapelet": 2, "seasonal": 2, "trend": 2, "mixed": 3}
_SUITE_PERIODS = (40, 48, 56)


def gen_suite(
    kind: str,
    n_series: int,
    seed: int,
    out_dir: str | Path | None = None,
    base: BaseSignalSpec | None = None,
    count: int | None = None,
) -> tuple[list[tuple[TimeSeries, list[AnomalyEvent]]], DatasetManifest]:
    """Generate n independently seeded series of one anomaly kind.

    When out_dir is given, the suite is written as unified-format CSVs plus a
    manifest.json tagged with the anomaly type and data characteristics.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if n_series < 1:
        raise ValueError("n_series must be positive")
    produced = []
    entries = []
    dataset = f"synthetic_{kind}"
    for i in range(n_series):
        base_seed, anomaly_seed, param_seed = (
            int(s) for s in np.random.SeedSequence([seed, i]).generate_state(3)
        )
        param_rng = np.random.default_rng(param_seed)
        if base is None:
            series_base = BaseSignalSpec(
                length=SUITE_LENGTH,
                period=float(param_rng.choice(_SUITE_PERIODS)),
                seed=base_seed,
            )
        else:
            series_base = replace(base, seed=base_seed)
        name = f"{dataset}_{i:03d}"
        clean = gen_base(series_base, name=name)
        # lengths come from the known carrier period, not from re-estimation
        if kind in POINT_KINDS:
            length = 1
        elif kind == "mixed":
            length = max(4, round(series_base.period) // 2)
        else:
            length = max(4, round(series_base.period))
        anomaly = AnomalySpec(
            kind=kind, count=count or SUITE_COUNTS[kind], length=length, seed=anomaly_seed
        )
        injected, events = inject(clean, anomaly)
        produced.append((injected, events))
        flags = [name_ for name_, on in classify(injected).flags().items() if on]
        entries.append(
            ManifestEntry(
                name=name,
                path=f"{name}.csv",
                domain="synthetic",
                dim=injected.dim,
                length=injected.length,
                anomaly_ratio=injected.anomaly_ratio,
                tags={"dataset": dataset, "anomaly_type": kind, "characteristics": flags},
            )
        )
    manifest = DatasetManifest(tuple(entries))
    if out_dir is not None:
        out_dir = Path(out_dir)
        for injected, _ in produced:
            save_series(injected, out_dir / f"{injected.name}.csv")
        save_manifest(manifest, out_dir / "manifest.json")
    return produced, manifest


def gen_all_suites(
    n_series: int, seed: int, out_dir: str | Path | None = None
) -> tuple[dict[str, list[tuple[TimeSeries, list[AnomalyEvent]]]], DatasetManifest]:
    """Generate one suite per taxonomy kind under a shared manifest."""
    all_entries = []
    suites = {}
    for offset, kind in enumerate(KINDS):
        produced, manifest = gen_suite(kind, n_series, seed + offset, out_dir=None)
        suites[kind] = produced
        all_entries.extend(manifest.entries)
        if out_dir is not None:
            for injected, _ in produced:
                save_series(injected, Path(out_dir) / f"{injected.name}.csv")
    merged = DatasetManifest(tuple(all_entries))
    if out_dir is not None:
        save_manifest(merged, Path(out_dir) / "manifest.json")
    return suites, merged
