"""Benchmark protocol runner.

Wires the consistency rules together: splits come from the ingest module,
test scores follow the non-overlapping window expansion, label metrics are
swept over the fixed threshold list, and point adjustment stays off unless
an experiment explicitly asks for it. Every (series, spec) task is pure and
independently seeded, so sweeps parallelize without changing results.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import ManifestEntry, MetricReport, RunRecord, Split, TimeSeries
from .detectors import NO_FIT_KINDS, DetectorSpec, build_detector
from .ingest import zscore_normalize
from .metrics import RangeParams, ThresholdPolicy, VusParams, evaluate_all
from .windowing import WindowPolicy

STRATEGY_MODES = ("zero", "few", "full")


@dataclass(frozen=True)
class StrategyConfig:
    """How much labeled-normal history a run may learn from."""

    mode: str = "full"
    few_fraction: float = 0.05

    def __post_init__(self) -> None:
        if self.mode not in STRATEGY_MODES:
            raise ValueError(f"mode must be one of {STRATEGY_MODES}")
        if not 0 < self.few_fraction <= 1:
            raise ValueError("few_fraction must be in (0, 1]")


def derive_seed(global_seed: int, series_name: str, config_index: int) -> int:
    """Stable per-task seed from the global seed, series, and grid position."""
    entropy = [global_seed, zlib.crc32(series_name.encode()), config_index]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def make_run_id(
    series_name: str, spec: DetectorSpec, strategy: StrategyConfig, overlap: str, point_adjust: bool
) -> str:
    payload = json.dumps(
        [
            series_name,
            spec.kind,
            spec.name,
            spec.window,
            sorted(spec.hyperparams.items()),
            spec.seed,
            strategy.mode,
            strategy.few_fraction,
            overlap,
            point_adjust,
        ],
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _peak_memory_bytes() -> int | None:
    try:
        import resource

        peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except Exception:
        return None
    # linux reports kilobytes, mac reports bytes
    return int(peak) * 1024 if sys.platform.startswith("linux") else int(peak)


def _fit_segment(values: np.ndarray, split: Split, strategy: StrategyConfig) -> np.ndarray:
    if strategy.mode == "full":
        return values[: split.val_end]
    keep = int(strategy.few_fraction * split.train_end)
    return values[split.train_end - keep : split.val_end]


def run(
    series: TimeSeries,
    split: Split,
    spec: DetectorSpec,
    strategy: StrategyConfig | None = None,
    window_policy: WindowPolicy | None = None,
    threshold_policy: ThresholdPolicy | None = None,
    range_params: RangeParams | None = None,
    enable_point_adjust: bool = False,
    dataset: str = "",
    tags: dict | None = None,
) -> RunRecord:
    """Execute one detector spec on one series and record everything.

    Detector and evaluation errors become a failed-status record rather
    than an exception, so sweeps always run to completion.
    """
    strategy = strategy or StrategyConfig()
    if window_policy is not None and window_policy.window != spec.window:
        raise ValueError(
            f"window policy w={window_policy.window} contradicts spec window {spec.window}"
        )
    overlap = window_policy.overlap if window_policy else "non_overlapping"
    if split.test_end != series.length:
        raise ValueError("split does not cover the series; use ingest splits")

    run_id = make_run_id(series.name, spec, strategy, overlap, enable_point_adjust)
    base_record = dict(
        run_id=run_id,
        detector_id=spec.name,
        kind=spec.kind,
        hyperparams=dict(spec.hyperparams),
        window=spec.window,
        strategy=strategy.mode,
        series_name=series.name,
        dataset=dataset or series.domain,
        tags=dict(tags or {}),
        seed=spec.seed,
        zero_shot_fit_on_test=strategy.mode == "zero" and spec.kind not in NO_FIT_KINDS,
    )

    try:
        normalized = zscore_normalize(series, split)
        test_values = normalized.values[split.val_end :]
        truth = series.labels[split.val_end :]
        detector = build_detector(spec)

        if strategy.mode == "zero":
            if spec.kind in NO_FIT_KINDS:
                detector.fit(np.empty((0, series.dim)))
                train_seconds = 0.0
            else:
                started = time.perf_counter()
                detector.fit(test_values)
                train_seconds = time.perf_counter() - started
        else:
            fit_values = _fit_segment(normalized.values, split, strategy)
            started = time.perf_counter()
            detector.fit(fit_values)
            train_seconds = time.perf_counter() - started

        started = time.perf_counter()
        scores = detector.score(test_values, overlap=overlap)
        infer_seconds = time.perf_counter() - started

        report, per_threshold = evaluate_all(
            scores,
            truth,
            policy=threshold_policy,
            range_params=range_params,
            vus_params=VusParams(ell_max=float(spec.window)),
            enable_point_adjust=enable_point_adjust,
        )
    except Exception as exc:  # noqa: BLE001 - failed runs must not abort sweeps
        return RunRecord(
            **base_record,
            status="failed",
            error=f"{type(exc).__name__}: {exc}",
        )

    return RunRecord(
        **base_record,
        train_seconds=train_seconds,
        infer_seconds=infer_seconds,
        peak_memory_bytes=_peak_memory_bytes(),
        report=report,
        per_threshold=per_threshold,
    )


@dataclass(frozen=True)
class GridResult:
    """All sweep records plus the per-(series, kind) winners."""

    records: tuple[RunRecord, ...]
    best: dict[tuple[str, str], RunRecord]
    selection_metric: str


def grid_run(
    corpus: list[tuple[ManifestEntry, TimeSeries, Split]],
    specs: list[DetectorSpec],
    strategy: StrategyConfig | None = None,
    overlap: str = "non_overlapping",
    threshold_policy: ThresholdPolicy | None = None,
    range_params: RangeParams | None = None,
    selection_metric: str = "V-PR",
    enable_point_adjust: bool = False,
    global_seed: int = 0,
    threads: int = 1,
) -> GridResult:
    """Run every spec on every series; pick winners per (series, kind).

    Per-task seeds derive from the global seed, the series name, and the
    spec's grid index, so results do not depend on execution order or
    thread count. Ties on the selection metric go to the lower grid index;
    failed runs never win.
    """
    strategy = strategy or StrategyConfig()

    def one(entry: ManifestEntry, series: TimeSeries, split: Split, index: int) -> RunRecord:
        spec = replace(specs[index], seed=derive_seed(global_seed, series.name, index))
        return run(
            series,
            split,
            spec,
            strategy=strategy,
            window_policy=WindowPolicy(window=spec.window, overlap=overlap),
            threshold_policy=threshold_policy,
            range_params=range_params,
            enable_point_adjust=enable_point_adjust,
            dataset=entry.dataset,
            tags=dict(entry.tags),
        )

    tasks = [
        (entry, series, split, index)
        for entry, series, split in corpus
        for index in range(len(specs))
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda args: one(*args), tasks))
    else:
        records = [one(*args) for args in tasks]

    best: dict[tuple[str, str], RunRecord] = {}
    scores: dict[tuple[str, str], float] = {}
    for record in records:
        if record.status != "ok":
            continue
        key = (record.series_name, record.kind)
        value = record.report[selection_metric]
        if key not in best or value > scores[key]:
            best[key] = record
            scores[key] = value
    return GridResult(records=tuple(records), best=best, selection_metric=selection_metric)


def aggregate(
    records: list[RunRecord] | tuple[RunRecord, ...],
    manifest=None,
) -> dict[str, dict]:
    """Unweighted per-dataset means of every metric, with failure counts.

    Records with failed status are excluded from the means and tallied.
    When a manifest is given, records for series missing from it raise.
    """
    known = {entry.name for entry in manifest} if manifest is not None else None
    groups: dict[str, list[RunRecord]] = {}
    failures: dict[str, int] = {}
    for record in records:
        if known is not None and record.series_name not in known:
            raise ValueError(f"series {record.series_name!r} not in manifest")
        if record.status != "ok":
            failures[record.dataset] = failures.get(record.dataset, 0) + 1
            continue
        groups.setdefault(record.dataset, []).append(record)

    out: dict[str, dict] = {}
    for dataset in sorted(set(groups) | set(failures)):
        members = groups.get(dataset, [])
        metrics: dict[str, float] = {}
        if members:
            names = members[0].report.entries.keys()
            metrics = {
                name: float(np.mean([m.report[name] for m in members])) for name in names
            }
        out[dataset] = {
            "metrics": metrics,
            "count": len(members),
            "failures": failures.get(dataset, 0),
        }
    return out
