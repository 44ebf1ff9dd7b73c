"""Result persistence, leaderboards, and critical-difference diagram data.

Records land in two forms: one flat CSV per output directory for bulk
analysis, and one JSON per run holding everything needed to reproduce it.
The CSV is append-only so repeated sweeps accumulate in place.
"""

from __future__ import annotations

import csv
import json
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .core import MetricReport, RunRecord
from .errors import SchemaMismatch
from .metrics import METRIC_NAMES
from .stats import RankTable, rank_table

RECORDS_CSV = "records.csv"
RUNS_DIR = "runs"
GROUP_KEYS = ("dataset", "anomaly_type", "characteristic")

CSV_COLUMNS = (
    ("run_id", "detector", "kind", "strategy", "series", "dataset")
    + METRIC_NAMES
    + ("best_threshold", "train_seconds", "infer_seconds", "status")
)

_JSON_KEYS = (
    "run_id",
    "detector",
    "kind",
    "hyperparams",
    "window",
    "strategy",
    "series",
    "dataset",
    "tags",
    "seed",
    "train_seconds",
    "infer_seconds",
    "peak_memory_bytes",
    "report",
    "per_threshold",
    "status",
    "error",
    "zero_shot_fit_on_test",
)


def _fmt(value: float | None) -> str:
    # repr round-trips doubles exactly, so identical runs emit identical bytes
    return "" if value is None else repr(float(value))


def _csv_row(record: RunRecord) -> list[str]:
    report = record.report
    row = [
        record.run_id,
        record.detector_id,
        record.kind,
        record.strategy,
        record.series_name,
        record.dataset,
    ]
    row.extend("" if report is None else _fmt(report[name]) for name in METRIC_NAMES)
    row.append("" if report is None else _fmt(report.threshold_used))
    row.extend([_fmt(record.train_seconds), _fmt(record.infer_seconds), record.status])
    return row


def record_to_json(record: RunRecord) -> dict:
    """Full provenance of one run as a JSON-ready dict."""
    report = None
    if record.report is not None:
        report = {
            "entries": dict(record.report.entries),
            "best_thresholds": dict(record.report.best_thresholds),
            "threshold_used": record.report.threshold_used,
        }
    per_threshold = None
    if record.per_threshold is not None:
        per_threshold = [[t, dict(row)] for t, row in record.per_threshold.items()]
    return {
        "run_id": record.run_id,
        "detector": record.detector_id,
        "kind": record.kind,
        "hyperparams": dict(record.hyperparams),
        "window": record.window,
        "strategy": record.strategy,
        "series": record.series_name,
        "dataset": record.dataset,
        "tags": dict(record.tags),
        "seed": record.seed,
        "train_seconds": record.train_seconds,
        "infer_seconds": record.infer_seconds,
        "peak_memory_bytes": record.peak_memory_bytes,
        "report": report,
        "per_threshold": per_threshold,
        "status": record.status,
        "error": record.error,
        "zero_shot_fit_on_test": record.zero_shot_fit_on_test,
        "versions": {
            "tsadbench": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def record_from_json(payload: dict, source: str = "<json>") -> RunRecord:
    missing = [key for key in _JSON_KEYS if key not in payload]
    if missing:
        raise SchemaMismatch(f"{source}: missing keys {missing}")
    report = None
    if payload["report"] is not None:
        report = MetricReport(
            entries=dict(payload["report"]["entries"]),
            best_thresholds=dict(payload["report"]["best_thresholds"]),
            threshold_used=payload["report"]["threshold_used"],
        )
    per_threshold = None
    if payload["per_threshold"] is not None:
        per_threshold = {float(t): dict(row) for t, row in payload["per_threshold"]}
    return RunRecord(
        run_id=payload["run_id"],
        detector_id=payload["detector"],
        kind=payload["kind"],
        hyperparams=dict(payload["hyperparams"]),
        window=payload["window"],
        strategy=payload["strategy"],
        series_name=payload["series"],
        dataset=payload["dataset"],
        tags=dict(payload["tags"]),
        seed=payload["seed"],
        train_seconds=payload["train_seconds"],
        infer_seconds=payload["infer_seconds"],
        peak_memory_bytes=payload["peak_memory_bytes"],
        report=report,
        per_threshold=per_threshold,
        status=payload["status"],
        error=payload["error"],
        zero_shot_fit_on_test=payload["zero_shot_fit_on_test"],
    )


def save_records(records, out_dir: str | Path) -> Path:
    """Append records to out_dir's CSV and write one provenance JSON each.

    Re-saving a run_id appends another CSV row but overwrites its JSON;
    deterministic runs make the two copies agree on everything but timings.
    """
    out_dir = Path(out_dir)
    runs_dir = out_dir / RUNS_DIR
    runs_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / RECORDS_CSV

    if csv_path.exists():
        with open(csv_path, newline="") as handle:
            header = next(csv.reader(handle), None)
        if header != list(CSV_COLUMNS):
            raise SchemaMismatch(f"{csv_path} has a foreign header; refusing to append")
        mode = "a"
    else:
        mode = "w"
    with open(csv_path, mode, newline="") as handle:
        writer = csv.writer(handle)
        if mode == "w":
            writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(_csv_row(record))

    for record in records:
        path = runs_dir / f"{record.run_id}.json"
        with open(path, "w") as handle:
            json.dump(record_to_json(record), handle, indent=2, sort_keys=True)
            handle.write("\n")
    return csv_path


def load_records(out_dir: str | Path) -> list[RunRecord]:
    """Rebuild the records saved under out_dir, one per CSV data row."""
    out_dir = Path(out_dir)
    csv_path = out_dir / RECORDS_CSV
    if not csv_path.exists():
        raise SchemaMismatch(f"{csv_path} not found")
    with open(csv_path, newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise SchemaMismatch(f"{csv_path} is empty")
    header = rows[0]
    missing = [column for column in CSV_COLUMNS if column not in header]
    if missing:
        raise SchemaMismatch(f"{csv_path}: missing columns {missing}")
    id_index = header.index("run_id")

    records = []
    for row in rows[1:]:
        run_id = row[id_index]
        path = out_dir / RUNS_DIR / f"{run_id}.json"
        if not path.exists():
            raise SchemaMismatch(f"no provenance file for run {run_id!r}")
        with open(path) as handle:
            payload = json.load(handle)
        records.append(record_from_json(payload, source=str(path)))
    return records


def _group_labels(record: RunRecord, group_by: str) -> list[str]:
    if group_by == "dataset":
        return [record.dataset]
    if group_by == "anomaly_type":
        return [str(record.tags.get("anomaly_type", "unknown"))]
    flags = list(record.tags.get("characteristics", []))
    return [str(flag) for flag in flags] or ["none"]


@dataclass(frozen=True)
class Leaderboard:
    """Methods as rows (best mean rank first), groups as columns."""

    metric: str
    group_by: str
    methods: tuple[str, ...]
    groups: tuple[str, ...]
    cells: np.ndarray  # (methods, groups) means, NaN where a cell is empty
    ranking: RankTable | None  # None for a single method

    def rows(self) -> list[list[str]]:
        """The table as printable rows, header first."""
        out = [["method", *self.groups, "mean_rank"]]
        for i, method in enumerate(self.methods):
            rank = self.ranking.mean_ranks[method] if self.ranking else 1.0
            cells = ["" if np.isnan(v) else f"{v:.6f}" for v in self.cells[i]]
            out.append([method, *cells, f"{rank:.4f}"])
        return out


def leaderboard(records, metric: str, group_by: str = "dataset") -> Leaderboard:
    """Aggregate one metric into a methods-by-groups mean table.

    Rows follow the mean-rank ordering of the cell matrix, so the table
    and the critical-difference diagram always agree. Failed runs are
    excluded; a method with no runs in a group leaves a NaN cell.
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")
    if group_by not in GROUP_KEYS:
        raise ValueError(f"group_by must be one of {GROUP_KEYS}")
    ok = [record for record in records if record.status == "ok"]
    if not ok:
        raise ValueError("no successful records to aggregate")

    buckets: dict[tuple[str, str], list[float]] = {}
    for record in ok:
        for label in _group_labels(record, group_by):
            buckets.setdefault((record.detector_id, label), []).append(record.report[metric])
    methods = sorted({method for method, _ in buckets})
    groups = sorted({label for _, label in buckets})
    cells = np.full((len(methods), len(groups)), np.nan)
    for i, method in enumerate(methods):
        for j, label in enumerate(groups):
            values = buckets.get((method, label))
            if values:
                cells[i, j] = float(np.mean(values))

    if len(methods) == 1:
        return Leaderboard(metric, group_by, tuple(methods), tuple(groups), cells, None)
    ranking = rank_table(cells, methods, higher_better=True)
    order = [methods.index(m) for m in ranking.methods]
    return Leaderboard(
        metric, group_by, ranking.methods, tuple(groups), cells[order], ranking
    )


def cd_diagram_data(ranking: RankTable) -> dict:
    """Positions and connection segments for a critical-difference diagram.

    Positions are mean ranks sorted best first; each group of two or more
    methods the critical difference cannot separate becomes one segment.
    """
    positions = [
        {"method": method, "rank": ranking.mean_ranks[method]} for method in ranking.methods
    ]
    connections = []
    for group in ranking.groups:
        if len(group) < 2:
            continue
        ranks = [ranking.mean_ranks[m] for m in group]
        connections.append({"methods": list(group), "lo": min(ranks), "hi": max(ranks)})
    return {"cd": ranking.cd, "positions": positions, "connections": connections}
