"""Corpus loading, splitting, normalization, and the univariate filter.

The unified series format is a UTF-8 CSV with a header row: an optional first
column named `timestamp` (ignored for computation), one column per channel,
and a final column named `label` holding 0/1 ground truth. A corpus is a
directory of such files plus a manifest.json array describing each series.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DatasetManifest, ManifestEntry, Split, TimeSeries
from .errors import DegenerateSplit, MalformedFile, NonFiniteValue


@dataclass(frozen=True)
class SplitPolicy:
    """Where to cut a series; None boundaries select the default rule.

    Default: the test segment is the last ceil(T/2) points, the validation
    segment is the last 20% (rounded down, minimum 1) of the remaining first
    half, and the train segment is whatever precedes it. Explicit boundaries
    (e.g. carried by a manifest) override the rule verbatim.
    """

    train_end: int | None = None
    val_end: int | None = None

    @property
    def explicit(self) -> bool:
        return self.train_end is not None and self.val_end is not None


def load_series(path: str | Path, name: str | None = None, domain: str = "unknown") -> TimeSeries:
    """Read one unified-format CSV into a validated TimeSeries."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedFile(f"{path}: empty file") from None
        header = [cell.strip() for cell in header]
        if not header or header[-1] != "label":
            raise MalformedFile(f"{path}: last column must be named 'label'")
        skip_first = header[0] == "timestamp"
        first_channel = 1 if skip_first else 0
        n_channels = len(header) - first_channel - 1
        if n_channels < 1:
            raise MalformedFile(f"{path}: no channel columns")

        rows: list[list[float]] = []
        labels: list[int] = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedFile(f"{path}:{line_no}: expected {len(header)} cells, got {len(row)}")
            try:
                values = [float(cell) for cell in row[first_channel:-1]]
                label = float(row[-1])
            except ValueError as exc:
                raise MalformedFile(f"{path}:{line_no}: non-numeric cell ({exc})") from None
            if label not in (0.0, 1.0):
                raise MalformedFile(f"{path}:{line_no}: label must be 0 or 1, got {row[-1]!r}")
            rows.append(values)
            labels.append(int(label))
    if not rows:
        raise MalformedFile(f"{path}: no data rows")
    values = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(values).all():
        raise NonFiniteValue(f"{path}: non-finite channel value")
    return TimeSeries(name=name or path.stem, values=values, labels=np.asarray(labels), domain=domain)


def save_series(series: TimeSeries, path: str | Path) -> None:
    """Write a TimeSeries in the unified format, deterministically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [f"v{d}" for d in range(series.dim)] + ["label"]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row, label in zip(series.values, series.labels):
            writer.writerow([format(v, ".12g") for v in row] + [int(label)])


def split_series(series: TimeSeries, policy: SplitPolicy | None = None) -> Split:
    """Cut a series into train/validation/test segments."""
    policy = policy or SplitPolicy()
    total = series.length
    if policy.explicit:
        split = Split(policy.train_end, policy.val_end, total)
    else:
        if total < 10:
            raise DegenerateSplit(f"series {series.name!r} too short to split (T={total})")
        test_length = math.ceil(total / 2)
        val_end = total - test_length
        val_length = max(1, math.floor(0.2 * val_end))
        split = Split(val_end - val_length, val_end, total)
    if split.train_length == 0 or split.val_length == 0 or split.test_length == 0:
        raise DegenerateSplit(f"series {series.name!r}: empty segment in {split}")
    return split


def zscore_normalize(series: TimeSeries, split: Split) -> TimeSeries:
    """Standardize every channel by its train-segment mean and std.

    Test and validation segments are transformed with train statistics only;
    channels whose train std is below 1e-12 are shifted but not scaled.
    """
    train = series.values[: split.train_end]
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    scale = np.where(std < 1e-12, 1.0, std)
    values = (series.values - mean) / scale
    return TimeSeries(name=series.name, values=values, labels=series.labels, domain=series.domain)


def filter_univariate(
    series_list: list[TimeSeries], auc_map: dict[str, float] | None = None
) -> tuple[list[TimeSeries], list[tuple[str, str]]]:
    """Apply the benchmark's univariate retention rules.

    Drops series with no anomalies, series with anomaly ratio above 10%, and,
    when a best-AUC map is supplied, series whose best AUC-ROC is at most
    0.85. Returns the kept series plus a (name, rule) rejection log.
    """
    kept: list[TimeSeries] = []
    rejections: list[tuple[str, str]] = []
    for series in series_list:
        ratio = series.anomaly_ratio
        if ratio == 0:
            rejections.append((series.name, "no_anomaly"))
        elif ratio > 0.10:
            rejections.append((series.name, "anomaly_ratio_above_10pct"))
        elif auc_map is not None and series.name in auc_map and auc_map[series.name] <= 0.85:
            rejections.append((series.name, "best_auc_at_most_0.85"))
        else:
            kept.append(series)
    return kept, rejections


def explode_multivariate(series: TimeSeries) -> list[TimeSeries]:
    """Split a D-channel series into D univariate series sharing the labels."""
    if series.dim == 1:
        return [series]
    return [
        TimeSeries(
            name=f"{series.name}_ch{d}",
            values=series.values[:, d : d + 1],
            labels=series.labels,
            domain=series.domain,
        )
        for d in range(series.dim)
    ]


# ---------------------------------------------------------------------------
# manifests


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a manifest.json corpus listing."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, list):
        raise MalformedFile(f"{path}: manifest must be a JSON array")
    entries = []
    for item in raw:
        try:
            entries.append(
                ManifestEntry(
                    name=item["name"],
                    path=item["path"],
                    domain=item["domain"],
                    dim=int(item["dim"]),
                    length=int(item["length"]),
                    anomaly_ratio=float(item["anomaly_ratio"]),
                    train_end=item.get("train_end"),
                    val_end=item.get("val_end"),
                    tags=item.get("tags", {}),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedFile(f"{path}: bad manifest entry ({exc})") from None
    return DatasetManifest(tuple(entries))


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = []
    for e in manifest:
        item = {
            "name": e.name,
            "path": e.path,
            "domain": e.domain,
            "dim": e.dim,
            "length": e.length,
            "anomaly_ratio": e.anomaly_ratio,
        }
        if e.train_end is not None:
            item["train_end"] = e.train_end
        if e.val_end is not None:
            item["val_end"] = e.val_end
        if e.tags:
            item["tags"] = e.tags
        payload.append(item)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _entry_problems(entry: ManifestEntry, series: TimeSeries) -> list[str]:
    problems = []
    if series.dim != entry.dim:
        problems.append(f"{entry.name}: dim {series.dim} != manifest {entry.dim}")
    if series.length != entry.length:
        problems.append(f"{entry.name}: length {series.length} != manifest {entry.length}")
    if abs(series.anomaly_ratio - entry.anomaly_ratio) > 1e-6:
        problems.append(
            f"{entry.name}: anomaly_ratio {series.anomaly_ratio:.8f} != manifest {entry.anomaly_ratio:.8f}"
        )
    return problems


def validate_corpus(manifest_path: str | Path) -> list[str]:
    """Check every manifest entry against its file; returns found problems."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    problems: list[str] = []
    try:
        manifest = load_manifest(manifest_path)
    except MalformedFile as exc:
        return [str(exc)]
    for entry in manifest:
        try:
            series = load_series(base / entry.path, name=entry.name, domain=entry.domain)
        except (MalformedFile, NonFiniteValue, OSError) as exc:
            problems.append(f"{entry.name}: not loadable ({exc})")
            continue
        problems.extend(_entry_problems(entry, series))
        try:
            split_series(series, SplitPolicy(entry.train_end, entry.val_end))
        except DegenerateSplit as exc:
            problems.append(f"{entry.name}: {exc}")
    return problems


def load_corpus(manifest_path: str | Path) -> list[tuple[ManifestEntry, TimeSeries, Split]]:
    """Load every series in a corpus with its manifest entry and split.

    Entry metadata is enforced on load: a mismatch between the manifest and
    the file is a MalformedFile error.
    """
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    manifest = load_manifest(manifest_path)
    corpus = []
    for entry in manifest:
        series = load_series(base / entry.path, name=entry.name, domain=entry.domain)
        problems = _entry_problems(entry, series)
        if problems:
            raise MalformedFile("; ".join(problems))
        split = split_series(series, SplitPolicy(entry.train_end, entry.val_end))
        corpus.append((entry, series, split))
    return corpus
