"""tsadbench: a reproducible benchmarking engine for time-series anomaly
detection.

One pipeline covers the whole experiment: ingest corpora in a unified format,
characterize and synthesize series, run classical detectors under a common
fit/score contract, evaluate with a sixteen-metric suite at a fixed threshold
sweep, and rank methods with significance tests.
"""

__version__ = "0.1.0"

from .core import (
    AnomalyEvent,
    DatasetManifest,
    ManifestEntry,
    MetricReport,
    PredictionSeries,
    RunRecord,
    ScoreSeries,
    Split,
    TimeSeries,
    extract_events,
    render_events,
)

__all__ = [
    "AnomalyEvent",
    "DatasetManifest",
    "ManifestEntry",
    "MetricReport",
    "PredictionSeries",
    "RunRecord",
    "ScoreSeries",
    "Split",
    "TimeSeries",
    "extract_events",
    "render_events",
    "__version__",
]
