"""Detector registry: 13 classical anomaly detectors behind one
fit/score contract.

Construct a validated DetectorSpec, then build_detector(spec) to get a
Detector exposing fit(train) and score(test). Kinds listed in NO_FIT_KINDS
accept an empty train segment and can run zero-shot as-is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from ..errors import InvalidHyperparam, UnknownKind
from .base import ChannelDetector, Detector, FeatureDetector
from .clustering import Cblof, KMeans
from .histograms import Hbos, Loda
from .isolation import IForest, average_path_length
from .neighbors import Knn, Lof
from .profile import MatrixProfile, left_profile
from .series import ArForecast, ZScore
from .spectral import DwtMlead, SpectralResidual
from .subspace import Pca

__all__ = [
    "DETECTOR_KINDS",
    "NO_FIT_KINDS",
    "Detector",
    "DetectorSpec",
    "FeatureDetector",
    "ChannelDetector",
    "build_detector",
    "average_path_length",
    "left_profile",
]


def _int_at_least(bound: int):
    def check(value) -> int:
        if not isinstance(value, (int, float)) or value != int(value) or int(value) < bound:
            raise _Invalid(f"must be an integer >= {bound}, got {value!r}")
        return int(value)

    return check


def _fraction(value) -> float:
    if not isinstance(value, (int, float)) or not 0 < value <= 1:
        raise _Invalid(f"must be in (0, 1], got {value!r}")
    return float(value)


class _Invalid(ValueError):
    pass


# kind -> {param: (default, validator)}
_KIND_PARAMS: dict[str, dict[str, tuple[Any, Any]]] = {
    "zscore": {},
    "hbos": {"bins": (10, _int_at_least(2))},
    "lof": {"k": (20, _int_at_least(1))},
    "knn": {"k": (5, _int_at_least(1))},
    "kmeans": {"k": (8, _int_at_least(1))},
    "cblof": {"k": (8, _int_at_least(1)), "alpha": (0.9, _fraction)},
    "iforest": {"trees": (100, _int_at_least(1)), "subsample": (256, _int_at_least(2))},
    "loda": {"projections": (100, _int_at_least(1)), "bins": (10, _int_at_least(2))},
    "pca": {"variance": (0.9, _fraction)},
    "spectral_residual": {"q": (3, _int_at_least(1))},
    "matrix_profile": {},
    "dwt_mlead": {},
    "ar_forecast": {"order": (5, _int_at_least(1))},
}

_KIND_CLASSES: dict[str, type[Detector]] = {
    "zscore": ZScore,
    "hbos": Hbos,
    "lof": Lof,
    "knn": Knn,
    "kmeans": KMeans,
    "cblof": Cblof,
    "iforest": IForest,
    "loda": Loda,
    "pca": Pca,
    "spectral_residual": SpectralResidual,
    "matrix_profile": MatrixProfile,
    "dwt_mlead": DwtMlead,
    "ar_forecast": ArForecast,
}

DETECTOR_KINDS = tuple(_KIND_CLASSES)
NO_FIT_KINDS = frozenset(
    kind for kind, cls in _KIND_CLASSES.items() if cls.accepts_empty_train
)


@dataclass(frozen=True)
class DetectorSpec:
    """Validated detector configuration.

    Omitted hyperparameters take the kind's canonical defaults; unknown
    names or out-of-domain values fail construction.
    """

    kind: str
    window: int = 32
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in _KIND_PARAMS:
            raise UnknownKind(f"unknown detector kind {self.kind!r}")
        if not isinstance(self.window, int) or self.window < 2:
            raise InvalidHyperparam(f"window must be an integer >= 2, got {self.window!r}")
        domain = _KIND_PARAMS[self.kind]
        merged = {}
        for param, (default, _) in domain.items():
            merged[param] = default
        for param, value in dict(self.hyperparams).items():
            if param not in domain:
                raise InvalidHyperparam(f"{self.kind} does not take a {param!r} hyperparameter")
            try:
                merged[param] = domain[param][1](value)
            except _Invalid as exc:
                raise InvalidHyperparam(f"{self.kind}.{param} {exc}") from None
        object.__setattr__(self, "hyperparams", merged)
        if not self.name:
            object.__setattr__(self, "name", self.kind)


def build_detector(spec: DetectorSpec) -> Detector:
    """Instantiate the detector class for a validated spec."""
    if not isinstance(spec, DetectorSpec):
        raise TypeError("build_detector takes a DetectorSpec")
    return _KIND_CLASSES[spec.kind](spec)
