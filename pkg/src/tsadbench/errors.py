"""Exception vocabulary shared by every layer of the benchmark."""


class TsadBenchError(Exception):
    """Base class for all benchmark-specific failures."""


class MalformedFile(TsadBenchError):
    """A series file violates the unified CSV layout."""


class NonFiniteValue(TsadBenchError):
    """A channel contains NaN or infinity."""


class DegenerateSplit(TsadBenchError):
    """A split policy produced an empty train, validation, or test segment."""


class RegionOverflow(TsadBenchError):
    """Requested anomaly regions do not fit inside the test segment."""


class UnknownKind(TsadBenchError):
    """Detector kind is not in the registry."""


class InvalidHyperparam(TsadBenchError):
    """A detector hyperparameter is outside its legal range."""


class InsufficientTrainData(TsadBenchError):
    """Fit called with fewer rows than the kind can work with."""


class DegenerateData(TsadBenchError):
    """Fit data carries no usable signal (e.g. zero variance everywhere)."""


class WindowTooLarge(TsadBenchError):
    """Window length exceeds the segment it should slide over."""


class NoTruthEvents(TsadBenchError):
    """Ground truth contains no anomalous points."""


class SingleClassTruth(TsadBenchError):
    """Ground truth is all-positive or all-negative."""


class AllZeroDifferences(TsadBenchError):
    """Paired samples are identical everywhere."""


class DegenerateShape(TsadBenchError):
    """A results matrix is too small or malformed for the requested test."""


class UnsupportedK(TsadBenchError):
    """No critical value is tabulated for this number of methods."""


class SchemaMismatch(TsadBenchError):
    """Persisted records do not match the expected schema."""
