"""Exception hierarchy.

Every error carries a stable ``code`` string; the CLI prints it on stderr so
scripts can match on it.
"""


class CqmError(Exception):
    code = "E_CQM"


class TraceError(CqmError, ValueError):
    code = "E_TRACE"


class EmptyTrace(TraceError):
    code = "E_EMPTY_TRACE"


class NonContiguousIndices(TraceError):
    code = "E_NONCONTIGUOUS_INDICES"


class QualityOutOfRange(TraceError):
    code = "E_QUALITY_OUT_OF_RANGE"

    def __init__(self, index, quality=None, scale=None):
        self.index = index
        self.quality = quality
        msg = f"segment {index}: quality {quality!r} outside scale"
        if scale is not None:
            msg += f" [{scale.lo}, {scale.hi}]"
        super().__init__(msg)


class HeterogeneousDurations(TraceError):
    code = "E_HETEROGENEOUS_DURATIONS"


class InvalidSegment(TraceError):
    code = "E_INVALID_SEGMENT"


class InvalidScale(CqmError, ValueError):
    code = "E_INVALID_SCALE"


class MixedScale(CqmError, ValueError):
    code = "E_MIXED_SCALE"


class LengthNotAligned(TraceError):
    code = "E_LENGTH_NOT_ALIGNED"


class LengthExceedsTrace(TraceError):
    code = "E_LENGTH_EXCEEDS_TRACE"


class InvalidLabel(TraceError):
    code = "E_INVALID_LABEL"


class EmptyDataset(TraceError):
    code = "E_EMPTY_DATASET"


class UnknownWindowSize(CqmError, KeyError):
    code = "E_UNKNOWN_WINDOW_SIZE"

    def __str__(self):
        return Exception.__str__(self)


class WindowNotAligned(CqmError, ValueError):
    code = "E_WINDOW_NOT_ALIGNED"


class TraceTooShort(CqmError, ValueError):
    code = "E_TRACE_TOO_SHORT"


class EmptyWindow(CqmError, ValueError):
    code = "E_EMPTY_WINDOW"


class WeightDimensionMismatch(CqmError, ValueError):
    code = "E_WEIGHT_DIMENSION_MISMATCH"


class UnknownModel(CqmError, ValueError):
    code = "E_UNKNOWN_MODEL"


class InsufficientSamples(CqmError, ValueError):
    code = "E_INSUFFICIENT_SAMPLES"


class DatasetTooSmall(CqmError, ValueError):
    code = "E_DATASET_TOO_SMALL"


class InvalidPlan(CqmError, ValueError):
    code = "E_INVALID_PLAN"


class DegenerateInput(CqmError, ValueError):
    code = "E_DEGENERATE_INPUT"


class LengthMismatch(CqmError, ValueError):
    code = "E_LENGTH_MISMATCH"


class TooFewGroups(CqmError, ValueError):
    code = "E_TOO_FEW_GROUPS"


class TooFewSamples(CqmError, ValueError):
    code = "E_TOO_FEW_SAMPLES"


class InvalidWarmup(CqmError, ValueError):
    code = "E_INVALID_WARMUP"


class InvalidSpec(CqmError, ValueError):
    code = "E_INVALID_SPEC"


class IONotFound(CqmError, FileNotFoundError):
    code = "E_IO_NOT_FOUND"


class FormatError(CqmError, ValueError):
    code = "E_FORMAT"


class RankDeficientWarning(UserWarning):
    """Design matrix of a weight fit is rank deficient; ridge term dominates."""
