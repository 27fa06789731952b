"""Session traces, quality scales and labeled datasets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    EmptyDataset,
    EmptyTrace,
    HeterogeneousDurations,
    InvalidLabel,
    InvalidScale,
    InvalidSegment,
    LengthExceedsTrace,
    LengthNotAligned,
    MixedScale,
    NonContiguousIndices,
    QualityOutOfRange,
)

# tolerance used when checking that a duration is a whole multiple of another
ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class QualityScale:
    """Closed rating range, ACR 1..5 by default."""

    lo: float = 1.0
    hi: float = 5.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise InvalidScale(f"invalid scale [{self.lo}, {self.hi}]")

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def clamp(self, value: float) -> float:
        if value < self.lo:
            return self.lo
        if value > self.hi:
            return self.hi
        return value

    @property
    def span(self) -> float:
        return self.hi - self.lo


DEFAULT_SCALE = QualityScale()


@dataclass(frozen=True)
class SegmentRecord:
    index: int
    quality: float
    duration_s: float = 1.0
    bitrate_kbps: Optional[float] = None
    version: Optional[int] = None

    def __post_init__(self):
        if self.index < 0:
            raise InvalidSegment(f"negative segment index {self.index}")
        if not self.duration_s > 0:
            raise InvalidSegment(f"segment {self.index}: duration must be > 0")
        if self.bitrate_kbps is not None and not self.bitrate_kbps > 0:
            raise InvalidSegment(f"segment {self.index}: bitrate must be > 0")
        if self.version is not None and self.version < 1:
            raise InvalidSegment(f"segment {self.index}: version must be >= 1")


@dataclass(frozen=True)
class SessionTrace:
    """Validated, immutable sequence of segments sharing one duration.

    Build through :func:`validate_trace` or :meth:`from_qualities`.
    """

    scale: QualityScale
    segments: tuple
    uniform_duration_s: float

    @classmethod
    def from_qualities(cls, qualities: Sequence[float], duration_s: float = 1.0,
                       scale: QualityScale = DEFAULT_SCALE) -> "SessionTrace":
        raw = [SegmentRecord(i, float(q), duration_s) for i, q in enumerate(qualities)]
        return validate_trace(raw, scale)

    def __len__(self):
        return len(self.segments)

    @property
    def qualities(self) -> list:
        return [s.quality for s in self.segments]

    @property
    def duration_s(self) -> float:
        return len(self.segments) * self.uniform_duration_s


def validate_trace(raw: Sequence[SegmentRecord], scale: QualityScale = DEFAULT_SCALE) -> SessionTrace:
    if not raw:
        raise EmptyTrace("trace has no segments")
    duration = raw[0].duration_s
    for expected, seg in enumerate(raw):
        if seg.index != expected:
            raise NonContiguousIndices(
                f"expected segment index {expected}, found {seg.index}")
        if not (math.isfinite(seg.quality) and scale.contains(seg.quality)):
            raise QualityOutOfRange(seg.index, seg.quality, scale)
        if seg.duration_s != duration:
            raise HeterogeneousDurations(
                f"segment {seg.index} lasts {seg.duration_s} s, expected {duration} s")
    return SessionTrace(scale, tuple(raw), duration)


def segments_in(length_s: float, duration_s: float) -> Optional[int]:
    """Number of whole segments in `length_s`, or None if not a multiple."""
    ratio = length_s / duration_s
    n = round(ratio)
    if abs(ratio - n) > ALIGN_TOL * max(1.0, abs(ratio)):
        return None
    return int(n)


def prefix(trace: SessionTrace, length_s: float) -> SessionTrace:
    """The first `length_s` seconds of `trace`."""
    n = segments_in(length_s, trace.uniform_duration_s)
    if n is None or n <= 0:
        raise LengthNotAligned(
            f"length {length_s} s is not a positive multiple of {trace.uniform_duration_s} s")
    if n > len(trace):
        raise LengthExceedsTrace(
            f"length {length_s} s exceeds trace duration {trace.duration_s} s")
    if n == len(trace):
        return trace
    return SessionTrace(trace.scale, trace.segments[:n], trace.uniform_duration_s)


@dataclass(frozen=True)
class LabeledSequence:
    """A subjectively rated prefix of a session: the first `length_s` seconds of `trace`."""

    trace: SessionTrace
    length_s: float
    mos: float
    source: str = ""

    def __post_init__(self):
        if segments_in(self.length_s, self.trace.uniform_duration_s) is None or self.length_s <= 0:
            raise LengthNotAligned(f"rated length {self.length_s} s not aligned to segments")
        if self.length_s > self.trace.duration_s + ALIGN_TOL:
            raise LengthExceedsTrace(
                f"rated length {self.length_s} s exceeds trace duration {self.trace.duration_s} s")
        if not self.trace.scale.contains(self.mos):
            raise InvalidLabel(f"MOS {self.mos} outside scale")

    def sequence(self) -> SessionTrace:
        return prefix(self.trace, self.length_s)


@dataclass(frozen=True)
class LabeledDataset:
    items: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise EmptyDataset("dataset has no items")
        scales = {it.trace.scale for it in self.items}
        if len(scales) > 1:
            raise MixedScale("dataset items use different quality scales")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def scale(self) -> QualityScale:
        return self.items[0].trace.scale

    @property
    def mos(self) -> list:
        return [it.mos for it in self.items]

    @property
    def lengths(self) -> list:
        return [it.length_s for it in self.items]
