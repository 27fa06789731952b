"""Sliding-window statistics.

A window of ``K`` segments slides over the session one segment at a time.
Each time it completes, the attached window quality model scores it and five
running statistics are updated: first, last, average, minimum and maximum
window quality over all windows seen so far. The update costs O(1) on top of
the model's own O(K) scoring.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import QualityOutOfRange, TraceTooShort, UnknownWindowSize, WindowNotAligned
from .trace import DEFAULT_SCALE, QualityScale, SessionTrace, segments_in
from .wqm import MeanModel, WindowQualityModel

STAT_NAMES = ("f", "l", "av", "mi", "ma")


@dataclass(frozen=True)
class WindowStatsState:
    """Value snapshot of the statistics for one window size."""

    K_segments: int
    n_windows: int
    f: float
    l: float
    av: float
    mi: float
    ma: float
    ring: tuple = ()

    def stats(self) -> tuple:
        return (self.f, self.l, self.av, self.mi, self.ma)


class WindowStats:
    """Incremental statistics for a single window size of `k` segments."""

    __slots__ = ("k", "wqm", "ring", "n_windows", "f", "l", "av", "mi", "ma", "_sliding")

    def __init__(self, k: int, wqm: WindowQualityModel, incremental: bool = False):
        if k < 1:
            raise ValueError("window size must be >= 1 segment")
        self.k = k
        self.wqm = wqm
        self.ring = deque(maxlen=k)
        self.n_windows = 0
        self.f = self.l = self.av = self.mi = self.ma = math.nan
        self._sliding = wqm.sliding(k) if incremental else None

    def push(self, q: float) -> Optional[float]:
        """Add one segment; return the new window quality, if a window completed."""
        ring = self.ring
        ring.append(q)
        if self._sliding is not None:
            wq = self._sliding.push(q)
            if wq is None:
                return None
        elif len(ring) < self.k:
            return None
        else:
            wq = self.wqm.score(ring)
        n = self.n_windows + 1
        self.n_windows = n
        if n == 1:
            self.f = self.l = self.av = self.mi = self.ma = wq
        else:
            self.l = wq
            self.av = (self.av * (n - 1) + wq) / n
            if wq < self.mi:
                self.mi = wq
            if wq > self.ma:
                self.ma = wq
        return wq

    def snapshot(self) -> Optional[WindowStatsState]:
        if self.n_windows == 0:
            return None
        return WindowStatsState(self.k, self.n_windows, self.f, self.l, self.av,
                                self.mi, self.ma, tuple(self.ring))


class MultiKTracker:
    """Tracks window statistics for several window sizes over one segment stream.

    Parameters
    ----------
    window_sizes_s : iterable of int
        Window sizes in seconds; each must be a whole multiple of
        `segment_duration_s`.
    wqm : WindowQualityModel, optional
        Scorer applied to every completed window; plain mean by default.
    segment_duration_s : float
        Shared duration of the segments that will be pushed.
    incremental : bool
        Use the model's O(1) sliding scorer where it provides one.

    Single-writer: do not push from several threads at once.
    """

    def __init__(self, window_sizes_s: Iterable[int], wqm: Optional[WindowQualityModel] = None,
                 segment_duration_s: float = 1.0, scale: Optional[QualityScale] = None,
                 incremental: bool = False):
        self.wqm = wqm if wqm is not None else MeanModel(scale or DEFAULT_SCALE)
        self.scale = scale or self.wqm.scale
        self.segment_duration_s = segment_duration_s
        self.states: Dict[int, WindowStats] = {}
        for ks in window_sizes_s:
            k = segments_in(ks, segment_duration_s)
            if k is None or k < 1:
                raise WindowNotAligned(
                    f"window of {ks} s is not a whole number of {segment_duration_s} s segments")
            self.states[ks] = WindowStats(k, self.wqm, incremental)
        self.segments_seen = 0

    def push(self, quality: float) -> "MultiKTracker":
        if not (self.scale.lo <= quality <= self.scale.hi):
            raise QualityOutOfRange(self.segments_seen, quality, self.scale)
        for st in self.states.values():
            st.push(quality)
        self.segments_seen += 1
        return self

    def extend(self, qualities: Iterable[float]) -> "MultiKTracker":
        for q in qualities:
            self.push(q)
        return self

    def state(self, k_seconds: int) -> WindowStats:
        try:
            return self.states[k_seconds]
        except KeyError:
            raise UnknownWindowSize(f"window size {k_seconds} s is not tracked") from None

    def snapshot(self, k_seconds: int) -> Optional[WindowStatsState]:
        """Current statistics for window size `k_seconds`, or None while N < K."""
        return self.state(k_seconds).snapshot()


def push_segment(tracker: MultiKTracker, quality: float) -> MultiKTracker:
    return tracker.push(quality)


def stats_snapshot(tracker: MultiKTracker, k_seconds: int) -> Optional[WindowStatsState]:
    return tracker.snapshot(k_seconds)


def window_qualities(qualities, k: int, wqm: WindowQualityModel) -> np.ndarray:
    """Scores of every complete window of `k` segments, computed from scratch."""
    q = np.asarray(qualities, dtype=float)
    if len(q) < k:
        raise TraceTooShort(f"{len(q)} segments is shorter than a {k}-segment window")
    return wqm.score_many(sliding_window_view(q, k))


def batch_stats(trace: SessionTrace, k_seconds: int,
                wqm: Optional[WindowQualityModel] = None) -> WindowStatsState:
    """Statistics over all windows of the trace, without any recursion.

    Reference counterpart of :class:`MultiKTracker`.
    """
    wqm = wqm if wqm is not None else MeanModel(trace.scale)
    k = segments_in(k_seconds, trace.uniform_duration_s)
    if k is None or k < 1:
        raise WindowNotAligned(
            f"window of {k_seconds} s is not a whole number of {trace.uniform_duration_s} s segments")
    q = trace.qualities
    wq = window_qualities(q, k, wqm)
    return WindowStatsState(k, len(wq), float(wq[0]), float(wq[-1]),
                            math.fsum(wq) / len(wq), float(wq.min()), float(wq.max()),
                            tuple(q[-k:]))
