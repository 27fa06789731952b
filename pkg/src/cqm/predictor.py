"""Cumulative quality prediction.

The cumulative quality after N segments is a weighted sum of four window
statistics::

    cqm = w1 * last(50 s) + w2 * average(60 s) + w3 * min(50 s) + w4 * max(50 s)

Until the first 50 s window completes, the cumulative quality is the window
quality model applied to everything watched so far. Between 50 s and 60 s the
60 s average has no completed window yet; it falls back to the same
whole-prefix score, which keeps the curve continuous.
"""
from __future__ import annotations

from dataclasses import astuple, dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .errors import WindowNotAligned
from .trace import DEFAULT_SCALE, QualityScale, SessionTrace, segments_in
from .window import MultiKTracker
from .wqm import MeanModel, WindowQualityModel

RECENCY_WINDOW_S = 50
AVERAGE_WINDOW_S = 60
FEATURE_NAMES = ("l50", "av60", "mi50", "ma50")


@dataclass(frozen=True)
class CqmWeights:
    w1: float = 0.280
    w2: float = 0.426
    w3: float = 0.280
    w4: float = 0.014

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, w) -> "CqmWeights":
        w = [float(x) for x in w]
        if len(w) != 4:
            raise ValueError(f"expected 4 weights, got {len(w)}")
        return cls(*w)

    def to_dict(self) -> dict:
        return {"w1": self.w1, "w2": self.w2, "w3": self.w3, "w4": self.w4}

    @classmethod
    def from_dict(cls, d: dict) -> "CqmWeights":
        return cls(*(float(d[k]) for k in ("w1", "w2", "w3", "w4")))


DEFAULT_WEIGHTS = CqmWeights()


@dataclass(frozen=True)
class FeatureVector:
    l50: float
    av60: float
    mi50: float
    ma50: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)


@dataclass(frozen=True)
class CumulativeCurve:
    t_s: tuple
    cqm: tuple

    def __len__(self):
        return len(self.t_s)

    @property
    def points(self) -> list:
        return list(zip(self.t_s, self.cqm))

    def at(self, t_s: float) -> float:
        """Curve value at segment boundary `t_s`."""
        i = int(np.searchsorted(self.t_s, t_s - 1e-9))
        if i >= len(self.t_s) or abs(self.t_s[i] - t_s) > 1e-6:
            raise KeyError(f"no curve point at t={t_s} s")
        return self.cqm[i]

    def minutes(self) -> "CumulativeCurve":
        keep = [i for i, t in enumerate(self.t_s) if abs(t / 60.0 - round(t / 60.0)) < 1e-9]
        return CumulativeCurve(tuple(self.t_s[i] for i in keep), tuple(self.cqm[i] for i in keep))


def cqm_value(features: FeatureVector, weights: CqmWeights = DEFAULT_WEIGHTS,
              scale: QualityScale = DEFAULT_SCALE) -> float:
    v = (weights.w1 * features.l50 + weights.w2 * features.av60
         + weights.w3 * features.mi50 + weights.w4 * features.ma50)
    return scale.clamp(v)


class StreamingCqm:
    """Real-time cumulative quality estimator: push one segment, read one value.

    >>> est = StreamingCqm()
    >>> [round(est.push(q), 3) for q in (3.0, 4.0)]
    [3.0, 3.5]
    """

    def __init__(self, weights: CqmWeights = DEFAULT_WEIGHTS,
                 wqm: Optional[WindowQualityModel] = None,
                 segment_duration_s: float = 1.0,
                 scale: Optional[QualityScale] = None,
                 incremental: bool = False):
        for ks in (RECENCY_WINDOW_S, AVERAGE_WINDOW_S):
            if segments_in(ks, segment_duration_s) is None:
                raise WindowNotAligned(
                    f"segment duration {segment_duration_s} s does not divide {ks} s")
        self.weights = weights
        self.wqm = wqm if wqm is not None else MeanModel(scale or DEFAULT_SCALE)
        self.scale = scale or self.wqm.scale
        self.segment_duration_s = segment_duration_s
        self.tracker = MultiKTracker((RECENCY_WINDOW_S, AVERAGE_WINDOW_S), self.wqm,
                                     segment_duration_s, self.scale, incremental)
        self._recent = self.tracker.state(RECENCY_WINDOW_S)
        self._average = self.tracker.state(AVERAGE_WINDOW_S)
        # the longest ring holds the whole prefix while any window is incomplete
        self._longest = max(self.tracker.states.values(), key=lambda s: s.k)

    @property
    def n(self) -> int:
        return self.tracker.segments_seen

    def push(self, quality: float) -> float:
        self.tracker.push(quality)
        return self.value()

    def _prefix_score(self) -> float:
        return self.wqm.score(self._longest.ring)

    def features(self) -> FeatureVector:
        rec, avg = self._recent, self._average
        if rec.n_windows == 0:
            s = self._prefix_score()
            return FeatureVector(*(float(s),) * 4)
        av = avg.av if avg.n_windows else self._prefix_score()
        return FeatureVector(float(rec.l), float(av), float(rec.mi), float(rec.ma))

    def value(self) -> float:
        if self.n == 0:
            raise ValueError("no segments pushed yet")
        if self._recent.n_windows == 0:
            return self.scale.clamp(self._prefix_score())
        return cqm_value(self.features(), self.weights, self.scale)


def predict_curve(trace: SessionTrace, weights: CqmWeights = DEFAULT_WEIGHTS,
                  wqm: Optional[WindowQualityModel] = None,
                  incremental: bool = False) -> CumulativeCurve:
    """Cumulative quality at every segment boundary of `trace`."""
    est = StreamingCqm(weights, wqm, trace.uniform_duration_s, trace.scale, incremental)
    d = trace.uniform_duration_s
    t, v = [], []
    for i, seg in enumerate(trace.segments, start=1):
        v.append(est.push(seg.quality))
        t.append(i * d)
    return CumulativeCurve(tuple(t), tuple(v))


def final_features(qualities: Iterable[float], wqm: Optional[WindowQualityModel] = None,
                   segment_duration_s: float = 1.0,
                   scale: Optional[QualityScale] = None) -> FeatureVector:
    est = StreamingCqm(DEFAULT_WEIGHTS, wqm, segment_duration_s, scale)
    for q in qualities:
        est.tracker.push(q)
    return est.features()


def scores_from_features(X, weights: CqmWeights, scale: QualityScale = DEFAULT_SCALE,
                         lengths_s: Optional[Sequence[float]] = None) -> np.ndarray:
    """Vectorised :func:`cqm_value` over rows of a feature matrix.

    Rows whose rated length is shorter than the recency window are in the
    bootstrap region: their value is the whole-prefix window score, which is
    stored in every feature column.
    """
    X = np.asarray(X, dtype=float).reshape(-1, 4)
    v = np.clip(X @ weights.as_array(), scale.lo, scale.hi)
    if lengths_s is not None:
        short = np.asarray(lengths_s, dtype=float) < RECENCY_WINDOW_S - 1e-9
        v[short] = np.clip(X[short, 0], scale.lo, scale.hi)
    return v
