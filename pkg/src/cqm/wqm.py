"""Window quality models.

A window quality model maps the qualities of the segments inside one window
to a single score on the quality scale. Four configurable baselines are
provided, one per statistic family commonly used by overall-quality models:
plain average, average penalised by spread, average penalised by switching
amplitude, and a weighted histogram of levels and drops.

All scores are clamped to the scale at the model boundary.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyWindow, UnknownModel, WeightDimensionMismatch
from .trace import DEFAULT_SCALE, QualityScale


def _check(window):
    if len(window) == 0:
        raise EmptyWindow("window has no segments")


def score_mean(window: Sequence[float], scale: QualityScale = DEFAULT_SCALE) -> float:
    _check(window)
    return scale.clamp(sum(window) / len(window))


def score_mean_std(window: Sequence[float], alpha: float = 1.0,
                   scale: QualityScale = DEFAULT_SCALE) -> float:
    """Mean minus `alpha` population standard deviations."""
    _check(window)
    n = len(window)
    mean = sum(window) / n
    var = sum((q - mean) ** 2 for q in window) / n
    return scale.clamp(mean - alpha * math.sqrt(var))


def score_switch_penalty(window: Sequence[float], lam: float = 0.5,
                         scale: QualityScale = DEFAULT_SCALE) -> float:
    """Mean minus `lam` times the mean absolute switching amplitude."""
    _check(window)
    w = list(window)
    mean = sum(w) / len(w)
    if len(w) == 1:
        return scale.clamp(mean)
    amp = sum(abs(b - a) for a, b in zip(w, w[1:])) / (len(w) - 1)
    return scale.clamp(mean - lam * amp)


def _bin_index(x, lo, width, bins):
    # half-open bins, the last one closed at the upper edge
    i = int((x - lo) // width)
    if i < 0:
        return 0
    if i >= bins:
        return bins - 1
    return i


def bin_centers(bins: int, scale: QualityScale = DEFAULT_SCALE) -> list:
    width = scale.span / bins
    return [scale.lo + (i + 0.5) * width for i in range(bins)]


def histograms(window: Sequence[float], bins: int = 4, scale: QualityScale = DEFAULT_SCALE):
    """Normalised value and drop histograms of a window.

    The value histogram counts segment qualities over `bins` equal-width bins
    spanning the scale and is normalised by the number of segments. The drop
    histogram counts strictly negative switching amplitudes by magnitude over
    `bins` equal-width bins spanning ``[0, hi - lo]`` and is normalised by the
    number of transitions, so a window without drops has an all-zero drop
    histogram.
    """
    _check(window)
    w = list(window)
    lo, span = scale.lo, scale.span
    width = span / bins
    values = [0.0] * bins
    for q in w:
        values[_bin_index(q, lo, width, bins)] += 1.0
    n = len(w)
    values = [c / n for c in values]
    drops = [0.0] * bins
    if n > 1:
        for a, b in zip(w, w[1:]):
            if b < a:
                drops[_bin_index(a - b, 0.0, width, bins)] += 1.0
        drops = [c / (n - 1) for c in drops]
    return values, drops


def score_histogram(window: Sequence[float], bins: int = 4,
                    value_weights: Optional[Sequence[float]] = None,
                    drop_weights: Optional[Sequence[float]] = None,
                    scale: QualityScale = DEFAULT_SCALE) -> float:
    _check(window)
    if bins < 2:
        raise WeightDimensionMismatch("histogram needs at least 2 bins")
    if value_weights is None:
        value_weights = bin_centers(bins, scale)
    if drop_weights is None:
        drop_weights = [0.0] * bins
    if len(value_weights) != bins or len(drop_weights) != bins:
        raise WeightDimensionMismatch(
            f"expected {bins} value and drop weights, got "
            f"{len(value_weights)} and {len(drop_weights)}")
    values, drops = histograms(window, bins, scale)
    s = sum(v * h for v, h in zip(value_weights, values))
    s -= sum(d * h for d, h in zip(drop_weights, drops))
    return scale.clamp(s)


class WindowQualityModel:
    """Base class for pluggable window scorers.

    Subclasses implement :meth:`score`. :meth:`score_many` scores a 2-D array
    of equal-length windows and may be overridden with a vectorised version.
    """

    name = "base"

    def __init__(self, scale: QualityScale = DEFAULT_SCALE):
        self.scale = scale

    def score(self, window: Sequence[float]) -> float:
        raise NotImplementedError

    def __call__(self, window):
        return self.score(window)

    def score_many(self, windows) -> np.ndarray:
        return np.array([self.score(w) for w in np.asarray(windows)], dtype=float)

    def params(self) -> dict:
        return {}

    def with_scale(self, scale: QualityScale) -> "WindowQualityModel":
        return type(self)(scale=scale, **self.params())

    def sliding(self, k: int):
        """Incremental scorer for a window of `k` segments, or None."""
        return None

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class MeanModel(WindowQualityModel):
    name = "mean"

    def score(self, window):
        return score_mean(window, self.scale)

    def score_many(self, windows):
        w = np.asarray(windows, dtype=float)
        return np.clip(w.mean(axis=1), self.scale.lo, self.scale.hi)

    def sliding(self, k):
        return _SlidingMean(k, self.scale)


class _SlidingMean:
    """Running-sum window mean, O(1) per push."""

    # the sum is rebuilt from the buffer this often to bound round-off drift
    RESUM_EVERY = 4096

    def __init__(self, k, scale):
        from collections import deque
        self.k = k
        self.scale = scale
        self.buf = deque(maxlen=k)
        self.total = 0.0
        self.count = 0

    def push(self, q):
        buf = self.buf
        if len(buf) == self.k:
            self.total -= buf[0]
        buf.append(q)
        self.total += q
        self.count += 1
        if self.count % self.RESUM_EVERY == 0:
            self.total = math.fsum(buf)
        if len(buf) < self.k:
            return None
        return self.scale.clamp(self.total / self.k)


class MeanStdModel(WindowQualityModel):
    name = "mean_std"

    def __init__(self, alpha: float = 1.0, scale: QualityScale = DEFAULT_SCALE):
        super().__init__(scale)
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        self.alpha = float(alpha)

    def score(self, window):
        return score_mean_std(window, self.alpha, self.scale)

    def score_many(self, windows):
        w = np.asarray(windows, dtype=float)
        s = w.mean(axis=1) - self.alpha * w.std(axis=1)
        return np.clip(s, self.scale.lo, self.scale.hi)

    def params(self):
        return {"alpha": self.alpha}


class SwitchPenaltyModel(WindowQualityModel):
    name = "switch_penalty"

    def __init__(self, lam: float = 0.5, scale: QualityScale = DEFAULT_SCALE):
        super().__init__(scale)
        if lam < 0:
            raise ValueError("lambda must be >= 0")
        self.lam = float(lam)

    def score(self, window):
        return score_switch_penalty(window, self.lam, self.scale)

    def params(self):
        return {"lam": self.lam}


class HistogramModel(WindowQualityModel):
    name = "histogram"

    def __init__(self, bins: int = 4, value_weights=None, drop_weights=None,
                 scale: QualityScale = DEFAULT_SCALE):
        super().__init__(scale)
        bins = int(bins)
        if bins < 2:
            raise WeightDimensionMismatch("histogram needs at least 2 bins")
        if value_weights is not None and len(value_weights) != bins:
            raise WeightDimensionMismatch(f"expected {bins} value weights")
        if drop_weights is not None and len(drop_weights) != bins:
            raise WeightDimensionMismatch(f"expected {bins} drop weights")
        self.bins = bins
        self.value_weights = None if value_weights is None else [float(v) for v in value_weights]
        self.drop_weights = None if drop_weights is None else [float(v) for v in drop_weights]
        # resolved weights, fixed at construction so scoring stays cheap
        self._vw = self.value_weights or bin_centers(bins, scale)
        self._dw = self.drop_weights or [0.0] * bins

    def score(self, window):
        return score_histogram(window, self.bins, self._vw, self._dw, self.scale)

    def params(self):
        return {"bins": self.bins, "value_weights": self.value_weights,
                "drop_weights": self.drop_weights}


MODELS = {
    cls.name: cls for cls in (MeanModel, MeanStdModel, SwitchPenaltyModel, HistogramModel)
}

# user-facing parameter names -> constructor keywords
_PARAM_ALIASES = {"lambda": "lam"}


def make_wqm(name: str = "mean", scale: QualityScale = DEFAULT_SCALE, **params) -> WindowQualityModel:
    """Build a window quality model by registry name.

    >>> make_wqm("mean_std", alpha=0.5)
    MeanStdModel(alpha=0.5)
    """
    try:
        cls = MODELS[name]
    except KeyError:
        raise UnknownModel(
            f"unknown window quality model {name!r}; choose from {sorted(MODELS)}") from None
    kwargs = {_PARAM_ALIASES.get(k, k): v for k, v in params.items()}
    try:
        return cls(scale=scale, **kwargs)
    except TypeError as exc:
        raise UnknownModel(f"bad parameters for {name!r}: {exc}") from None
