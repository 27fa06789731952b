"""Prediction metrics, split-averaged evaluation, one-way ANOVA and timing."""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .calibration import extract_features, feature_matrix, fit_alignment, fit_weights
from .errors import (
    DegenerateInput,
    InvalidWarmup,
    LengthMismatch,
    RankDeficientWarning,
    TooFewGroups,
    TooFewSamples,
    TraceTooShort,
)
from .predictor import DEFAULT_WEIGHTS, CqmWeights, StreamingCqm, scores_from_features
from .trace import LabeledDataset, SessionTrace
from .wqm import MeanModel, WindowQualityModel


def _pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"length mismatch: {x.shape} vs {y.shape}")
    return x, y


def pcc(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = _pair(x, y)
    if len(x) < 2:
        raise DegenerateInput("PCC needs at least 2 pairs")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("PCC undefined for a constant vector")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def rmse(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = _pair(x, y)
    if len(x) == 0:
        raise LengthMismatch("RMSE of empty vectors")
    d = x - y
    return math.sqrt(float(d @ d) / len(d))


# ---------------------------------------------------------------- predictors

class ScorePredictor:
    """Precomputed per-item scores, e.g. from an external model."""

    def __init__(self, scores, name="scores"):
        self.scores = np.asarray(scores, dtype=float)
        self.name = name

    def fit(self, train_idx):
        return self

    def predict(self, idx):
        return self.scores[np.asarray(idx)]


class WindowModelPredictor(ScorePredictor):
    """A window quality model applied to each whole rated prefix, as an overall-quality model."""

    def __init__(self, dataset: LabeledDataset, wqm: WindowQualityModel, name=None):
        scores = [wqm.score(it.sequence().qualities) for it in dataset]
        super().__init__(scores, name or wqm.name)
        self.wqm = wqm


class CqmPredictor:
    """Cumulative quality model on a dataset.

    With `weights` given the model is fixed; otherwise weights are refit on
    every training portion.
    """

    def __init__(self, dataset: LabeledDataset, wqm: Optional[WindowQualityModel] = None,
                 weights: Optional[CqmWeights] = None, nonneg: bool = False,
                 samples=None, name="CQM"):
        self.wqm = wqm if wqm is not None else MeanModel(dataset.scale)
        self.samples = samples if samples is not None else extract_features(dataset, self.wqm)
        self.X, self.y = feature_matrix(self.samples)
        self.lengths = dataset.lengths
        self.scale = dataset.scale
        self.fixed = weights
        self.weights = weights
        self.nonneg = nonneg
        self.name = name

    def fit(self, train_idx):
        if self.fixed is None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RankDeficientWarning)
                self.weights = fit_weights([self.samples[i] for i in train_idx], self.nonneg)
        return self

    def predict(self, idx):
        idx = np.asarray(idx)
        return scores_from_features(self.X[idx], self.weights or DEFAULT_WEIGHTS, self.scale,
                                    np.asarray(self.lengths)[idx])


# ---------------------------------------------------------------- evaluation

@dataclass
class MetricReport:
    name: str
    pcc: float
    rmse: float
    n: int
    by_length: Dict[float, tuple] = field(default_factory=dict)
    per_split: List[dict] = field(default_factory=list)
    slope: Optional[float] = None
    intercept: Optional[float] = None


def evaluate_model(dataset: LabeledDataset, predictor, splits, align: bool = False) -> MetricReport:
    """Average test-set PCC and RMSE over `splits`.

    With `align`, a first-order mapping from scores to MOS is fitted on each
    training portion and applied to the matching test predictions. The
    per-length breakdown pools test predictions of all splits.
    """
    mos = np.asarray(dataset.mos, dtype=float)
    lengths = np.asarray(dataset.lengths, dtype=float)
    rows = []
    pooled_p, pooled_y, pooled_len = [], [], []
    for i, (tr, te) in enumerate(splits):
        predictor.fit(tr)
        p_te = np.asarray(predictor.predict(te), dtype=float)
        slope = intercept = None
        if align:
            a = fit_alignment(predictor.predict(tr), mos[tr])
            p_te = a.apply(p_te)
            slope, intercept = a.slope, a.intercept
        try:
            r = pcc(p_te, mos[te])
        except DegenerateInput:
            r = float("nan")
        rows.append({"split": i, "pcc": r, "rmse": rmse(p_te, mos[te]),
                     "slope": slope, "intercept": intercept, "n": len(te)})
        pooled_p.append(p_te)
        pooled_y.append(mos[te])
        pooled_len.append(lengths[te])
    pooled_p = np.concatenate(pooled_p)
    pooled_y = np.concatenate(pooled_y)
    pooled_len = np.concatenate(pooled_len)
    by_length = {}
    for length in np.unique(pooled_len):
        m = pooled_len == length
        try:
            r = pcc(pooled_p[m], pooled_y[m])
        except DegenerateInput:
            r = float("nan")
        by_length[float(length)] = (r, rmse(pooled_p[m], pooled_y[m]), int(m.sum()))
    return MetricReport(
        name=getattr(predictor, "name", "model"),
        pcc=float(np.mean([r["pcc"] for r in rows])),
        rmse=float(np.mean([r["rmse"] for r in rows])),
        n=len(pooled_p),
        by_length=by_length,
        per_split=rows,
        slope=float(np.mean([r["slope"] for r in rows])) if align else None,
        intercept=float(np.mean([r["intercept"] for r in rows])) if align else None,
    )


# --------------------------------------------------------------------- ANOVA

@dataclass(frozen=True)
class AnovaResult:
    F: float
    df_between: int
    df_within: int
    p: float
    eta_p2: float
    ss_between: float
    ss_within: float


def _betacf(a, b, x, eps=1e-16, max_iter=10000):
    # modified Lentz evaluation of the incomplete beta continued fraction
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularised incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def f_sf(F: float, d1: float, d2: float) -> float:
    """Survival function of the F distribution."""
    if F <= 0:
        return 1.0
    if math.isinf(F):
        return 0.0
    return betainc_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * F))


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """One-way ANOVA with partial eta squared.

    >>> r = anova_oneway([[1, 2, 3], [4, 5, 6]])
    >>> r.F, (r.df_between, r.df_within), round(r.eta_p2, 4)
    (13.5, (1, 4), 0.7714)
    """
    if len(groups) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(groups)}")
    arrs = [np.asarray(g, dtype=float) for g in groups]
    for i, g in enumerate(arrs):
        if len(g) < 2:
            raise TooFewSamples(f"group {i} has {len(g)} sample(s), need at least 2")
    grand = np.concatenate(arrs).mean()
    ss_between = math.fsum(len(g) * (g.mean() - grand) ** 2 for g in arrs)
    ss_within = math.fsum(float(((g - g.mean()) ** 2).sum()) for g in arrs)
    k = len(arrs)
    n = sum(len(g) for g in arrs)
    df_b, df_w = k - 1, n - k
    total = ss_between + ss_within
    eta = ss_between / total if total > 0 else 0.0
    if ss_within == 0.0:
        F = 0.0 if ss_between == 0.0 else math.inf
    else:
        F = (ss_between / df_b) / (ss_within / df_w)
    return AnovaResult(F, df_b, df_w, f_sf(F, df_b, df_w), eta, ss_between, ss_within)


def quantile_groups(values: Sequence[float], responses: Sequence[float], q: int = 4) -> List[np.ndarray]:
    """Split `responses` into `q` groups by quantiles of `values`.

    A grouping convention for testing whether a window statistic has an
    effect on MOS; empty groups are dropped.
    """
    v, r = _pair(values, responses)
    edges = np.quantile(v, np.linspace(0, 1, q + 1)[1:-1])
    labels = np.searchsorted(edges, v, side="right")
    return [r[labels == g] for g in range(q) if (labels == g).any()]


# ------------------------------------------------------------------- timing

def _check_bench(trace, warmup):
    if len(trace) < 100:
        raise TraceTooShort(f"benchmark needs >= 100 segments, got {len(trace)}")
    if warmup < 0 or warmup >= len(trace):
        raise InvalidWarmup(f"warmup {warmup} leaves no timed segments of {len(trace)}")


def bench_per_segment(trace: SessionTrace, weights: CqmWeights = DEFAULT_WEIGHTS,
                      wqm: Optional[WindowQualityModel] = None, warmup: int = 0,
                      incremental: bool = False) -> float:
    """Mean wall time in ms to push one segment and read the cumulative value.

    The first `warmup` segments are processed but not timed.
    """
    _check_bench(trace, warmup)
    est = StreamingCqm(weights, wqm, trace.uniform_duration_s, trace.scale, incremental)
    q = trace.qualities
    push = est.push
    for x in q[:warmup]:
        push(x)
    timed = q[warmup:]
    t0 = time.perf_counter_ns()
    for x in timed:
        push(x)
    t1 = time.perf_counter_ns()
    return (t1 - t0) / len(timed) / 1e6


def bench_prefix_model(trace: SessionTrace, wqm: WindowQualityModel, warmup: int = 0) -> float:
    """Mean ms per segment for rescoring the whole watched prefix every segment."""
    _check_bench(trace, warmup)
    q = trace.qualities
    t0 = time.perf_counter_ns()
    for n in range(warmup + 1, len(q) + 1):
        wqm.score(q[:n])
    t1 = time.perf_counter_ns()
    return (t1 - t0) / (len(q) - warmup) / 1e6
