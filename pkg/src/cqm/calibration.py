"""Weight fitting, random train/test splits and linear score alignment."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DatasetTooSmall,
    DegenerateInput,
    InsufficientSamples,
    InvalidPlan,
    LengthMismatch,
    RankDeficientWarning,
)
from .predictor import CqmWeights, FeatureVector, final_features, scores_from_features
from .trace import LabeledDataset
from .wqm import MeanModel, WindowQualityModel

RIDGE = 1e-9


@dataclass(frozen=True)
class SplitPlan:
    """Repeated random halving of a dataset.

    Each repeat draws an independent permutation from a PCG64 generator
    seeded with ``SeedSequence(seed).spawn(repeats)[i]`` and cuts it after
    ``round(train_fraction * n)`` items (Python's round: ties to even).
    """

    seed: int = 0
    repeats: int = 50
    train_fraction: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "train_fraction", Fraction(self.train_fraction).limit_denominator(10**6))
        if self.repeats < 1:
            raise InvalidPlan("repeats must be >= 1")
        if not 0 < self.train_fraction < 1:
            raise InvalidPlan("train_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class AlignmentCoeffs:
    slope: float
    intercept: float

    def apply(self, predicted):
        return self.slope * np.asarray(predicted, dtype=float) + self.intercept


def extract_features(dataset: LabeledDataset, wqm: Optional[WindowQualityModel] = None):
    """Feature vector at the end of every labeled prefix, paired with its MOS."""
    wqm = wqm if wqm is not None else MeanModel(dataset.scale)
    out = []
    for item in dataset:
        seq = item.sequence()
        fv = final_features(seq.qualities, wqm, seq.uniform_duration_s, seq.scale)
        out.append((fv, item.mos))
    return out


def feature_matrix(samples) -> Tuple[np.ndarray, np.ndarray]:
    X = np.array([fv.as_array() if isinstance(fv, FeatureVector) else fv for fv, _ in samples],
                 dtype=float).reshape(-1, 4)
    y = np.array([m for _, m in samples], dtype=float)
    return X, y


def _solve(X, y, active):
    Xa = X[:, active]
    A = Xa.T @ Xa + RIDGE * np.eye(Xa.shape[1])
    return np.linalg.solve(A, Xa.T @ y)


def fit_weights(samples, nonneg: bool = False, full_output: bool = False):
    """Least-squares weights (no intercept) for ``mos ~ features @ w``.

    Parameters
    ----------
    samples : sequence of (FeatureVector, float)
    nonneg : bool
        Clip negative weights to zero and refit the rest until every active
        weight is nonnegative.
    full_output : bool
        Also return a dict with ``rank``, ``rank_deficient`` and ``active``.
    """
    X, y = feature_matrix(samples)
    if len(y) < 4:
        raise InsufficientSamples(f"need at least 4 samples, got {len(y)}")
    rank = int(np.linalg.matrix_rank(X))
    if rank < 4:
        warnings.warn(f"feature matrix has rank {rank} < 4; ridge-regularised solution",
                      RankDeficientWarning, stacklevel=2)
    active = np.ones(4, dtype=bool)
    w = np.zeros(4)
    while True:
        w[:] = 0.0
        w[active] = _solve(X, y, active)
        if not nonneg or (w[active] >= 0).all():
            break
        active &= w > 0
        if not active.any():
            w[:] = 0.0
            break
    weights = CqmWeights.from_array(w)
    if full_output:
        return weights, {"rank": rank, "rank_deficient": rank < 4, "active": active.copy()}
    return weights


def make_splits(n_items, plan: SplitPlan = SplitPlan()) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Random disjoint (train, test) index pairs, sorted within each part."""
    n = n_items if isinstance(n_items, (int, np.integer)) else len(n_items)
    if n < 2:
        raise DatasetTooSmall(f"need at least 2 items to split, got {n}")
    n_train = round(plan.train_fraction * n)
    n_train = min(max(n_train, 1), n - 1)
    children = np.random.SeedSequence(plan.seed).spawn(plan.repeats)
    splits = []
    for child in children:
        perm = np.random.Generator(np.random.PCG64(child)).permutation(n)
        splits.append((np.sort(perm[:n_train]), np.sort(perm[n_train:])))
    return splits


def fit_alignment(predicted: Sequence[float], mos: Sequence[float]) -> AlignmentCoeffs:
    """First-order regression of MOS on predicted scores."""
    x = np.asarray(predicted, dtype=float)
    y = np.asarray(mos, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"{len(x)} predictions vs {len(y)} scores")
    if len(x) < 2:
        raise DegenerateInput("need at least 2 points for alignment")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0 or sxx <= 1e-24 * len(x):
        raise DegenerateInput("predicted scores have zero variance")
    slope = float(dx @ (y - y.mean())) / sxx
    return AlignmentCoeffs(slope, float(y.mean() - slope * x.mean()))


@dataclass(frozen=True)
class SplitFit:
    split: int
    train_rmse: float
    test_rmse: float
    test_pcc: float
    weights: CqmWeights


def train_weights(dataset: LabeledDataset, wqm: Optional[WindowQualityModel] = None,
                  plan: SplitPlan = SplitPlan(), nonneg: bool = False, samples=None):
    """Fit on every training half and keep the split with the lowest test RMSE.

    Returns ``(best_weights, fits)`` where `fits` has one :class:`SplitFit`
    per split, in split order.
    """
    from .evaluation import pcc, rmse

    if samples is None:
        samples = extract_features(dataset, wqm)
    X, y = feature_matrix(samples)
    fits = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficientWarning)
        for i, (tr, te) in enumerate(make_splits(len(samples), plan)):
            w = fit_weights([samples[j] for j in tr], nonneg=nonneg)
            p = scores_from_features(X, w, dataset.scale, dataset.lengths)
            try:
                tp = pcc(p[te], y[te])
            except DegenerateInput:
                tp = float("nan")
            fits.append(SplitFit(i, rmse(p[tr], y[tr]), rmse(p[te], y[te]), tp, w))
    best = min(fits, key=lambda f: (f.test_rmse, f.split))
    return best.weights, fits
