import numpy as np
import pytest
from hypothesis import given, strategies as st

from cqm.errors import EmptyWindow, UnknownModel, WeightDimensionMismatch
from cqm.trace import QualityScale
from cqm.wqm import (
    HistogramModel,
    MeanModel,
    MeanStdModel,
    SwitchPenaltyModel,
    histograms,
    make_wqm,
    score_histogram,
    score_mean,
    score_mean_std,
    score_switch_penalty,
)

windows = st.lists(st.floats(1, 5), min_size=1, max_size=60)
ALL_MODELS = [MeanModel(), MeanStdModel(), SwitchPenaltyModel(), HistogramModel(),
              MeanStdModel(alpha=3.0), SwitchPenaltyModel(lam=4.0),
              HistogramModel(bins=3, drop_weights=[1.0, 2.0, 3.0])]


def test_mean():
    assert score_mean([2, 3, 4]) == 3.0
    assert score_mean([1, 5]) == 3.0
    assert score_mean([4.2] * 7) == pytest.approx(4.2, abs=1e-15)


def test_mean_std():
    assert score_mean_std([3, 3, 3], 1.0) == 3.0
    # population std of {2, 4} is 1
    assert score_mean_std([2, 4], 1.0) == pytest.approx(2.0)
    assert score_mean_std([1, 5], 2.0) == 1.0


def test_switch_penalty():
    assert score_switch_penalty([3, 3, 3, 3], 7.0) == 3.0
    assert score_switch_penalty([2, 4, 2], 0.5) == pytest.approx(5 / 3)
    assert score_switch_penalty([2.5], 1.0) == 2.5


def test_histogram():
    # bins [1,2) [2,3) [3,4) [4,5]; 3 falls in the third, centre 3.5
    assert score_histogram([3.0] * 10, bins=4) == 3.5
    assert score_histogram([1, 5], bins=2, value_weights=[1, 5], drop_weights=[0, 0]) == 3.0
    assert score_histogram([5.0], bins=4) == 4.5
    with pytest.raises(WeightDimensionMismatch):
        score_histogram([3.0], bins=4, value_weights=[1, 2])


def test_histogram_drop_term():
    # one drop of 3 among 2 transitions, landing in drop bin [2,4] of 2 bins
    values, drops = histograms([5, 2, 2], bins=2)
    assert values == pytest.approx([2 / 3, 1 / 3])
    assert drops == pytest.approx([0.0, 0.5])
    s = score_histogram([5, 2, 2], bins=2, value_weights=[2, 4], drop_weights=[0, 1])
    assert s == pytest.approx(2 * 2 / 3 + 4 * 1 / 3 - 0.5)


@pytest.mark.parametrize("fn", [score_mean, score_mean_std, score_switch_penalty, score_histogram])
def test_empty_window(fn):
    with pytest.raises(EmptyWindow):
        fn([])


@given(windows)
def test_outputs_in_scale(w):
    for m in ALL_MODELS:
        assert 1.0 <= m.score(w) <= 5.0


@given(st.floats(1, 5), st.integers(1, 60))
def test_constant_window(q, n):
    w = [q] * n
    for m in (MeanModel(), MeanStdModel(), SwitchPenaltyModel()):
        assert m.score(w) == pytest.approx(q, abs=1e-12)
    # default histogram weights land within half a bin of the constant
    assert abs(HistogramModel().score(w) - q) <= 0.5 + 1e-12


@given(windows, st.randoms())
def test_permutation_invariance(w, r):
    p = list(w)
    r.shuffle(p)
    assert score_mean(p) == pytest.approx(score_mean(w), abs=1e-12)
    assert HistogramModel().score(p) == HistogramModel().score(w)


def test_switch_penalty_depends_on_order():
    assert score_switch_penalty([2, 4, 2, 4], 0.5) != score_switch_penalty([2, 2, 4, 4], 0.5)


@given(st.lists(st.floats(1, 3), min_size=2, max_size=40), st.floats(0, 2))
def test_shift_by_constant(w, c):
    shifted = [x + c for x in w]
    assert score_mean(shifted) == pytest.approx(score_mean(w) + c, abs=1e-9)
    std = lambda v: float(np.std(v))
    assert std(shifted) == pytest.approx(std(w), abs=1e-9)
    amp = lambda v: float(np.mean(np.abs(np.diff(v))))
    assert amp(shifted) == pytest.approx(amp(w), abs=1e-9)
    # unclamped region: penalties unchanged, so scores shift by c too
    m = MeanStdModel(alpha=0.0)
    assert m.score(shifted) == pytest.approx(m.score(w) + c, abs=1e-9)


@given(windows)
def test_deterministic(w):
    for m in ALL_MODELS:
        assert m.score(w) == m.score(list(w))


def test_score_many_matches_score(rng):
    W = rng.uniform(1, 5, (30, 12))
    for m in ALL_MODELS:
        np.testing.assert_allclose(m.score_many(W), [m.score(list(r)) for r in W], atol=1e-12)


def test_sliding_mean_agrees_with_rescoring(rng):
    q = rng.uniform(1, 5, 10_000)
    s = MeanModel().sliding(60)
    got = [s.push(x) for x in q]
    assert got[:59] == [None] * 59
    ref = np.convolve(q, np.ones(60) / 60, mode="valid")
    np.testing.assert_allclose(got[59:], ref, atol=1e-9)


def test_registry():
    assert isinstance(make_wqm("histogram", bins=2, value_weights=[1, 5]), HistogramModel)
    assert make_wqm("switch_penalty", **{"lambda": 0.2}).lam == 0.2
    with pytest.raises(UnknownModel):
        make_wqm("p1203")
    with pytest.raises(UnknownModel):
        make_wqm("mean", gamma=1)


def test_scale_aware():
    m = make_wqm("mean_std", scale=QualityScale(0, 1), alpha=10)
    assert m.score([0.2, 0.8]) == 0.0
