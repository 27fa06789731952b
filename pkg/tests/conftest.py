import math

import numpy as np
import pytest

from cqm.trace import SessionTrace

ACCEPTANCE = []


def brute_window_stats(q, k, score):
    """(f, l, av, mi, ma) over every length-k slice of q, by enumeration."""
    wq = [score(list(q[i:i + k])) for i in range(len(q) - k + 1)]
    if not wq:
        return None
    return wq[0], wq[-1], math.fsum(wq) / len(wq), min(wq), max(wq)


def brute_cqm(q, weights, score, lo=1.0, hi=5.0):
    """Cumulative value after the last segment of q, bootstrap rule included."""
    n = len(q)
    whole = score(list(q))
    if n < 50:
        return min(max(whole, lo), hi)
    _, l50, _, mi50, ma50 = brute_window_stats(q, 50, score)
    av60 = brute_window_stats(q, 60, score)[2] if n >= 60 else whole
    v = weights.w1 * l50 + weights.w2 * av60 + weights.w3 * mi50 + weights.w4 * ma50
    return min(max(v, lo), hi)


def random_trace(rng, n, lo=1.0, hi=5.0):
    return SessionTrace.from_qualities(rng.uniform(lo, hi, n).tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome for the end-of-run summary."""
    def record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
