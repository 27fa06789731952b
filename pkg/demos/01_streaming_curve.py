"""
Cumulative quality of a single session
======================================

A quality drop in the middle of a session pulls the cumulative estimate down,
and the estimate recovers only slowly once quality is restored.
"""

import numpy as np

from cqm import StreamingCqm, SessionTrace, predict_curve

# Four minutes at quality 4.5 with a one-minute dip to 2.0 in the middle.
q = np.r_[np.full(90, 4.5), np.full(60, 2.0), np.full(90, 4.5)]
curve = predict_curve(SessionTrace.from_qualities(q.tolist()))

for t, v in curve.minutes().points:
    print(f"t={t:5.0f} s  cumulative={v:.3f}")

# The same numbers arrive one segment at a time from the streaming estimator.
est = StreamingCqm()
live = [est.push(x) for x in q]
print("streaming matches batch:", np.allclose(live, curve.cqm, atol=1e-12))
print("features at the end:", est.features())
