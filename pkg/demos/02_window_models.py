"""
Choosing a window quality model
===============================

Each window of segments gets one score. Plain averaging ignores switching,
while the other models penalise variability inside the window.
"""

import numpy as np

from cqm import HistogramModel, MeanModel, MeanStdModel, SwitchPenaltyModel

steady = [3.0] * 10
flicker = [2.0, 4.0] * 5

models = [MeanModel(), MeanStdModel(alpha=1.0), SwitchPenaltyModel(lam=0.5),
          HistogramModel(bins=4, drop_weights=(0.0, 0.5, 1.0, 1.5))]
for m in models:
    print(f"{m.name:15s} steady={m.score(steady):.3f} flicker={m.score(flicker):.3f}")

# Scoring many windows at once uses the vectorised path.
windows = np.random.default_rng(0).uniform(1, 5, (4, 10))
print(MeanStdModel().score_many(windows).round(3))
