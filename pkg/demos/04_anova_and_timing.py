"""
Which window statistic tracks the ratings?
==========================================

Group rated prefixes by quartile of one window statistic and test whether
the mean rating differs between groups. Then time the per-segment update.
"""

import numpy as np

from cqm import (
    GeneratorSpec,
    MultiKTracker,
    anova_oneway,
    bench_per_segment,
    generate_labeled_dataset,
    generate_trace,
)
from cqm.evaluation import quantile_groups

ds = generate_labeled_dataset(GeneratorSpec(seed=2, n_sessions=12), noise_sigma=0.2)
mos = np.asarray(ds.mos)

for name in ("f", "l", "av", "mi", "ma"):
    vals = []
    for it in ds:
        tr = MultiKTracker([30]).extend(it.sequence().qualities)
        vals.append(getattr(tr.snapshot(30), name))
    res = anova_oneway(quantile_groups(vals, mos, 4))
    print(f"{name:3s} F={res.F:7.2f} p={res.p:.2e} eta_p2={res.eta_p2:.3f}")

trace = generate_trace(GeneratorSpec(seed=0, n_sessions=1, length_s=3600))
print(f"{bench_per_segment(trace, warmup=100):.4f} ms per segment")
