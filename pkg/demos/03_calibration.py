"""
Fitting the combination weights
===============================

Generate a labelled corpus from known weights, fit them back, and score the
fitted model with repeated random train/test splits.
"""

from cqm import (
    DEFAULT_WEIGHTS,
    CqmPredictor,
    GeneratorSpec,
    SplitPlan,
    WindowModelPredictor,
    evaluate_model,
    extract_features,
    fit_weights,
    generate_labeled_dataset,
    make_splits,
    MeanModel,
)

ds = generate_labeled_dataset(GeneratorSpec(seed=1, n_sessions=12), DEFAULT_WEIGHTS,
                              noise_sigma=0.1)
print(len(ds), "rated prefixes")

w = fit_weights(extract_features(ds))
print("fitted  :", w.to_dict())
print("planted :", DEFAULT_WEIGHTS.to_dict())

splits = make_splits(ds, SplitPlan(seed=0, repeats=50))
for pred, align in ((WindowModelPredictor(ds, MeanModel()), True), (CqmPredictor(ds), False)):
    rep = evaluate_model(ds, pred, splits, align=align)
    print(f"{rep.name:10s} pcc={rep.pcc:.3f} rmse={rep.rmse:.3f}")
