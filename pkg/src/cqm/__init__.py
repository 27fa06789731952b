"""Cumulative quality estimation for HTTP adaptive streaming sessions.

A window of segments slides over the session; each window is scored by a
window quality model, and the cumulative quality at every segment boundary is
a weighted combination of last, average, minimum and maximum window quality.
"""
from .calibration import (
    AlignmentCoeffs,
    SplitPlan,
    extract_features,
    fit_alignment,
    fit_weights,
    make_splits,
    train_weights,
)
from .evaluation import (
    AnovaResult,
    CqmPredictor,
    MetricReport,
    ScorePredictor,
    WindowModelPredictor,
    anova_oneway,
    bench_per_segment,
    evaluate_model,
    pcc,
    rmse,
)
from .predictor import (
    DEFAULT_WEIGHTS,
    CqmWeights,
    CumulativeCurve,
    FeatureVector,
    StreamingCqm,
    cqm_value,
    predict_curve,
)
from .synth import GeneratorSpec, generate_labeled_dataset, generate_trace
from .trace import (
    LabeledDataset,
    LabeledSequence,
    QualityScale,
    SegmentRecord,
    SessionTrace,
    prefix,
    validate_trace,
)
from .window import MultiKTracker, WindowStatsState, batch_stats
from .wqm import (
    HistogramModel,
    MeanModel,
    MeanStdModel,
    SwitchPenaltyModel,
    WindowQualityModel,
    make_wqm,
)

__version__ = "0.1.0"
