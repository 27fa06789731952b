import pytest
from hypothesis import given, strategies as st

from cqm.errors import (
    EmptyDataset,
    EmptyTrace,
    HeterogeneousDurations,
    InvalidScale,
    LengthExceedsTrace,
    LengthNotAligned,
    MixedScale,
    NonContiguousIndices,
    QualityOutOfRange,
)
from cqm.trace import (
    LabeledDataset,
    LabeledSequence,
    QualityScale,
    SegmentRecord,
    SessionTrace,
    prefix,
    validate_trace,
)


def recs(qs, d=1.0):
    return [SegmentRecord(i, q, d) for i, q in enumerate(qs)]


def test_valid_trace():
    t = validate_trace(recs([2.0, 3.0, 4.0]), QualityScale())
    assert len(t) == 3
    assert t.qualities == [2.0, 3.0, 4.0]
    assert t.uniform_duration_s == 1.0


def test_gap_in_indices():
    with pytest.raises(NonContiguousIndices):
        validate_trace([SegmentRecord(0, 3.0), SegmentRecord(2, 3.0)])


def test_quality_out_of_range_reports_index():
    with pytest.raises(QualityOutOfRange) as ei:
        validate_trace(recs([3.0, 5.5]))
    assert ei.value.index == 1


def test_empty_and_heterogeneous():
    with pytest.raises(EmptyTrace):
        validate_trace([])
    with pytest.raises(HeterogeneousDurations):
        validate_trace([SegmentRecord(0, 3.0, 1.0), SegmentRecord(1, 3.0, 2.0)])


def test_scale_invariant():
    with pytest.raises(InvalidScale):
        QualityScale(5.0, 1.0)
    with pytest.raises(QualityOutOfRange):
        validate_trace(recs([0.5]), QualityScale(1, 5))
    assert validate_trace(recs([0.5]), QualityScale(0, 1)).qualities == [0.5]


def test_prefix():
    t = SessionTrace.from_qualities([3.0] * 360)
    p = prefix(t, 60)
    assert len(p) == 60 and p.segments == t.segments[:60]
    assert prefix(t, 360) is t
    with pytest.raises(LengthNotAligned):
        prefix(t, 90.5)
    with pytest.raises(LengthExceedsTrace):
        prefix(t, 361)


def test_prefix_two_second_segments():
    t = SessionTrace.from_qualities([3.0] * 30, duration_s=2.0)
    assert len(prefix(t, 20)) == 10
    with pytest.raises(LengthNotAligned):
        prefix(t, 21)


@given(st.lists(st.floats(1, 5), min_size=1, max_size=80),
       st.data())
def test_prefix_chain(qs, data):
    t = SessionTrace.from_qualities(qs)
    a = data.draw(st.integers(1, len(qs)))
    b = data.draw(st.integers(1, a))
    assert prefix(prefix(t, a), b) == prefix(t, b)


def test_labeled_dataset_rules():
    t = SessionTrace.from_qualities([3.0] * 60)
    item = LabeledSequence(t, 60, 3.2)
    assert len(item.sequence()) == 60
    with pytest.raises(LengthExceedsTrace):
        LabeledSequence(t, 120, 3.0)
    with pytest.raises(EmptyDataset):
        LabeledDataset([])
    other = SessionTrace.from_qualities([0.5] * 60, scale=QualityScale(0, 1))
    with pytest.raises(MixedScale):
        LabeledDataset([item, LabeledSequence(other, 60, 0.5)])
