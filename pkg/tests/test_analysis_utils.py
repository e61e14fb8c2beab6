import numpy as np
import pytest

from custom_types.dat_type import DatType
from custom_types.lattice_type import LatticeType
from custom_types.q_dat import QDat
from custom_types.triplet_dat import TripletDat


def labelled_state(state_utils, positions, labels, extents=(10.0, 10.0, 10.0)):
    state = state_utils.create_state(len(positions), extents, positions)
    label_dat = state_utils.ensure_dat(state, "s", 1, DatType.INT64)
    label_dat.values[:, 0] = labels
    return state, label_dat


def test_same_state_count_on_a_line(state_utils, analysis_utils):
    state, labels = labelled_state(
        state_utils, [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [3.0, 1.0, 1.0]], [1, 1, 2]
    )
    counts = analysis_utils.same_state_neighbour_count(state, labels, 1.5)
    np.testing.assert_array_equal(counts.values[:, 0], [1, 1, 0])


def test_same_state_count_matches_brute_force(state_utils, analysis_utils, rng, brute_pairs):
    positions = rng.random((120, 3)) * 8.0
    labels = rng.integers(0, 3, 120)
    state, label_dat = labelled_state(state_utils, positions, labels, (8.0, 8.0, 8.0))
    counts = analysis_utils.same_state_neighbour_count(state, label_dat, 1.8)
    expected = np.zeros(120, dtype=np.int64)
    for i, j in brute_pairs(positions, (8.0, 8.0, 8.0), 1.8):
        expected[i] += labels[i] == labels[j]
    np.testing.assert_array_equal(counts.values[:, 0], expected)


def test_same_state_needs_integer_labels(state_utils, analysis_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    labels = state_utils.ensure_dat(state, "s", 1)
    with pytest.raises(ValueError):
        analysis_utils.same_state_neighbour_count(state, labels, 1.5)


def q_dat(state_utils, values):
    dat = state_utils.create_dat("Q_6", len(values), 1)
    dat.values[:, 0] = values
    return QDat(q={6: dat})


def test_q_summary_histogram(state_utils, analysis_utils):
    summary = analysis_utils.q_summary(q_dat(state_utils, [0.15, 0.32, np.nan, 0.35]), bins=10)
    entry = summary[6]
    assert entry.mean == pytest.approx(0.82 / 3.0)
    assert (entry.count, entry.undefined) == (3, 1)
    assert entry.histogram.sum() == 3
    assert entry.histogram[1] == 1
    assert entry.histogram[3] == 2
    assert len(entry.bin_edges) == 11


def test_q_summary_all_undefined(state_utils, analysis_utils):
    entry = analysis_utils.q_summary(q_dat(state_utils, [np.nan, np.nan]))[6]
    assert np.isnan(entry.mean)
    assert entry.count == 0


def test_match_reference(state_utils, analysis_utils):
    summary = analysis_utils.q_summary(q_dat(state_utils, [0.575, 0.574]))
    assert analysis_utils.match_reference(summary, LatticeType.FCC) == {6: True}
    assert analysis_utils.match_reference(summary, LatticeType.BCC) == {6: False}
    assert analysis_utils.match_reference(summary, LatticeType.SC) == {6: None}


def test_classify_structures_by_signature(state_utils, analysis_utils):
    triplets = state_utils.create_dat("T", 3, 3 * 14, DatType.INT64, -1)
    count = state_utils.create_dat("t", 3, 1, DatType.INT64)
    fcc = [(4, 2, 1)] * 12
    bcc = [(6, 6, 6)] * 8 + [(4, 4, 4)] * 6
    broken = [(4, 2, 1)] * 11 + [(3, 1, 1)]
    for i, signature in enumerate((fcc, bcc, broken)):
        triplets.values[i, : 3 * len(signature)] = np.ravel(signature)
        count.values[i, 0] = len(signature)
    classification = analysis_utils.classify_structures(TripletDat(triplets, count))
    assert [s.value for s in classification.structures] == ["fcc", "bcc", "unclassified"]
    assert sum(classification.counts.values()) == 3
