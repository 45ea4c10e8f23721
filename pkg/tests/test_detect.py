import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coevoseg.detect import PeakConfig, Segmentation, boundary_scores, find_peaks, map_to_time
from coevoseg.selfexpr import SelfExprMatrix, build_difference_matrix


def block_theta(sizes, zero_diagonal=False):
    n = sum(sizes)
    t = np.zeros((n, n))
    at = 0
    for s in sizes:
        t[at : at + s, at : at + s] = 1.0
        at += s
    return SelfExprMatrix(t, zero_diagonal=zero_diagonal)


def test_equal_columns_score_zero(rng):
    t = np.tile(rng.normal(size=(6, 1)), (1, 6))
    y = boundary_scores(t, build_difference_matrix(6))
    assert y.shape == (5,)
    assert not y.any()


def test_hand_example():
    t = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(boundary_scores(t), [0.0, 2.0 / 3.0])


def test_scores_homogeneous(rng):
    t = rng.normal(size=(7, 7))
    np.testing.assert_allclose(boundary_scores(3.5 * t), 3.5 * boundary_scores(t))


def test_scores_shift_invariant(rng):
    t = rng.normal(size=(7, 7))
    np.testing.assert_allclose(boundary_scores(t + rng.normal(size=(7, 1))), boundary_scores(t))


def test_peaks_example():
    seg = find_peaks([0, 0, 5, 0, 0, 4, 0], PeakConfig(min_distance=2, threshold_k=1))
    assert seg.boundaries == [2, 5]
    assert seg.segments == [[0, 2], [3, 5], [6, 7]]


def test_peaks_constant():
    seg = find_peaks(np.full(9, 0.3), PeakConfig(threshold_k=0))
    assert seg.boundaries == []
    assert seg.segments == [[0, 9]]


def test_peaks_distance_suppression():
    seg = find_peaks([0, 5, 0, 4.9, 0], PeakConfig(min_distance=3, threshold_k=0))
    assert seg.boundaries == [1]


def test_equal_peaks_prefer_smaller_index():
    seg = find_peaks([0, 3, 0, 3, 0], PeakConfig(min_distance=3, threshold_k=0))
    assert seg.boundaries == [1]


def test_edge_peak_allowed():
    assert find_peaks([5, 0, 0, 0, 0, 0], PeakConfig(threshold_k=1)).boundaries == [0]


def test_plateau_left_edge_counts_once():
    # y[j] > y[j-1] and y[j] >= y[j+1]: the first sample of a plateau wins
    assert find_peaks([0, 4, 4, 0, 0, 0, 0, 0], PeakConfig(min_distance=1, threshold_k=0)).boundaries == [1]


@pytest.mark.parametrize("zero_diagonal", [False, True])
def test_block_diagonal_recovery(zero_diagonal):
    t = block_theta([5, 7, 4], zero_diagonal)
    seg = find_peaks(boundary_scores(t), PeakConfig(threshold_k=1))
    assert seg.boundaries == [4, 11]


def test_map_to_time_overlap():
    seg = map_to_time(Segmentation([2], n=4), [0, 2, 4, 6], 4)
    assert seg.time_boundaries == [7]


def test_map_to_time_no_overlap():
    seg = map_to_time(Segmentation([0, 2], n=4), [0, 5, 10, 15], 5)
    assert seg.time_boundaries == [5, 15]
    assert map_to_time(Segmentation([], n=4), [0, 5, 10, 15], 5).time_boundaries == []


def test_segmentation_validation():
    with pytest.raises(ValueError):
        Segmentation([3], n=4)
    with pytest.raises(ValueError):
        Segmentation([1, 1], n=4)


@settings(max_examples=80, deadline=None)
@given(
    y=st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40),
    scale=st.floats(0.01, 100),
    k=st.floats(-1, 3),
    md=st.integers(1, 5),
)
def test_peaks_properties(y, scale, k, md):
    y = np.round(np.asarray(y), 3)
    cfg = PeakConfig(min_distance=md, threshold_k=k)
    seg = find_peaks(y, cfg)
    b = seg.boundaries
    assert all(0 <= j <= len(y) - 1 for j in b)
    assert all(c - a >= md for a, c in zip(b, b[1:]))
    covered = [i for s, e in seg.segments for i in range(s, e + 1)]
    assert covered == list(range(len(y) + 1))
    # power-of-two scaling is exact in floating point
    p = 2.0 ** round(np.log2(scale))
    assert find_peaks(p * y, cfg).boundaries == b
