import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coevoseg.ingest import (
    IngestError,
    SeriesMatrix,
    WindowConfig,
    load_csv,
    make_windows,
    normalize,
)


def test_load_plain_csv(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("1,2\n3,4\n5,6\n")
    s = load_csv(p)
    assert (s.T, s.d) == (3, 2)
    np.testing.assert_array_equal(s.values, [[1, 2], [3, 4], [5, 6]])


def test_load_header(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("a,b\n1.5,2\n3,4e-1\n")
    s = load_csv(p)
    assert s.channel_names == ["a", "b"]
    assert s.T == 2
    assert s.values[1, 1] == pytest.approx(0.4)


def test_explicit_no_header_rejects_text(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(IngestError, match="row 1"):
        load_csv(p, has_header=False)


def test_bad_cell_names_row(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("1,2\nx,4\n5,6\n")
    with pytest.raises(IngestError, match=r"row 2, column 1"):
        load_csv(p)


def test_ragged_rows(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("1,2\n3\n")
    with pytest.raises(IngestError, match="ragged"):
        load_csv(p)


def test_missing_file(tmp_path):
    with pytest.raises(IngestError, match="nope.csv"):
        load_csv(tmp_path / "nope.csv")


def test_normalize_none_is_identity():
    s = SeriesMatrix(np.array([[1.0, 2.0], [3.0, 5.0]]))
    assert normalize(s, "none") is s


def test_zscore_channel():
    s = normalize(SeriesMatrix(np.array([[1.0], [2.0], [3.0]])))
    assert abs(s.values.mean()) < 1e-12
    assert abs(s.values.std() - 1.0) < 1e-12


def test_constant_channel_centered_only():
    s = normalize(SeriesMatrix(np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])))
    np.testing.assert_array_equal(s.values[:, 0], [0.0, 0.0, 0.0])


def test_zscore_idempotent(rng):
    s = normalize(SeriesMatrix(rng.normal(3.0, 7.0, size=(50, 4))))
    np.testing.assert_allclose(normalize(s).values, s.values, atol=1e-10)


def test_window_count_and_starts():
    s = SeriesMatrix(np.arange(10.0))
    w = make_windows(s, WindowConfig(window_len=4, stride=2, normalize="none"))
    assert w.n == 4
    assert w.window_starts == [0, 2, 4, 6]


def test_single_window_is_whole_series():
    vals = np.arange(8.0).reshape(4, 2)
    w = make_windows(SeriesMatrix(vals), WindowConfig(window_len=4, stride=1))
    assert w.n == 1
    np.testing.assert_array_equal(w.data[:, 0], vals.ravel())


def test_time_major_flattening():
    vals = np.array([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0], [4.0, 40.0]])
    w = make_windows(SeriesMatrix(vals), WindowConfig(window_len=3, stride=1))
    assert w.m == 6
    np.testing.assert_array_equal(w.data[:, 1], [2, 20, 3, 30, 4, 40])


def test_window_longer_than_series():
    with pytest.raises(IngestError):
        make_windows(SeriesMatrix(np.zeros((3, 1))), WindowConfig(window_len=4))


def test_default_stride_is_quarter_window():
    assert WindowConfig().stride == 5


@settings(max_examples=60, deadline=None)
@given(
    T=st.integers(1, 40),
    d=st.integers(1, 4),
    L=st.integers(1, 40),
    stride=st.integers(1, 7),
    seed=st.integers(0, 2**16),
)
def test_window_shapes_and_roundtrip(T, d, L, stride, seed):
    if L > T:
        return
    vals = np.random.default_rng(seed).normal(size=(T, d))
    w = make_windows(SeriesMatrix(vals), WindowConfig(window_len=L, stride=stride))
    assert w.m == L * d
    assert w.n == (T - L) // stride + 1
    assert all(b - a == stride for a, b in zip(w.window_starts, w.window_starts[1:]))
    for j, start in enumerate(w.window_starts):
        np.testing.assert_array_equal(w.window(j), vals[start : start + L])
