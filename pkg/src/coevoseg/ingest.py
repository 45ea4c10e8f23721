"""Loading multivariate series from CSV and cutting them into sliding windows."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NORMALIZE_MODES = ("none", "zscore_per_channel")
_STD_FLOOR = 1e-12


class IngestError(ValueError):
    """Raised for unreadable or malformed input series."""


@dataclass(frozen=True)
class SeriesMatrix:
    values: np.ndarray  # T x d
    channel_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise IngestError(f"series must be a non-empty T x d matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise IngestError("series contains non-finite values")
        names = list(self.channel_names) or [f"ch{i}" for i in range(values.shape[1])]
        if len(names) != values.shape[1]:
            raise IngestError(f"{len(names)} channel names for {values.shape[1]} channels")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channel_names", names)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class WindowConfig:
    window_len: int = 20
    stride: int | None = None  # None means window_len // 4
    normalize: str = "zscore_per_channel"

    def __post_init__(self):
        if self.window_len < 1:
            raise ValueError("window_len must be positive")
        if self.stride is None:
            object.__setattr__(self, "stride", max(1, self.window_len // 4))
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.normalize not in NORMALIZE_MODES:
            raise ValueError(f"unknown normalize mode {self.normalize!r}")


@dataclass(frozen=True)
class WindowMatrix:
    data: np.ndarray  # m x n, one flattened window per column
    window_starts: list[int]
    window_len: int
    d: int

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    def window(self, j: int) -> np.ndarray:
        """Column j reshaped back to a (window_len, d) slice."""
        return self.data[:, j].reshape(self.window_len, self.d)


def load_csv(path, has_header: bool | None = None) -> SeriesMatrix:
    """Read a CSV whose rows are time steps and columns are channels.

    With ``has_header=None`` the first row is treated as a header when any of
    its cells fails to parse as a float.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise IngestError(f"{path}: no data rows")

    if has_header is None:
        has_header = not all(_is_float(c) for c in rows[0])
    names: list[str] = []
    if has_header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise IngestError(f"{path}: no data rows")

    width = len(names) if names else len(rows[0])
    values = np.empty((len(rows), width))
    first_line = 2 if has_header else 1
    for i, row in enumerate(rows):
        # rows are reported 1-based among data rows
        if len(row) != width:
            raise IngestError(
                f"{path}: ragged row {i + 1} (line {first_line + i}): "
                f"expected {width} columns, got {len(row)}"
            )
        for j, cell in enumerate(row):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise IngestError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 1}, column {j + 1}"
                ) from None
    return SeriesMatrix(values, names)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def normalize(series: SeriesMatrix, mode: str = "zscore_per_channel") -> SeriesMatrix:
    if mode == "none":
        return series
    if mode != "zscore_per_channel":
        raise ValueError(f"unknown normalize mode {mode!r}")
    x = series.values
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    centered = x - mu
    scale = np.where(sd < _STD_FLOOR, 1.0, sd)
    return SeriesMatrix(centered / scale, series.channel_names)


def make_windows(series: SeriesMatrix, cfg: WindowConfig) -> WindowMatrix:
    """Stack sliding windows as columns, flattened time-major, channel-minor.

    Samples after the last full window are dropped.
    """
    T, d = series.values.shape
    L, s = cfg.window_len, cfg.stride
    if L > T:
        raise IngestError(f"window_len {L} exceeds series length {T}")
    n = (T - L) // s + 1
    starts = [j * s for j in range(n)]
    # (n, L, d) view, then one flattened window per column
    idx = np.asarray(starts)[:, None] + np.arange(L)[None, :]
    data = series.values[idx].reshape(n, L * d).T.copy()
    return WindowMatrix(data=data, window_starts=starts, window_len=L, d=d)
