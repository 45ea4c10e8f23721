"""Boundary scores from the self-expression matrix and peak picking over them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .selfexpr import build_difference_matrix


@dataclass(frozen=True)
class PeakConfig:
    min_distance: int = 2
    threshold_k: float = 2.0

    def __post_init__(self):
        if self.min_distance < 1:
            raise ValueError("min_distance must be >= 1")


@dataclass(frozen=True)
class Segmentation:
    """Cuts in window coordinates: boundary j separates window j from window j+1."""

    boundaries: list[int]
    n: int
    time_boundaries: list[int] = field(default_factory=list)

    def __post_init__(self):
        b = [int(j) for j in self.boundaries]
        if any(j < 0 or j > self.n - 2 for j in b) or any(a >= c for a, c in zip(b, b[1:])):
            raise ValueError(f"boundaries {b} invalid for {self.n} windows")
        object.__setattr__(self, "boundaries", b)

    @property
    def segments(self) -> list[list[int]]:
        starts = [0] + [j + 1 for j in self.boundaries]
        ends = list(self.boundaries) + [self.n - 1]
        return [[s, e] for s, e in zip(starts, ends)]


def boundary_scores(theta, r: np.ndarray | None = None) -> np.ndarray:
    """Column means of ``|theta @ R|``, length n - 1."""
    t = getattr(theta, "theta", theta)
    if r is None:
        r = build_difference_matrix(t.shape[0])
    return np.abs(t @ r).mean(axis=0)


def find_peaks(scores, cfg: PeakConfig = PeakConfig()) -> Segmentation:
    """Local maxima above ``mean + threshold_k * std``, thinned greedily by score.

    A peak needs ``y[j] > y[j-1]`` and ``y[j] >= y[j+1]``; missing neighbours at
    the edges are skipped. std is the population std.
    """
    y = np.asarray(scores, dtype=np.float64)
    L = y.size
    if L < 1:
        raise ValueError("need at least one score")
    left = np.ones(L, dtype=bool)
    right = np.ones(L, dtype=bool)
    left[1:] = y[1:] > y[:-1]
    right[:-1] = y[:-1] >= y[1:]
    thresh = y.mean() + cfg.threshold_k * y.std()
    cand = np.flatnonzero(left & right & (y > thresh))
    # descending score, ties to the smaller index
    order = sorted(cand.tolist(), key=lambda j: (-y[j], j))
    kept: list[int] = []
    for j in order:
        if all(abs(j - k) >= cfg.min_distance for k in kept):
            kept.append(j)
    return Segmentation(sorted(kept), n=L + 1)


def map_to_time(seg: Segmentation, window_starts, window_len: int) -> Segmentation:
    """Place each cut midway between the end of window j and the start of window j+1."""
    starts = list(window_starts)
    times = [(starts[j] + window_len + starts[j + 1]) // 2 for j in seg.boundaries]
    return replace(seg, time_boundaries=times)


def detect(theta, cfg: PeakConfig = PeakConfig(), window_starts=None, window_len=None) -> tuple[np.ndarray, Segmentation]:
    y = boundary_scores(theta)
    seg = find_peaks(y, cfg)
    if window_starts is not None:
        seg = map_to_time(seg, window_starts, window_len)
    return y, seg
