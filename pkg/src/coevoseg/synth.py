"""Synthetic co-evolving series with planted concept regimes.

Each concept owns a d x s mixing matrix and s sinusoids (frequency, phase).
A regime of concept c emits ``M_c @ sin(2*pi*f*t + phi) + noise`` so that
all channels move together under a shared latent signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import SeriesMatrix

_MIN_FREQ_GAP = 1e-6


@dataclass(frozen=True)
class SynthSpec:
    num_concepts: int = 3
    num_segments: int = 4
    segment_len_range: tuple[int, int] = (120, 160)
    d: int = 5
    sines_per_concept: int = 3
    freq_range: tuple[float, float] = (0.02, 0.2)
    noise_std: float = 0.05
    seed: int = 0

    def validate(self) -> None:
        lo, hi = self.segment_len_range
        f_lo, f_hi = self.freq_range
        problems = []
        if self.num_concepts < 2:
            problems.append("num_concepts must be >= 2")
        if self.num_segments < 1:
            problems.append("num_segments must be >= 1")
        if lo < 1 or hi < lo:
            problems.append(f"bad segment_len_range {self.segment_len_range}")
        if self.d < 1 or self.sines_per_concept < 1:
            problems.append("d and sines_per_concept must be >= 1")
        if not 0 < f_lo <= f_hi:
            problems.append(f"bad freq_range {self.freq_range}")
        if f_hi > 0.5:
            problems.append(f"freq max {f_hi} above the aliasing limit 0.5")
        if self.noise_std < 0:
            problems.append("noise_std must be >= 0")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class SynthResult:
    series: SeriesMatrix
    concept_labels: np.ndarray  # per time step
    true_boundaries: list[int]  # first time index of each new regime
    concept_sequence: list[int]


def _draw_frequencies(rng, spec: SynthSpec) -> np.ndarray:
    k = spec.num_concepts * spec.sines_per_concept
    while True:
        f = rng.uniform(*spec.freq_range, size=k)
        if k == 1 or np.min(np.diff(np.sort(f))) > _MIN_FREQ_GAP:
            return f.reshape(spec.num_concepts, spec.sines_per_concept)


def _draw_sequence(rng, num_concepts: int, num_segments: int) -> list[int]:
    """Random concept order with no immediate repeats.

    When there are at least as many segments as concepts, draws are rejected
    until every concept occurs, so a k-concept spec really shows k concepts.
    """
    need_all = num_segments >= num_concepts
    while True:
        seq = [int(rng.integers(num_concepts))]
        for _ in range(num_segments - 1):
            step = int(rng.integers(1, num_concepts))
            seq.append((seq[-1] + step) % num_concepts)
        if not need_all or len(set(seq)) == num_concepts:
            return seq


def generate(spec: SynthSpec) -> SynthResult:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    C, s, d = spec.num_concepts, spec.sines_per_concept, spec.d

    mixing = rng.standard_normal((C, d, s))
    freqs = _draw_frequencies(rng, spec)
    phases = rng.uniform(0.0, 2 * np.pi, size=(C, s))

    seq = _draw_sequence(rng, C, spec.num_segments)
    lo, hi = spec.segment_len_range
    lengths = rng.integers(lo, hi + 1, size=spec.num_segments)

    T = int(lengths.sum())
    t = np.arange(T)
    values = np.empty((T, d))
    labels = np.empty(T, dtype=np.int64)
    bounds = np.concatenate([[0], np.cumsum(lengths)])
    for c, a, b in zip(seq, bounds[:-1], bounds[1:]):
        latent = np.sin(2 * np.pi * freqs[c][:, None] * t[None, a:b] + phases[c][:, None])
        values[a:b] = (mixing[c] @ latent).T
        labels[a:b] = c
    if spec.noise_std:
        values += rng.normal(0.0, spec.noise_std, size=values.shape)
    return SynthResult(
        series=SeriesMatrix(values, [f"x{i}" for i in range(d)]),
        concept_labels=labels,
        true_boundaries=[int(v) for v in bounds[1:-1]],
        concept_sequence=seq,
    )


def window_labels(labels, window_starts, window_len: int) -> np.ndarray:
    """Concept of each window, read at the window's centre sample."""
    labels = np.asarray(labels)
    return labels[np.asarray(window_starts) + window_len // 2]


def label_boundaries(labels) -> list[int]:
    """Indices j where labels[j] != labels[j+1]."""
    labels = np.asarray(labels)
    return np.flatnonzero(labels[1:] != labels[:-1]).tolist()
