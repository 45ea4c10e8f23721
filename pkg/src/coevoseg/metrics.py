"""Segmentation quality: boundary F1 with a tolerance, and adjusted Rand index."""

from __future__ import annotations

import numpy as np


def boundary_f1(predicted, truth, tolerance: int = 2) -> tuple[float, float, float]:
    """Precision, recall and F1 under greedy one-to-one matching.

    Truth boundaries are visited in ascending order; each takes the nearest
    still-unmatched prediction within ``tolerance`` (ties go to the smaller
    index). Two empty sets score F1 = 1.
    """
    pred = sorted(set(int(p) for p in predicted))
    true = sorted(set(int(t) for t in truth))
    if not pred and not true:
        return 1.0, 1.0, 1.0
    if not pred or not true:
        return (0.0 if pred else 1.0), (0.0 if true else 1.0), 0.0
    free = set(pred)
    hits = 0
    for t in true:
        near = [p for p in free if abs(p - t) <= tolerance]
        if near:
            free.remove(min(near, key=lambda p: (abs(p - t), p)))
            hits += 1
    precision = hits / len(pred)
    recall = hits / len(true)
    f1 = 0.0 if hits == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def segment_labels(seg, n: int | None = None) -> np.ndarray:
    """Label each window with the index of the segment containing it."""
    boundaries = getattr(seg, "boundaries", seg)
    if n is None:
        n = seg.n
    labels = np.zeros(n, dtype=np.int64)
    for b in boundaries:
        if not 0 <= b <= n - 2:
            raise ValueError(f"boundary {b} invalid for {n} windows")
        labels[b + 1 :] += 1
    return labels


def _comb2(counts) -> int:
    return int(sum(int(c) * (int(c) - 1) // 2 for c in np.ravel(counts)))


def adjusted_rand_index(a, b) -> float:
    """Pair-counting ARI; 1.0 when the chance-corrected denominator vanishes."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"label sequences differ in shape: {a.shape} vs {b.shape}")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)
    # exact integer arithmetic: ARI = (I - E) / (M - E) scaled by 2 * C(n, 2)
    index = _comb2(table)
    sum_a = _comb2(table.sum(axis=1))
    sum_b = _comb2(table.sum(axis=0))
    total = _comb2([a.size])
    num = 2 * (index * total - sum_a * sum_b)
    den = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if den == 0:
        return 1.0
    return num / den
