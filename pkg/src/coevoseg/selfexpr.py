"""Self-expression layer, its sparsity penalty and the temporal smoothness penalty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EPSILON = 1e-8


@dataclass
class SelfExprMatrix:
    """n x n coefficients; column j says how window j is built from the others."""

    theta: np.ndarray
    zero_diagonal: bool = True

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        t = self.theta
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 2:
            raise ValueError(f"theta must be square with n >= 2, got {t.shape}")
        if not np.all(np.isfinite(t)):
            raise ValueError("theta contains non-finite values")
        if self.zero_diagonal:
            self.project()

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    def project(self) -> None:
        """Zero the diagonal in place when the constraint is on."""
        if self.zero_diagonal:
            np.fill_diagonal(self.theta, 0.0)

    def copy(self) -> "SelfExprMatrix":
        return SelfExprMatrix(self.theta.copy(), self.zero_diagonal)

    @classmethod
    def zeros(cls, n: int, zero_diagonal: bool = True) -> "SelfExprMatrix":
        return cls(np.zeros((n, n)), zero_diagonal)


def build_difference_matrix(n: int) -> np.ndarray:
    """n x (n-1) operator R with ``(theta @ R)[:, j] == theta[:, j+1] - theta[:, j]``."""
    if n < 2:
        raise ValueError(f"difference matrix needs n >= 2, got {n}")
    r = np.zeros((n, n - 1))
    j = np.arange(n - 1)
    r[j, j] = -1.0
    r[j + 1, j] = 1.0
    return r


def _theta_array(theta) -> np.ndarray:
    return theta.theta if isinstance(theta, SelfExprMatrix) else np.asarray(theta, dtype=np.float64)


def self_expression(z: np.ndarray, theta) -> np.ndarray:
    t = _theta_array(theta)
    if z.shape[1] != t.shape[0]:
        raise ValueError(f"latent has {z.shape[1]} columns, theta has order {t.shape[0]}")
    return z @ t


def l1_value_and_subgrad(theta) -> tuple[float, np.ndarray]:
    t = _theta_array(theta)
    grad = np.sign(t)
    if isinstance(theta, SelfExprMatrix) and theta.zero_diagonal:
        np.fill_diagonal(grad, 0.0)
    return float(np.abs(t).sum()), grad


def l12_value_and_subgrad(m: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> tuple[float, np.ndarray]:
    """Sum of column Euclidean norms, and ``m[:, j] / max(norm_j, epsilon)``."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    m = np.asarray(m, dtype=np.float64)
    norms = np.sqrt((m * m).sum(axis=0))
    denom = np.maximum(norms, epsilon)
    # a zero column with epsilon == 0 keeps a zero subgradient
    safe = np.where(denom > 0, denom, 1.0)
    return float(norms.sum()), m / safe


def smoothness_term(theta, r: np.ndarray, epsilon: float = DEFAULT_EPSILON) -> tuple[float, np.ndarray]:
    t = _theta_array(theta)
    value, g = l12_value_and_subgrad(t @ r, epsilon)
    grad = g @ r.T
    if isinstance(theta, SelfExprMatrix) and theta.zero_diagonal:
        np.fill_diagonal(grad, 0.0)
    return value, grad
