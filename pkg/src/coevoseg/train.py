"""Joint objective over encoder, self-expression matrix and decoder, and its optimizer.

The objective is

    0.5 * ||W - g(f(W) @ theta)||_F^2
    + lambda1 * ||theta||_1
    + lambda2 * ||Z - Z @ theta||_F^2
    + lambda3 * sum_j ||(theta @ R)[:, j]||_2

with Z = f(W). The lambda2 term carries no 1/2 factor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .net import MlpParams, backward, decode, encode, init_params
from .selfexpr import (
    DEFAULT_EPSILON,
    SelfExprMatrix,
    build_difference_matrix,
    l1_value_and_subgrad,
    smoothness_term,
)

log = logging.getLogger(__name__)

TERMS = ("recon", "l1", "selfexpr", "smooth")


class TrainingDiverged(RuntimeError):
    def __init__(self, epoch: int, phase: str):
        super().__init__(f"non-finite loss at {phase} epoch {epoch}")
        self.epoch = epoch
        self.phase = phase


@dataclass(frozen=True)
class Hyperparams:
    lambda1: float = 0.1
    lambda2: float = 1.0
    lambda3: float = 0.5
    learning_rate: float = 5e-3
    epochs: int = 2000
    pretrain_epochs: int = 1000
    seed: int = 0
    latent_dim: int = 16
    hidden: tuple[int, ...] = (32,)
    activation: str = "tanh"
    epsilon: float = DEFAULT_EPSILON
    zero_diagonal: bool = True
    unit_latent: bool = False

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "epsilon"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1 or self.pretrain_epochs < 0:
            raise ValueError("epochs must be >= 1 and pretrain_epochs >= 0")
        if self.latent_dim < 1 or any(h < 1 for h in self.hidden):
            raise ValueError("layer widths must be positive")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass
class TrainReport:
    loss_history: list[dict]
    encoder: MlpParams
    theta: SelfExprMatrix
    decoder: MlpParams
    final_losses: dict = field(default_factory=dict)
    converged: bool = False


def _data(w) -> np.ndarray:
    return getattr(w, "data", w)


def _forward(w, enc, theta, dec, bypass):
    z, enc_tape = encode(enc, w)
    z_hat = z if bypass else z @ theta.theta
    w_hat, dec_tape = decode(dec, z_hat)
    return z, z_hat, w_hat, enc_tape, dec_tape


def _terms(x, z, w_hat, theta, hp, r):
    resid = x - w_hat
    recon = 0.5 * float(np.sum(resid * resid))
    l1, _ = l1_value_and_subgrad(theta)
    se = z - z @ theta.theta
    smooth, _ = smoothness_term(theta, r, hp.epsilon)
    return {
        "recon": recon,
        "l1": hp.lambda1 * l1,
        "selfexpr": hp.lambda2 * float(np.sum(se * se)),
        "smooth": hp.lambda3 * smooth,
    }


def total_loss(w, enc: MlpParams, theta: SelfExprMatrix, dec: MlpParams, hp: Hyperparams):
    """Objective value and its four weighted addends (recon, l1, selfexpr, smooth)."""
    x = _data(w)
    z, _, w_hat, _, _ = _forward(x, enc, theta, dec, bypass=False)
    per_term = _terms(x, z, w_hat, theta, hp, build_difference_matrix(theta.n))
    value = sum(per_term.values())
    if not np.isfinite(value):
        raise FloatingPointError("non-finite loss")
    return value, per_term


def _value_and_grads(x, enc, theta, dec, hp, r, bypass=False):
    z, z_hat, w_hat, enc_tape, dec_tape = _forward(x, enc, theta, dec, bypass)
    t = theta.theta
    if bypass:
        # autoencoder only: reconstruction term, theta untouched
        resid = x - w_hat
        per_term = dict.fromkeys(TERMS, 0.0)
        per_term["recon"] = 0.5 * float(np.sum(resid * resid))
        g_dec, g_zhat = backward(dec, dec_tape, w_hat - x)
        g_enc, _ = backward(enc, enc_tape, g_zhat)
        return per_term, g_enc, np.zeros_like(t), g_dec

    per_term = _terms(x, z, w_hat, theta, hp, r)
    g_dec, g_zhat = backward(dec, dec_tape, w_hat - x)
    g_theta = z.T @ g_zhat
    g_z = g_zhat @ t.T
    if hp.lambda2:
        e = z - z @ t
        g_theta -= 2.0 * hp.lambda2 * (z.T @ e)
        g_z += 2.0 * hp.lambda2 * (e - e @ t.T)
    if hp.lambda1:
        g_theta += hp.lambda1 * np.sign(t)
    if hp.lambda3:
        g_theta += hp.lambda3 * smoothness_term(t, r, hp.epsilon)[1]
    if theta.zero_diagonal:
        np.fill_diagonal(g_theta, 0.0)
    g_enc, _ = backward(enc, enc_tape, g_z)
    return per_term, g_enc, g_theta, g_dec


def loss_gradients(w, enc: MlpParams, theta: SelfExprMatrix, dec: MlpParams, hp: Hyperparams):
    """Gradients of the objective w.r.t. encoder, theta and decoder.

    The l1 and l1,2 terms contribute subgradients (sign, and column / max(norm, eps)).
    """
    x = _data(w)
    r = build_difference_matrix(theta.n)
    _, g_enc, g_theta, g_dec = _value_and_grads(x, enc, theta, dec, hp, r)
    return g_enc, g_theta, g_dec


class _Adam:
    def __init__(self, arrays, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]
        self.t = 0

    def step(self, arrays, grads):
        self.t += 1
        c1 = 1.0 - self.b1**self.t
        c2 = 1.0 - self.b2**self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            a -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def build_networks(m: int, hp: Hyperparams) -> tuple[MlpParams, MlpParams]:
    rng = np.random.default_rng(hp.seed)
    enc_dims = [m, *hp.hidden, hp.latent_dim]
    enc = init_params(enc_dims, hp.activation, unit_columns=hp.unit_latent, rng=rng)
    dec = init_params(enc_dims[::-1], hp.activation, rng=rng, linear_output=True)
    return enc, dec


def fit(w, hp: Hyperparams = Hyperparams()) -> TrainReport:
    """Autoencoder warm-up followed by full-batch Adam on the joint objective.

    During warm-up the self-expression layer is bypassed (decoder reads Z
    directly) and theta stays frozen at zero. Every epoch records the loss at
    the parameters the step was taken from.
    """
    x = np.array(_data(w), dtype=np.float64, copy=True)
    n = x.shape[1]
    if n < 2:
        raise ValueError("need at least two windows")
    enc, dec = build_networks(x.shape[0], hp)
    theta = SelfExprMatrix.zeros(n, hp.zero_diagonal)
    r = build_difference_matrix(n)
    history: list[dict] = []

    def run(phase, epochs, bypass):
        net_arrays = enc.arrays() + dec.arrays()
        arrays = net_arrays if bypass else net_arrays + [theta.theta]
        opt = _Adam(arrays, hp.learning_rate)
        for epoch in range(epochs):
            per_term, g_enc, g_theta, g_dec = _value_and_grads(x, enc, theta, dec, hp, r, bypass)
            total = sum(per_term.values())
            if not np.isfinite(total):
                raise TrainingDiverged(epoch, phase)
            history.append({"phase": phase, "total": total, **per_term})
            grads = g_enc.arrays() + g_dec.arrays()
            if not bypass:
                grads.append(g_theta)
            opt.step(arrays, grads)
            theta.project()

    if hp.pretrain_epochs:
        run("pretrain", hp.pretrain_epochs, bypass=True)
    run("joint", hp.epochs, bypass=False)

    final_total, final_terms = total_loss(x, enc, theta, dec, hp)
    last = history[-1]["total"]
    converged = abs(final_total - last) / max(abs(last), 1e-300) < 1e-6
    log.debug("fit done: total %.6g, converged=%s", final_total, converged)
    return TrainReport(
        loss_history=history,
        encoder=enc,
        theta=theta,
        decoder=dec,
        final_losses={"total": final_total, **final_terms},
        converged=converged,
    )
