"""Fully-connected encoder/decoder with hand-written backpropagation.

Data flows column-wise: an input batch is an (in_dim, n) matrix, one sample
per column, so each layer computes ``W @ x + b[:, None]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ACTIVATIONS = ("tanh", "relu")
_NORM_FLOOR = 1e-12


@dataclass
class MlpParams:
    """Ordered (weight, bias) pairs; weight is out x in.

    The activation follows every layer, except the last one when
    ``linear_output`` is set (decoder). With ``unit_columns`` each output
    column is rescaled to unit Euclidean norm, which pins the latent scale.
    """

    layers: list[tuple[np.ndarray, np.ndarray]]
    activation: str = "tanh"
    linear_output: bool = False
    unit_columns: bool = False

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if not self.layers:
            raise ValueError("MlpParams needs at least one layer")
        for i, (w, b) in enumerate(self.layers):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"layer {i}: weight {w.shape} / bias {b.shape} mismatch")
            if i and w.shape[1] != self.layers[i - 1][0].shape[0]:
                raise ValueError(f"layer {i} input dim {w.shape[1]} does not chain")

    @property
    def in_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    def copy(self) -> "MlpParams":
        return MlpParams(
            [(w.copy(), b.copy()) for w, b in self.layers],
            self.activation,
            self.linear_output,
            self.unit_columns,
        )

    def zeros_like(self) -> "MlpParams":
        return MlpParams(
            [(np.zeros_like(w), np.zeros_like(b)) for w, b in self.layers],
            self.activation,
            self.linear_output,
            self.unit_columns,
        )

    def arrays(self) -> list[np.ndarray]:
        """Flat list of parameter arrays (views), weights and biases interleaved."""
        return [a for pair in self.layers for a in pair]


@dataclass
class ForwardTape:
    inputs: list[np.ndarray] = field(default_factory=list)  # input to each layer
    pre: list[np.ndarray] = field(default_factory=list)  # pre-activations
    last: np.ndarray | None = None  # final activation, before column scaling
    norms: np.ndarray | None = None


def init_params(
    layer_dims,
    activation: str = "tanh",
    seed: int = 0,
    linear_output: bool = False,
    unit_columns: bool = False,
    rng=None,
) -> MlpParams:
    """Xavier-uniform weights, zero biases."""
    dims = [int(x) for x in layer_dims]
    if len(dims) < 2 or any(x < 1 for x in dims):
        raise ValueError(f"invalid layer dims {layer_dims}")
    rng = np.random.default_rng(seed) if rng is None else rng
    layers = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        a = np.sqrt(6.0 / (fan_in + fan_out))
        layers.append((rng.uniform(-a, a, size=(fan_out, fan_in)), np.zeros(fan_out)))
    return MlpParams(layers, activation, linear_output, unit_columns)


def _act(name, x):
    return np.tanh(x) if name == "tanh" else np.maximum(x, 0.0)


def _act_grad(name, pre, out):
    if name == "tanh":
        return 1.0 - out * out
    return (pre > 0).astype(pre.dtype)


def forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, ForwardTape]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != params.in_dim:
        raise ValueError(f"input shape {x.shape} does not match layer input dim {params.in_dim}")
    tape = ForwardTape()
    last = len(params.layers) - 1
    h = x
    for i, (w, b) in enumerate(params.layers):
        tape.inputs.append(h)
        a = w @ h + b[:, None]
        tape.pre.append(a)
        h = a if (i == last and params.linear_output) else _act(params.activation, a)
    tape.last = h
    if params.unit_columns:
        tape.norms = np.maximum(np.sqrt((h * h).sum(axis=0)), _NORM_FLOOR)
        h = h / tape.norms
    return h, tape


def encode(params: MlpParams, w) -> tuple[np.ndarray, ForwardTape]:
    """Latent codes Z (k x n) for a window matrix or raw m x n array."""
    data = getattr(w, "data", w)
    return forward(params, data)


def decode(params: MlpParams, z_hat: np.ndarray) -> tuple[np.ndarray, ForwardTape]:
    return forward(params, z_hat)


def backward(
    params: MlpParams, tape: ForwardTape, upstream_grad: np.ndarray
) -> tuple[MlpParams, np.ndarray]:
    """Gradients of ``sum(upstream_grad * forward(x))`` w.r.t. params and input."""
    last = len(params.layers) - 1
    out_shape = (params.out_dim, tape.inputs[0].shape[1])
    g = np.asarray(upstream_grad, dtype=np.float64)
    if g.shape != out_shape:
        raise ValueError(f"upstream grad shape {g.shape}, expected {out_shape}")
    if params.unit_columns:
        u = tape.last / tape.norms
        g = (g - u * (u * g).sum(axis=0)) / tape.norms
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(params.layers)  # type: ignore[list-item]
    for i in range(last, -1, -1):
        w, _ = params.layers[i]
        pre = tape.pre[i]
        if not (i == last and params.linear_output):
            out = tape.inputs[i + 1] if i < last else tape.last
            g = g * _act_grad(params.activation, pre, out)
        grads[i] = (g @ tape.inputs[i].T, g.sum(axis=1))
        g = w.T @ g
    return MlpParams(grads, params.activation, params.linear_output, params.unit_columns), g
