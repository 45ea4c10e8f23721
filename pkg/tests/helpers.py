"""Central finite differences, kept separate from the analytic gradient code."""

import numpy as np


def fd_grad(f, arr, h=1e-5, mask=None):
    """Gradient of scalar ``f()`` w.r.t. ``arr`` (perturbed in place)."""
    g = np.zeros_like(arr)
    for idx in np.ndindex(arr.shape):
        if mask is not None and not mask[idx]:
            continue
        old = arr[idx]
        arr[idx] = old + h
        up = f()
        arr[idx] = old - h
        down = f()
        arr[idx] = old
        g[idx] = (up - down) / (2 * h)
    return g


def rel_err(a, b, floor=1e-6):
    """Max elementwise relative error, with an absolute floor for tiny entries."""
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)))
