"""Central-difference verification of tape gradients."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import ShapeError
from .tensor import Tensor


def numerical_gradient(f: Callable[[Tensor], Tensor], x: Tensor, eps: float = 1e-5) -> np.ndarray:
    """Central finite differences of scalar ``f`` w.r.t. every entry of ``x``.

    ``x.data`` is perturbed in place and restored afterwards, so ``f`` may close
    over ``x`` (e.g. a model parameter) instead of using its argument.
    """
    if x.data.flags.writeable is False:
        x.data = np.array(x.data)
    grad = np.zeros_like(x.data)
    flat = x.data.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = float(f(x).data)
        flat[i] = orig - eps
        fm = float(f(x).data)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * eps)
    return grad


def grad_check(f: Callable[[Tensor], Tensor], x: Tensor, eps: float = 1e-5,
               floor: float = 1e-3) -> float:
    """Worst per-coordinate relative error between tape and finite-difference gradients.

    The error of coordinate ``i`` is ``|a_i - n_i| / max(|a_i|, |n_i|, floor)``;
    ``floor`` keeps coordinates whose true gradient is ~0 from turning
    round-off into huge ratios.
    """
    if not 1e-5 <= eps <= 1e-2:
        raise ValueError(f"eps must lie in [1e-5, 1e-2], got {eps}")
    was = x.requires_grad
    x.requires_grad = True
    x.grad = None
    out = f(x)
    if out.size != 1:
        x.requires_grad = was
        raise ShapeError(f"grad_check needs a scalar function, got output shape {out.shape}")
    out.backward()
    analytic = np.zeros_like(x.data) if x.grad is None else x.grad.copy()
    x.grad = None
    numeric = numerical_gradient(f, x, eps)
    x.requires_grad = was
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))
