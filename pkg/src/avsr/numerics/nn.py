"""Parameter containers and the small set of layers every model composes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..errors import ConfigError
from . import tensor as F
from .tensor import Tensor


class Init:
    """Seeded parameter factory.

    With ``meta=True`` no memory is allocated: every parameter is a read-only
    zero-stride view, which is enough for exact parameter counting of
    full-scale configurations.
    """

    def __init__(self, seed=0, meta: bool = False, dtype=np.float64):
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.meta = meta
        self.dtype = dtype

    def _wrap(self, arr: np.ndarray) -> Tensor:
        return Tensor(arr, requires_grad=True)

    def uniform(self, shape, fan_in: int) -> Tensor:
        shape = tuple(int(s) for s in shape)
        if self.meta:
            return self._wrap(np.broadcast_to(np.zeros((), self.dtype), shape))
        bound = 1.0 / np.sqrt(max(fan_in, 1))
        return self._wrap(self.rng.uniform(-bound, bound, size=shape).astype(self.dtype))

    def zeros(self, shape) -> Tensor:
        shape = tuple(int(s) for s in shape)
        if self.meta:
            return self._wrap(np.broadcast_to(np.zeros((), self.dtype), shape))
        return self._wrap(np.zeros(shape, self.dtype))

    def ones(self, shape) -> Tensor:
        shape = tuple(int(s) for s in shape)
        if self.meta:
            return self._wrap(np.broadcast_to(np.ones((), self.dtype), shape))
        return self._wrap(np.ones(shape, self.dtype))


class Module:
    """Attribute-walking parameter container.

    Parameters are :class:`Tensor` attributes with ``requires_grad``; child
    modules may be attributes or lists of modules. Names are dotted paths in
    attribute definition order, so they are stable across runs.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, Tensor]]:
        for key, value in vars(self).items():
            if key.startswith("_"):
                continue
            name = f"{prefix}{key}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(name + ".")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def state_dict(self) -> dict[str, np.ndarray]:
        return {n: p.data for n, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray], strict: bool = True) -> None:
        own = dict(self.named_parameters())
        if strict:
            missing = sorted(set(own) - set(state))
            extra = sorted(set(state) - set(own))
            if missing or extra:
                raise ConfigError(f"state mismatch: missing {missing[:5]}, unexpected {extra[:5]}")
        for name, p in own.items():
            if name not in state:
                continue
            arr = np.asarray(state[name])
            if arr.shape != p.shape:
                raise ConfigError(f"{name}: checkpoint shape {arr.shape} != model shape {p.shape}")
            p.data = np.array(arr, dtype=p.data.dtype)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))


class Linear(Module):
    def __init__(self, d_in: int, d_out: int, init: Init, bias: bool = True):
        self.weight = init.uniform((d_in, d_out), fan_in=d_in)
        self.bias = init.zeros((d_out,)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        y = F.matmul(x, self.weight)
        return y + self.bias if self.bias is not None else y


@dataclass
class LayerNormParams:
    gamma: Tensor
    beta: Tensor
    eps: float = 1e-5

    def __post_init__(self):
        if self.eps <= 0:
            raise ConfigError(f"layer norm eps must be positive, got {self.eps}")
        if self.gamma.shape != self.beta.shape or len(self.gamma.shape) != 1:
            raise ConfigError(f"gamma {self.gamma.shape} and beta {self.beta.shape} must be equal 1-D")


class LayerNorm(Module):
    def __init__(self, dim: int, init: Init, eps: float = 1e-5):
        self.gamma = init.ones((dim,))
        self.beta = init.zeros((dim,))
        self.eps = eps

    @property
    def params(self) -> LayerNormParams:
        return LayerNormParams(self.gamma, self.beta, self.eps)

    def __call__(self, x: Tensor) -> Tensor:
        return F.layer_norm(x, self.gamma, self.beta, self.eps)


def layer_norm(x: Tensor, p: LayerNormParams) -> Tensor:
    return F.layer_norm(x, p.gamma, p.beta, p.eps)


class FeedForward(Module):
    """Two linear maps around a Swish nonlinearity."""

    def __init__(self, dim: int, hidden: int, init: Init):
        self.w1 = Linear(dim, hidden, init)
        self.w2 = Linear(hidden, dim, init)

    def __call__(self, x: Tensor, rng=None, training: bool = False, dropout: float = 0.0) -> Tensor:
        h = F.dropout(F.swish(self.w1(x)), dropout, rng, training)
        return self.w2(h)
