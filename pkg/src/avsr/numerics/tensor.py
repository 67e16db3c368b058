"""Dense tensors with a per-pass reverse-mode gradient tape.

Every differentiable operation returns a new :class:`Tensor` that remembers
its parents and a closure mapping the output gradient to parent gradients.
:meth:`Tensor.backward` walks the graph once in reverse topological order and
then drops it, so the tape never outlives a single forward/backward pair.
"""

from __future__ import annotations

import contextlib
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import ConfigError, ShapeError

_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad():
    """Disable graph construction inside the block (inference mode)."""
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


def grad_enabled() -> bool:
    return _GRAD_ENABLED


class Tensor:
    """Row-major real array that may participate in the gradient tape.

    Args:
        data: array-like payload; converted to float64 unless it is already a
            floating array.
        requires_grad: whether gradients should be accumulated into ``grad``.
        name: optional label used in diagnostics and checkpoints.
    """

    __slots__ = ("data", "requires_grad", "grad", "name", "_parents", "_backward")
    __array_priority__ = 100

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        arr = np.asarray(data)
        if arr.dtype.kind != "f":
            arr = arr.astype(np.float64)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None

    # -- basic properties -------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        tag = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{tag})"

    def __len__(self) -> int:
        return len(self.data)

    # -- operators ----------------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        return getitem(self, key)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis, keepdims)

    # -- differentiation ------------------------------------------------------
    def backward(self, grad: np.ndarray | None = None) -> None:
        """Accumulate d(self)/d(leaf) into every leaf's ``grad`` and free the tape."""
        if not self.requires_grad:
            raise RuntimeError("backward() on a tensor that does not require grad")
        if grad is None:
            if self.size != 1:
                raise ShapeError(f"backward() needs an explicit gradient for shape {self.shape}")
            grad = np.ones_like(self.data)
        order = _topological(self)
        grads: dict[int, np.ndarray] = {id(self): np.asarray(grad, dtype=self.data.dtype)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg
        for node in order:
            if node._backward is not None:
                node._parents = ()
                node._backward = None


def _topological(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _result(data: np.ndarray, parents: Iterable[Tensor], backward) -> Tensor:
    parents = tuple(parents)
    out = Tensor(data)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


# ---------------------------------------------------------------------------
# elementwise arithmetic
# ---------------------------------------------------------------------------

def _check_broadcast(a: tuple, b: tuple) -> None:
    """Allow equal shapes, scalars, or a trailing-suffix operand (bias add)."""
    if a == b or len(a) == 0 or len(b) == 0:
        return
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    if long_[len(long_) - len(short):] == short:
        return
    if len(a) == len(b) and all(x == y or x == 1 or y == 1 for x, y in zip(a, b)):
        return
    raise ShapeError(f"incompatible operand shapes {a} and {b}")


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape)
    sa, sb = a.shape, b.shape
    return _result(a.data + b.data, (a, b),
                   lambda g: (_unbroadcast(g, sa), _unbroadcast(g, sb)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape)
    sa, sb = a.shape, b.shape
    return _result(a.data - b.data, (a, b),
                   lambda g: (_unbroadcast(g, sa), _unbroadcast(-g, sb)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape)
    ad, bd = a.data, b.data
    return _result(ad * bd, (a, b),
                   lambda g: (_unbroadcast(g * bd, ad.shape) if a.requires_grad else None,
                              _unbroadcast(g * ad, bd.shape) if b.requires_grad else None))


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a.shape, b.shape)
    ad, bd = a.data, b.data
    out = ad / bd
    return _result(out, (a, b),
                   lambda g: (_unbroadcast(g / bd, ad.shape) if a.requires_grad else None,
                              _unbroadcast(-g * out / bd, bd.shape) if b.requires_grad else None))


# ---------------------------------------------------------------------------
# linear algebra and shape manipulation
# ---------------------------------------------------------------------------

def matmul(a, b) -> Tensor:
    """Matrix product over the last two axes.

    ``a`` may carry leading batch axes; ``b`` is either 2-D (shared weight) or
    has the same leading axes as ``a``.
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul needs at least 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(
            f"matmul inner extents differ: left {a.shape} has K={a.shape[-1]}, "
            f"right {b.shape} has K={b.shape[-2]}")
    if b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise ShapeError(f"matmul batch extents differ: {a.shape[:-2]} vs {b.shape[:-2]}")
    ad, bd = a.data, b.data

    def backward(g):
        ga = g @ np.swapaxes(bd, -1, -2) if a.requires_grad else None
        gb = None
        if b.requires_grad:
            if bd.ndim == 2 and ad.ndim > 2:
                gb = ad.reshape(-1, ad.shape[-1]).T @ g.reshape(-1, g.shape[-1])
            else:
                gb = np.swapaxes(ad, -1, -2) @ g
        return ga, gb

    return _result(ad @ bd, (a, b), backward)


def reshape(x: Tensor, shape) -> Tensor:
    x = as_tensor(x)
    src = x.shape
    return _result(x.data.reshape(shape), (x,), lambda g: (g.reshape(src),))


def transpose(x: Tensor, axes=None) -> Tensor:
    x = as_tensor(x)
    if axes is None:
        axes = tuple(reversed(range(x.ndim)))
    inv = np.argsort(axes)
    return _result(np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inv),))


def swapaxes(x: Tensor, a1: int, a2: int) -> Tensor:
    axes = list(range(x.ndim))
    axes[a1], axes[a2] = axes[a2], axes[a1]
    return transpose(x, tuple(axes))


def getitem(x: Tensor, key) -> Tensor:
    x = as_tensor(x)
    src_shape, dtype = x.shape, x.data.dtype

    def backward(g):
        full = np.zeros(src_shape, dtype=dtype)
        np.add.at(full, key, g)
        return (full,)

    return _result(x.data[key], (x,), backward)


def concat(tensors: Sequence, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    ref = tensors[0].shape
    ax = axis % len(ref)
    for t in tensors[1:]:
        if len(t.shape) != len(ref) or any(
                s != r for i, (s, r) in enumerate(zip(t.shape, ref)) if i != ax):
            raise ShapeError(f"concat along axis {axis}: shapes {ref} and {t.shape} disagree")
    sizes = [t.shape[ax] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward(g):
        out = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            sl = [slice(None)] * g.ndim
            sl[ax] = slice(lo, hi)
            out.append(g[tuple(sl)])
        return out

    return _result(np.concatenate([t.data for t in tensors], axis=ax), tensors, backward)


def stack(tensors: Sequence, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    expanded = [reshape(t, t.shape[:axis % (t.ndim + 1)] + (1,) + t.shape[axis % (t.ndim + 1):])
                for t in tensors]
    return concat(expanded, axis=axis)


def tsum(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    shape = x.shape

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, shape).copy(),)

    return _result(np.sum(x.data, axis=axis, keepdims=keepdims), (x,), backward)


def mean(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    x = as_tensor(x)
    n = x.size if axis is None else int(np.prod([x.shape[a] for a in np.atleast_1d(axis)]))
    return mul(tsum(x, axis, keepdims), 1.0 / n)


def gather_last(x: Tensor, index: np.ndarray) -> Tensor:
    """``out[..., i, j] = x[..., i, index[i, j]]`` for a 2-D integer ``index``."""
    x = as_tensor(x)
    if index.ndim != 2 or index.shape[0] != x.shape[-2]:
        raise ShapeError(f"gather index {index.shape} does not match rows of {x.shape}")
    rows = np.arange(index.shape[0])[:, None]
    src_shape = x.shape

    def backward(g):
        full = np.zeros(src_shape, dtype=g.dtype)
        np.add.at(full, (Ellipsis, rows, index), g)
        return (full,)

    return _result(x.data[..., rows, index], (x,), backward)


def embedding(table: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup ``table[ids]`` with scatter-add backward."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeError(f"embedding ids outside [0, {table.shape[0]})")
    shape = table.shape

    def backward(g):
        full = np.zeros(shape, dtype=g.dtype)
        np.add.at(full, ids, g)
        return (full,)

    return _result(table.data[ids], (table,), backward)


# ---------------------------------------------------------------------------
# pointwise nonlinearities
# ---------------------------------------------------------------------------

def exp(x: Tensor) -> Tensor:
    x = as_tensor(x)
    out = np.exp(x.data)
    return _result(out, (x,), lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    x = as_tensor(x)
    xd = x.data
    return _result(np.log(xd), (x,), lambda g: (g / xd,))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sigmoid(x: Tensor) -> Tensor:
    x = as_tensor(x)
    s = _sigmoid(x.data)
    return _result(s, (x,), lambda g: (g * s * (1.0 - s),))


def tanh(x: Tensor) -> Tensor:
    x = as_tensor(x)
    t = np.tanh(x.data)
    return _result(t, (x,), lambda g: (g * (1.0 - t * t),))


def relu(x: Tensor) -> Tensor:
    x = as_tensor(x)
    pos = x.data > 0
    return _result(np.where(pos, x.data, 0.0), (x,), lambda g: (g * pos,))


def relu6(x: Tensor) -> Tensor:
    x = as_tensor(x)
    inside = (x.data > 0) & (x.data < 6)
    return _result(np.clip(x.data, 0.0, 6.0), (x,), lambda g: (g * inside,))


def swish(x: Tensor) -> Tensor:
    """x * sigmoid(x)."""
    x = as_tensor(x)
    s = _sigmoid(x.data)
    out = x.data * s
    return _result(out, (x,), lambda g: (g * (s + out * (1.0 - s)),))


def glu(x: Tensor, axis: int = -1) -> Tensor:
    """Split ``x`` in two along ``axis`` and return first * sigmoid(second)."""
    x = as_tensor(x)
    n = x.shape[axis]
    if n % 2:
        raise ShapeError(f"glu needs an even extent on axis {axis}, got {n}")
    first, second = np.split(x.data, 2, axis=axis)
    s = _sigmoid(second)
    out = first * s

    def backward(g):
        return (np.concatenate([g * s, g * first * s * (1.0 - s)], axis=axis),)

    return _result(out, (x,), backward)


def dropout(x: Tensor, p: float, rng: np.random.Generator | None, training: bool) -> Tensor:
    if not training or p <= 0.0 or rng is None:
        return x
    keep = (rng.random(x.shape) >= p) / (1.0 - p)
    return mul(x, keep)


# ---------------------------------------------------------------------------
# normalizers
# ---------------------------------------------------------------------------

def softmax(x: Tensor, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    z = x.data - np.max(x.data, axis=axis, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (p * (g - (g * p).sum(axis=axis, keepdims=True)),)

    return _result(p, (x,), backward)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    x = as_tensor(x)
    z = x.data - np.max(x.data, axis=axis, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=axis, keepdims=True))
    out = z - lse
    p = np.exp(out)

    def backward(g):
        return (g - p * g.sum(axis=axis, keepdims=True),)

    return _result(out, (x,), backward)


def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit (population) variance, then scale and shift."""
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    d = x.shape[-1]
    if gamma.shape != (d,) or beta.shape != (d,):
        raise ShapeError(f"layer_norm over D={d} given gamma {gamma.shape}, beta {beta.shape}")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    gd = gamma.data

    def backward(g):
        gx = None
        if x.requires_grad:
            gh = g * gd
            gx = inv * (gh - gh.mean(axis=-1, keepdims=True)
                        - xhat * (gh * xhat).mean(axis=-1, keepdims=True))
        lead = tuple(range(g.ndim - 1))
        return (gx,
                (g * xhat).sum(axis=lead) if gamma.requires_grad else None,
                g.sum(axis=lead) if beta.requires_grad else None)

    return _result(xhat * gd + beta.data, (x, gamma, beta), backward)


def group_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    """Single-group normalization of a channels-last sample.

    Statistics run over every axis except the first (the sample axis); the
    affine parameters are per channel (last axis).
    """
    x, gamma, beta = as_tensor(x), as_tensor(gamma), as_tensor(beta)
    c = x.shape[-1]
    if gamma.shape != (c,) or beta.shape != (c,):
        raise ShapeError(f"group_norm over C={c} given gamma {gamma.shape}, beta {beta.shape}")
    axes = tuple(range(1, x.ndim))
    mu = x.data.mean(axis=axes, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=axes, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    gd = gamma.data

    def backward(g):
        gx = None
        if x.requires_grad:
            gh = g * gd
            gx = inv * (gh - gh.mean(axis=axes, keepdims=True)
                        - xhat * (gh * xhat).mean(axis=axes, keepdims=True))
        lead = tuple(range(g.ndim - 1))
        return (gx,
                (g * xhat).sum(axis=lead) if gamma.requires_grad else None,
                g.sum(axis=lead) if beta.requires_grad else None)

    return _result(xhat * gd + beta.data, (x, gamma, beta), backward)


# ---------------------------------------------------------------------------
# convolutions (channels-last)
# ---------------------------------------------------------------------------

def _conv_geometry(in_sizes, kernel, stride, padding):
    out = []
    for n, k, s, p in zip(in_sizes, kernel, stride, padding):
        o = (n + 2 * p - k) // s + 1
        if o < 1:
            raise ShapeError(f"convolution window {k} (pad {p}) larger than input extent {n}")
        out.append(o)
    return tuple(out)


def _tuple(v, n):
    return tuple(v) if isinstance(v, (tuple, list)) else (v,) * n


def _offset_slices(offset, stride, out_sizes, n_lead):
    sl = [slice(None)] * n_lead
    for o, s, m in zip(offset, stride, out_sizes):
        sl.append(slice(o, o + s * (m - 1) + 1, s))
    sl.append(slice(None))
    return tuple(sl)


def conv(x: Tensor, w: Tensor, stride=1, padding=0) -> Tensor:
    """Dense N-d convolution (cross-correlation), channels-last.

    ``w`` has shape ``[*kernel, C_in, C_out]``; the ``len(kernel)`` axes of
    ``x`` just before its channel axis are spatial, anything earlier is batch.
    Lowered to a single matrix product over gathered patches.
    """
    x, w = as_tensor(x), as_tensor(w)
    nsp = w.ndim - 2
    if x.ndim < nsp + 1:
        raise ShapeError(f"conv input {x.shape} has fewer than {nsp} spatial axes")
    if x.shape[-1] != w.shape[-2]:
        raise ShapeError(f"conv channels: input has {x.shape[-1]}, weight expects {w.shape[-2]}")
    kernel = w.shape[:nsp]
    stride, padding = _tuple(stride, nsp), _tuple(padding, nsp)
    n_lead = x.ndim - nsp - 1
    in_sizes = x.shape[n_lead:n_lead + nsp]
    out_sizes = _conv_geometry(in_sizes, kernel, stride, padding)
    pad = [(0, 0)] * n_lead + [(p, p) for p in padding] + [(0, 0)]
    xp = np.pad(x.data, pad) if any(padding) else x.data
    wd = w.data
    cin, cout = wd.shape[-2], wd.shape[-1]
    lead = x.shape[:n_lead]
    offsets = list(np.ndindex(*kernel))
    pointwise = len(offsets) == 1 and all(s == 1 for s in stride)
    if pointwise:
        cols = xp.reshape(-1, cin)
    else:
        cols = np.stack([xp[_offset_slices(off, stride, out_sizes, n_lead)] for off in offsets],
                        axis=-2).reshape(-1, len(offsets) * cin)
    w2 = wd.reshape(-1, cout)
    out = (cols @ w2).reshape(lead + out_sizes + (cout,))

    def backward(g):
        g2 = g.reshape(-1, cout)
        gw = (cols.T @ g2).reshape(wd.shape) if w.requires_grad else None
        gx = None
        if x.requires_grad:
            gcols = g2 @ w2.T
            if pointwise:
                gx = gcols.reshape(xp.shape)
            else:
                gcols = gcols.reshape(lead + out_sizes + (len(offsets), cin))
                gx = np.zeros_like(xp)
                for i, off in enumerate(offsets):
                    gx[_offset_slices(off, stride, out_sizes, n_lead)] += gcols[..., i, :]
            if any(padding):
                crop = [slice(None)] * n_lead + [slice(p, p + n) for p, n in zip(padding, in_sizes)]
                gx = gx[tuple(crop) + (slice(None),)]
        return gx, gw

    return _result(out, (x, w), backward)


def depthwise_conv(x: Tensor, w: Tensor, stride=1, padding=0) -> Tensor:
    """Channel-independent N-d convolution, channels-last; ``w`` is ``[*kernel, C]``."""
    x, w = as_tensor(x), as_tensor(w)
    nsp = w.ndim - 1
    if x.ndim < nsp + 1:
        raise ShapeError(f"depthwise conv input {x.shape} has fewer than {nsp} spatial axes")
    if x.shape[-1] != w.shape[-1]:
        raise ShapeError(f"depthwise conv channels: input {x.shape[-1]}, kernel {w.shape[-1]}")
    kernel = w.shape[:nsp]
    stride, padding = _tuple(stride, nsp), _tuple(padding, nsp)
    n_lead = x.ndim - nsp - 1
    in_sizes = x.shape[n_lead:n_lead + nsp]
    out_sizes = _conv_geometry(in_sizes, kernel, stride, padding)
    pad = [(0, 0)] * n_lead + [(p, p) for p in padding] + [(0, 0)]
    xp = np.pad(x.data, pad) if any(padding) else x.data
    wd = w.data
    lead = x.shape[:n_lead]
    out = np.zeros(lead + out_sizes + (wd.shape[-1],), dtype=np.result_type(xp, wd))
    offsets = list(np.ndindex(*kernel))
    for off in offsets:
        out += xp[_offset_slices(off, stride, out_sizes, n_lead)] * wd[off]

    def backward(g):
        gx = np.zeros_like(xp) if x.requires_grad else None
        gw = np.zeros_like(wd) if w.requires_grad else None
        red = tuple(range(g.ndim - 1))
        for off in offsets:
            sl = _offset_slices(off, stride, out_sizes, n_lead)
            if gw is not None:
                gw[off] = (xp[sl] * g).sum(axis=red)
            if gx is not None:
                gx[sl] += g * wd[off]
        if gx is not None and any(padding):
            crop = [slice(None)] * n_lead + [slice(p, p + n) for p, n in zip(padding, in_sizes)]
            gx = gx[tuple(crop) + (slice(None),)]
        return gx, gw

    return _result(out, (x, w), backward)


def depthwise_conv1d(x: Tensor, kernel: Tensor) -> Tensor:
    """'Same'-padded per-channel 1-D convolution of ``x[..., T, D]`` with ``kernel[K, D]``."""
    k = kernel.shape[0]
    if k % 2 == 0:
        raise ConfigError(f"depthwise_conv1d needs an odd kernel, got K={k}")
    return depthwise_conv(x, kernel, stride=1, padding=k // 2)
