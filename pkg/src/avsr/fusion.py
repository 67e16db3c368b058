"""Audio-visual fusion: plain concatenation or a GLU-style audio gate.

The gate follows

    m_t = concat(v_t, a_t) U + a
    h_t = (a_t W + b) * sigmoid(m_t V + c)

where ``a``, ``b``, ``c`` are bias vectors (the first is unrelated to the
audio stream ``a_t``). The encoder then sees ``concat(h_t, v_t)`` projected
back to the model width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import FeatureSequence
from .errors import AlignmentError, ConfigError, ShapeError
from .numerics import Init, Linear, Module, Tensor
from .numerics import tensor as F

FUSION_MODES = ("concat", "glu")


@dataclass(frozen=True)
class FusionConfig:
    mode: str = "glu"
    model_dim: int = 64
    p_audio: float = 0.0
    p_visual: float = 0.0

    def __post_init__(self):
        if self.mode not in FUSION_MODES:
            raise ConfigError(f"fusion mode must be one of {FUSION_MODES}, got {self.mode!r}")
        for name in ("p_audio", "p_visual"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if self.model_dim <= 0:
            raise ConfigError("model_dim must be positive")


def _as_stream(x) -> tuple[Tensor, float | None]:
    if isinstance(x, FeatureSequence):
        return Tensor(x.frames), x.frame_rate_hz
    return F.as_tensor(x), None


def _check_aligned(a, v) -> tuple[Tensor, Tensor, float | None]:
    at, ra = _as_stream(a)
    vt, rv = _as_stream(v)
    if at.shape[-2] != vt.shape[-2]:
        raise AlignmentError(f"audio has T={at.shape[-2]} frames but video has T={vt.shape[-2]}")
    if ra is not None and rv is not None and ra != rv:
        raise AlignmentError(f"audio at {ra} Hz but video at {rv} Hz")
    return at, vt, ra if ra is not None else rv


def _wrap(out: Tensor, like_rate: float | None, as_sequence: bool, kind: str = "fused"):
    if as_sequence:
        return FeatureSequence(out.data, like_rate or 25.0, kind)
    return out


@dataclass
class GatedFusionParams:
    U: Tensor
    W: Tensor
    V: Tensor
    a: Tensor
    b: Tensor
    c: Tensor

    def __post_init__(self):
        d = self.W.shape[0]
        want = {"U": (2 * d, d), "W": (d, d), "V": (d, d), "a": (d,), "b": (d,), "c": (d,)}
        for name, shape in want.items():
            if getattr(self, name).shape != shape:
                raise ShapeError(f"gate parameter {name} has shape {getattr(self, name).shape}, "
                                 f"expected {shape} for D={d}")

    @property
    def dim(self) -> int:
        return self.W.shape[0]


def concat_fuse(a_t, v_t, proj: Linear):
    """Project ``[v_t ; a_t]`` (visual first) from 2D to D."""
    at, vt, rate = _check_aligned(a_t, v_t)
    out = proj(F.concat([vt, at], axis=-1))
    return _wrap(out, rate, isinstance(a_t, FeatureSequence))


def gated_fuse(a_t, v_t, p: GatedFusionParams):
    at, vt, rate = _check_aligned(a_t, v_t)
    if at.shape[-1] != p.dim or vt.shape[-1] != p.dim:
        raise ShapeError(f"gate expects D={p.dim}, got audio {at.shape[-1]} and video {vt.shape[-1]}")
    m = F.matmul(F.concat([vt, at], axis=-1), p.U) + p.a
    h = (F.matmul(at, p.W) + p.b) * F.sigmoid(F.matmul(m, p.V) + p.c)
    return _wrap(h, rate, isinstance(a_t, FeatureSequence))


def encoder_input(h, v_t, proj: Linear):
    """Project ``[h_t ; v_t]`` to the encoder width."""
    ht, vt, rate = _check_aligned(h, v_t)
    out = proj(F.concat([ht, vt], axis=-1))
    return _wrap(out, rate, isinstance(h, FeatureSequence))


def modality_keep(p_audio: float, p_visual: float, rng: np.random.Generator) -> tuple[bool, bool]:
    """Draw (keep_audio, keep_visual); a double drop keeps one modality uniformly."""
    drop_a = rng.random() < p_audio
    drop_v = rng.random() < p_visual
    if drop_a and drop_v:
        if rng.random() < 0.5:
            drop_a = False
        else:
            drop_v = False
    return not drop_a, not drop_v


def modality_dropout(a_t: np.ndarray, v_t: np.ndarray, p_audio: float, p_visual: float,
                     rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Zero a whole modality at random, never both."""
    keep_a, keep_v = modality_keep(p_audio, p_visual, rng)
    return (a_t if keep_a else np.zeros_like(a_t)), (v_t if keep_v else np.zeros_like(v_t))


class FusionModule(Module):
    """Trainable fusion stage shared by pre-training and fine-tuning."""

    def __init__(self, cfg: FusionConfig, init: Init):
        d = cfg.model_dim
        self.mode = cfg.mode
        if cfg.mode == "glu":
            self.U = init.uniform((2 * d, d), fan_in=2 * d)
            self.W = init.uniform((d, d), fan_in=d)
            self.V = init.uniform((d, d), fan_in=d)
            self.a = init.zeros((d,))
            self.b = init.zeros((d,))
            self.c = init.zeros((d,))
        self.proj = Linear(2 * d, d, init)

    @property
    def gate(self) -> GatedFusionParams:
        return GatedFusionParams(self.U, self.W, self.V, self.a, self.b, self.c)

    def __call__(self, a_t: Tensor, v_t: Tensor) -> Tensor:
        if self.mode == "concat":
            return concat_fuse(a_t, v_t, self.proj)
        return encoder_input(gated_fuse(a_t, v_t, self.gate), v_t, self.proj)
