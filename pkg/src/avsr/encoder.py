"""Sequence encoders: post-LN transformer blocks and conformer blocks.

A conformer block computes, with four separate layer norms,

    x1 = LN(x + FFN(x) / 2)
    x2 = LN(x1 + MHSA(x1))
    x3 = LN(x2 + Conv(x2))
    y  = LN(x3 + FFN(x3) / 2)

where MHSA uses relative sinusoidal position terms. The transformer stack
instead adds a depthwise convolution of its input once, at stack entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .numerics import FeedForward, Init, LayerNorm, Linear, Module, Tensor
from .numerics import tensor as F

ENCODER_BACKBONES = ("transformer", "conformer")


@dataclass(frozen=True)
class EncoderConfig:
    backbone: str = "conformer"
    num_blocks: int = 2
    model_dim: int = 64
    num_heads: int = 4
    ffn_expansion: int = 4
    conv_kernel: int = 15
    pos_conv_kernel: int = 15
    layer_drop: float = 0.05
    dropout: float = 0.0
    attention_dropout: float = 0.0

    def __post_init__(self):
        if self.backbone not in ENCODER_BACKBONES:
            raise ConfigError(f"encoder backbone must be one of {ENCODER_BACKBONES}, got {self.backbone!r}")
        if self.model_dim % self.num_heads:
            raise ConfigError(f"model_dim {self.model_dim} not divisible by {self.num_heads} heads")
        if self.conv_kernel % 2 == 0 or self.pos_conv_kernel % 2 == 0:
            raise ConfigError("convolution kernels must be odd")
        if not 0.0 <= self.layer_drop < 1.0:
            raise ConfigError(f"layer_drop must lie in [0, 1), got {self.layer_drop}")
        if self.num_blocks < 1:
            raise ConfigError("need at least one block")

    @classmethod
    def full_scale(cls, backbone: str) -> "EncoderConfig":
        return cls(backbone=backbone, num_blocks=12, model_dim=768, num_heads=12, ffn_expansion=4,
                   conv_kernel=31, pos_conv_kernel=129, layer_drop=0.05, dropout=0.1,
                   attention_dropout=0.1)


def relative_sinusoids(length: int, dim: int) -> np.ndarray:
    """Embeddings for offsets ``-(length-1) .. (length-1)``, row ``m`` is offset ``m - length + 1``."""
    offsets = np.arange(-(length - 1), length, dtype=np.float64)[:, None]
    freqs = 1.0 / (10000.0 ** (np.arange(0, dim, 2, dtype=np.float64) / dim))
    pe = np.zeros((2 * length - 1, dim))
    pe[:, 0::2] = np.sin(offsets * freqs)
    pe[:, 1::2] = np.cos(offsets * freqs[: dim // 2])
    return pe


def _split_heads(x: Tensor, heads: int) -> Tensor:
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(x: Tensor) -> Tensor:
    b, h, t, dk = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dk)


def _as_batch(x) -> tuple[Tensor, bool]:
    x = F.as_tensor(x)
    if x.ndim == 2:
        return x.reshape(1, *x.shape), True
    if x.ndim != 3:
        raise ShapeError(f"encoder input must be [T, D] or [B, T, D], got {x.shape}")
    return x, False


class MultiHeadAttention(Module):
    """Scaled dot-product attention; ``kv`` defaults to the query stream."""

    def __init__(self, dim: int, heads: int, init: Init):
        self.heads = heads
        self.q = Linear(dim, dim, init)
        self.k = Linear(dim, dim, init)
        self.v = Linear(dim, dim, init)
        self.out = Linear(dim, dim, init)

    def __call__(self, x: Tensor, kv: Tensor | None = None, mask: np.ndarray | None = None,
                 rng=None, training: bool = False, dropout: float = 0.0) -> Tensor:
        kv = x if kv is None else kv
        q = _split_heads(self.q(x), self.heads)
        k = _split_heads(self.k(kv), self.heads)
        v = _split_heads(self.v(kv), self.heads)
        dk = q.shape[-1]
        logits = F.matmul(q, k.transpose(0, 1, 3, 2)) * (1.0 / np.sqrt(dk))
        if mask is not None:
            logits = logits + np.where(mask, 0.0, -np.inf)
        attn = F.dropout(F.softmax(logits, axis=-1), dropout, rng, training)
        return self.out(_merge_heads(F.matmul(attn, v)))


class RelPositionAttention(Module):
    """Multi-head attention with content, position and two global-bias logit terms."""

    def __init__(self, dim: int, heads: int, init: Init):
        self.heads = heads
        self.q = Linear(dim, dim, init)
        self.k = Linear(dim, dim, init)
        self.v = Linear(dim, dim, init)
        self.out = Linear(dim, dim, init)
        self.pos = Linear(dim, dim, init, bias=False)
        dk = dim // heads
        self.pos_bias_u = init.uniform((heads, dk), fan_in=dk)
        self.pos_bias_v = init.uniform((heads, dk), fan_in=dk)

    def logits(self, x: Tensor) -> tuple[Tensor, Tensor]:
        """Return scaled logits ``[B, H, T, T]`` and the value heads."""
        b, t, d = x.shape
        q = _split_heads(self.q(x), self.heads)                   # B H T dk
        k = _split_heads(self.k(x), self.heads)
        v = _split_heads(self.v(x), self.heads)
        dk = q.shape[-1]
        p = self.pos(Tensor(relative_sinusoids(t, d)))            # (2T-1) D
        p = p.reshape(2 * t - 1, self.heads, dk).transpose(1, 2, 0)  # H dk (2T-1)
        u = self.pos_bias_u.reshape(1, self.heads, 1, dk)
        vb = self.pos_bias_v.reshape(1, self.heads, 1, dk)
        content = F.matmul(q + u, k.transpose(0, 1, 3, 2))
        qv = (q + vb).transpose(1, 0, 2, 3).reshape(self.heads, b * t, dk)
        pos_full = F.matmul(qv, p).reshape(self.heads, b, t, 2 * t - 1).transpose(1, 0, 2, 3)
        ii, jj = np.meshgrid(np.arange(t), np.arange(t), indexing="ij")
        positional = F.gather_last(pos_full, ii - jj + t - 1)
        return (content + positional) * (1.0 / np.sqrt(dk)), v

    def __call__(self, x: Tensor, rng=None, training: bool = False, dropout: float = 0.0) -> Tensor:
        logits, v = self.logits(x)
        attn = F.dropout(F.softmax(logits, axis=-1), dropout, rng, training)
        return self.out(_merge_heads(F.matmul(attn, v)))


class ConvModule(Module):
    """Pointwise (GLU) -> depthwise -> layer norm -> Swish -> pointwise."""

    def __init__(self, dim: int, kernel: int, init: Init):
        self.pw_in = Linear(dim, 2 * dim, init)
        self.depthwise = init.uniform((kernel, dim), fan_in=kernel)
        self.depthwise_bias = init.zeros((dim,))
        self.norm = LayerNorm(dim, init)
        self.pw_out = Linear(dim, dim, init)

    def __call__(self, x: Tensor) -> Tensor:
        h = F.glu(self.pw_in(x), axis=-1)
        h = F.depthwise_conv1d(h, self.depthwise) + self.depthwise_bias
        return self.pw_out(F.swish(self.norm(h)))


class ConformerBlock(Module):
    def __init__(self, cfg: EncoderConfig, init: Init):
        d = cfg.model_dim
        self.ffn1 = FeedForward(d, cfg.ffn_expansion * d, init)
        self.norm_ffn1 = LayerNorm(d, init)
        self.mhsa = RelPositionAttention(d, cfg.num_heads, init)
        self.norm_mhsa = LayerNorm(d, init)
        self.conv = ConvModule(d, cfg.conv_kernel, init)
        self.norm_conv = LayerNorm(d, init)
        self.ffn2 = FeedForward(d, cfg.ffn_expansion * d, init)
        self.norm_ffn2 = LayerNorm(d, init)
        self._dropout = cfg.dropout
        self._attn_dropout = cfg.attention_dropout

    def __call__(self, x, rng=None, training: bool = False) -> Tensor:
        x, squeeze = _as_batch(x)
        p = self._dropout

        def drop(h):
            return F.dropout(h, p, rng, training)

        x = self.norm_ffn1(x + drop(self.ffn1(x, rng, training, p)) * 0.5)
        x = self.norm_mhsa(x + drop(self.mhsa(x, rng, training, self._attn_dropout)))
        x = self.norm_conv(x + drop(self.conv(x)))
        x = self.norm_ffn2(x + drop(self.ffn2(x, rng, training, p)) * 0.5)
        return x.reshape(x.shape[1:]) if squeeze else x


class TransformerBlock(Module):
    """Post-LN self-attention and feed-forward with residuals."""

    def __init__(self, cfg: EncoderConfig, init: Init):
        d = cfg.model_dim
        self.mhsa = MultiHeadAttention(d, cfg.num_heads, init)
        self.norm_mhsa = LayerNorm(d, init)
        self.ffn = FeedForward(d, cfg.ffn_expansion * d, init)
        self.norm_ffn = LayerNorm(d, init)
        self._dropout = cfg.dropout
        self._attn_dropout = cfg.attention_dropout

    def __call__(self, x, rng=None, training: bool = False) -> Tensor:
        x, squeeze = _as_batch(x)
        p = self._dropout
        h = self.mhsa(x, rng=rng, training=training, dropout=self._attn_dropout)
        x = self.norm_mhsa(x + F.dropout(h, p, rng, training))
        x = self.norm_ffn(x + F.dropout(self.ffn(x, rng, training, p), p, rng, training))
        return x.reshape(x.shape[1:]) if squeeze else x


class ConvPositionalEncoding(Module):
    """Depthwise convolution of the sequence added residually at stack entry."""

    def __init__(self, dim: int, kernel: int, init: Init):
        self.weight = init.uniform((kernel, dim), fan_in=kernel)
        self.bias = init.zeros((dim,))

    def __call__(self, x: Tensor) -> Tensor:
        return x + F.swish(F.depthwise_conv1d(x, self.weight) + self.bias)


class Encoder(Module):
    """Block stack with layer drop. ``__call__`` returns the final states, or all layers."""

    def __init__(self, cfg: EncoderConfig, init: Init):
        self.config = cfg
        d = cfg.model_dim
        if cfg.backbone == "transformer":
            self.pos_conv = ConvPositionalEncoding(d, cfg.pos_conv_kernel, init)
        else:
            self.pos_conv = None
        self.norm_in = LayerNorm(d, init)
        block_cls = ConformerBlock if cfg.backbone == "conformer" else TransformerBlock
        self.blocks = [block_cls(cfg, init) for _ in range(cfg.num_blocks)]

    def __call__(self, x, rng: np.random.Generator | None = None, training: bool = False,
                 return_layers: bool = False):
        x, squeeze = _as_batch(x)
        if x.shape[-1] != self.config.model_dim:
            raise ShapeError(f"encoder expects D={self.config.model_dim}, got {x.shape[-1]}")
        if self.pos_conv is not None:
            x = self.pos_conv(x)
        x = self.norm_in(x)
        layers = [x]
        for block in self.blocks:
            if training and rng is not None and rng.random() < self.config.layer_drop:
                layers.append(x)
                continue
            x = block(x, rng, training)
            layers.append(x)
        if squeeze:
            layers = [h.reshape(h.shape[1:]) for h in layers]
        return layers if return_layers else layers[-1]


def encode_stack(x, encoder: Encoder, rng=None, training: bool = False) -> Tensor:
    return encoder(x, rng=rng, training=training)
