"""Visual frontend: 3-D convolutional stem plus a residual or inverted-residual 2-D trunk.

Both backbones share the stem (temporal kernel 5, spatial stride 2) and end
in a global spatial average pool and a linear head to the model width.
Normalization is single-group per frame, so single-utterance batches are
well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import FeatureSequence
from .errors import ConfigError, ShapeError
from .numerics import Init, Linear, Module, Tensor, no_grad
from .numerics import tensor as F

BACKBONES = ("resnet", "mobilenet")

# (expansion, channels, repeats, stride); strides trimmed so the trunk downsamples x4
MOBILENET_SETTINGS = (
    (1, 16, 1, 1),
    (6, 24, 2, 2),
    (6, 32, 3, 2),
    (6, 64, 4, 1),
    (6, 96, 3, 1),
    (6, 160, 3, 1),
    (6, 320, 1, 1),
)
RESNET_STAGES = ((64, 1), (128, 2), (256, 2), (512, 1))
TRUNK_STRIDE = 4
STEM_STRIDE = 2


@dataclass(frozen=True)
class VisualConfig:
    backbone: str = "resnet"
    frame_size: int = 32
    stem_kernel: tuple[int, int, int] = (5, 7, 7)
    embed_dim: int = 64
    width_multiplier: float = 0.25
    stem_channels: int = 64
    last_channels: int = 1280

    def __post_init__(self):
        if self.backbone not in BACKBONES:
            raise ConfigError(f"visual backbone must be one of {BACKBONES}, got {self.backbone!r}")
        if self.embed_dim <= 0 or self.width_multiplier <= 0:
            raise ConfigError("embed_dim and width_multiplier must be positive")
        if any(k % 2 == 0 for k in self.stem_kernel):
            raise ConfigError(f"stem kernel extents must be odd, got {self.stem_kernel}")
        stride = STEM_STRIDE * TRUNK_STRIDE
        if self.frame_size % stride:
            raise ConfigError(f"frame_size {self.frame_size} is not divisible by the total "
                              f"spatial stride {stride}")

    @classmethod
    def full_scale(cls, backbone: str = "resnet", embed_dim: int = 768) -> "VisualConfig":
        return cls(backbone=backbone, frame_size=88, embed_dim=embed_dim, width_multiplier=1.0)


def make_divisible(v: float, divisor: int = 8) -> int:
    new_v = max(divisor, int(v + divisor / 2) // divisor * divisor)
    if new_v < 0.9 * v:
        new_v += divisor
    return new_v


class Conv(Module):
    def __init__(self, kernel, c_in, c_out, init: Init, stride=1, padding=0):
        fan_in = int(np.prod(kernel)) * c_in
        self.weight = init.uniform(tuple(kernel) + (c_in, c_out), fan_in=fan_in)
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return F.conv(x, self.weight, self.stride, self.padding)


class DepthwiseConv(Module):
    def __init__(self, kernel, channels, init: Init, stride=1, padding=0):
        self.weight = init.uniform(tuple(kernel) + (channels,), fan_in=int(np.prod(kernel)))
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return F.depthwise_conv(x, self.weight, self.stride, self.padding)


class GroupNorm(Module):
    def __init__(self, channels: int, init: Init):
        self.gamma = init.ones((channels,))
        self.beta = init.zeros((channels,))

    def __call__(self, x: Tensor) -> Tensor:
        return F.group_norm(x, self.gamma, self.beta)


class BasicBlock(Module):
    def __init__(self, c_in, c_out, stride, init: Init):
        self.conv1 = Conv((3, 3), c_in, c_out, init, stride=stride, padding=1)
        self.norm1 = GroupNorm(c_out, init)
        self.conv2 = Conv((3, 3), c_out, c_out, init, padding=1)
        self.norm2 = GroupNorm(c_out, init)
        if stride != 1 or c_in != c_out:
            self.down = Conv((1, 1), c_in, c_out, init, stride=stride)
            self.down_norm = GroupNorm(c_out, init)
        else:
            self.down = None

    def __call__(self, x):
        h = F.relu(self.norm1(self.conv1(x)))
        h = self.norm2(self.conv2(h))
        skip = self.down_norm(self.down(x)) if self.down is not None else x
        return F.relu(h + skip)


class InvertedResidual(Module):
    def __init__(self, c_in, c_out, stride, expansion, init: Init):
        hidden = c_in * expansion
        self.expand = Conv((1, 1), c_in, hidden, init) if expansion != 1 else None
        self.expand_norm = GroupNorm(hidden, init) if expansion != 1 else None
        self.depthwise = DepthwiseConv((3, 3), hidden, init, stride=stride, padding=1)
        self.dw_norm = GroupNorm(hidden, init)
        self.project = Conv((1, 1), hidden, c_out, init)
        self.project_norm = GroupNorm(c_out, init)
        self.residual = stride == 1 and c_in == c_out

    def __call__(self, x):
        h = x
        if self.expand is not None:
            h = F.relu6(self.expand_norm(self.expand(h)))
        h = F.relu6(self.dw_norm(self.depthwise(h)))
        h = self.project_norm(self.project(h))
        return x + h if self.residual else h


class ResNetTrunk(Module):
    def __init__(self, c_in: int, cfg: VisualConfig, init: Init):
        self.blocks = []
        c = c_in
        for width, stride in RESNET_STAGES:
            c_out = max(1, int(round(width * cfg.width_multiplier)))
            self.blocks.append(BasicBlock(c, c_out, stride, init))
            self.blocks.append(BasicBlock(c_out, c_out, 1, init))
            c = c_out
        self.out_channels = c

    def __call__(self, x):
        for blk in self.blocks:
            x = blk(x)
        return x


class MobileNetTrunk(Module):
    def __init__(self, c_in: int, cfg: VisualConfig, init: Init):
        w = cfg.width_multiplier
        c = make_divisible(32 * w)
        self.first = Conv((3, 3), c_in, c, init, padding=1)
        self.first_norm = GroupNorm(c, init)
        self.blocks = []
        for t, ch, n, s in MOBILENET_SETTINGS:
            c_out = make_divisible(ch * w)
            for i in range(n):
                self.blocks.append(InvertedResidual(c, c_out, s if i == 0 else 1, t, init))
                c = c_out
        last = make_divisible(cfg.last_channels * w) if w < 1.0 else cfg.last_channels
        self.last = Conv((1, 1), c, last, init)
        self.last_norm = GroupNorm(last, init)
        self.out_channels = last

    def __call__(self, x):
        x = F.relu6(self.first_norm(self.first(x)))
        for blk in self.blocks:
            x = blk(x)
        return F.relu6(self.last_norm(self.last(x)))


class BackboneModel(Module):
    """Per-frame visual encoder ``[B, T, S, S] -> [B, T, D]``."""

    def __init__(self, cfg: VisualConfig, init: Init):
        self.config = cfg
        kt, kh, kw = cfg.stem_kernel
        c0 = max(1, int(round(cfg.stem_channels * cfg.width_multiplier)))
        self.stem = Conv(cfg.stem_kernel, 1, c0, init, stride=(1, STEM_STRIDE, STEM_STRIDE),
                         padding=(kt // 2, kh // 2, kw // 2))
        self.stem_norm = GroupNorm(c0, init)
        trunk_cls = ResNetTrunk if cfg.backbone == "resnet" else MobileNetTrunk
        self.trunk = trunk_cls(c0, cfg, init)
        self.head = Linear(self.trunk.out_channels, cfg.embed_dim, init)

    def __call__(self, frames) -> Tensor:
        frames = F.as_tensor(frames)
        s = self.config.frame_size
        if frames.ndim != 4 or frames.shape[-2:] != (s, s):
            raise ShapeError(f"video must be [B, T, {s}, {s}], got {frames.shape}")
        b, t = frames.shape[:2]
        x = self.stem(frames.reshape(b, t, s, s, 1))
        x = x.reshape((b * t,) + x.shape[2:])
        x = F.relu(self.stem_norm(x))
        x = self.trunk(x)
        pooled = x.mean(axis=(1, 2))
        return self.head(pooled).reshape(b, t, self.config.embed_dim)

    def submodule_counts(self) -> dict[str, int]:
        return {
            "stem": self.stem.num_parameters() + self.stem_norm.num_parameters(),
            "trunk": self.trunk.num_parameters(),
            "head": self.head.num_parameters(),
        }


def build_backbone(cfg: VisualConfig, seed=0, meta: bool = False) -> BackboneModel:
    return BackboneModel(cfg, Init(seed, meta=meta))


def encode_video(model: BackboneModel, frames: np.ndarray, frame_rate_hz: float = 25.0) -> FeatureSequence:
    """Embed every frame of ``frames[T, 1, S, S]`` (values in [0, 1])."""
    frames = np.asarray(frames, dtype=np.float64)
    s = model.config.frame_size
    if frames.ndim != 4 or frames.shape[1] != 1 or frames.shape[2:] != (s, s):
        raise ShapeError(f"video must be [T, 1, {s}, {s}], got {frames.shape}")
    with no_grad():
        out = model(Tensor(frames[None, :, 0]))
    return FeatureSequence(out.data[0], frame_rate_hz, "visual")


def count_params(model: Module) -> dict[str, int]:
    """Exact parameter count per top-level submodule plus ``total``."""
    counts: dict[str, int] = {}
    for name, p in model.named_parameters():
        top = name.split(".", 1)[0]
        counts[top] = counts.get(top, 0) + p.size
    counts["total"] = sum(counts.values())
    return counts
