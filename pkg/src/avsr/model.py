"""Full audio-visual encoder: audio projection, visual backbone, fusion, encoder stack."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import Encoder, EncoderConfig
from .errors import ConfigError, ShapeError
from .fusion import FusionConfig, FusionModule, modality_keep
from .numerics import Init, Linear, Module, Tensor
from .visual import BackboneModel, VisualConfig


@dataclass(frozen=True)
class ModelConfig:
    audio_dim: int
    visual: VisualConfig
    fusion: FusionConfig
    encoder: EncoderConfig

    def __post_init__(self):
        d = self.encoder.model_dim
        if self.visual.embed_dim != d or self.fusion.model_dim != d:
            raise ConfigError(f"visual ({self.visual.embed_dim}), fusion ({self.fusion.model_dim}) and "
                              f"encoder ({d}) widths must agree")
        if self.audio_dim <= 0:
            raise ConfigError("audio_dim must be positive")


class AVModel(Module):
    def __init__(self, cfg: ModelConfig, init: Init):
        self.config = cfg
        self.audio_proj = Linear(cfg.audio_dim, cfg.encoder.model_dim, init)
        self.visual = BackboneModel(cfg.visual, init)
        self.fusion = FusionModule(cfg.fusion, init)
        self.encoder = Encoder(cfg.encoder, init)

    def encode(self, audio: np.ndarray, video: np.ndarray, *, audio_mask: np.ndarray | None = None,
               rng: np.random.Generator | None = None, training: bool = False,
               modality_drop: bool = False, use_visual: bool = True, return_layers: bool = False):
        """Encode a batch ``audio[B, T, Fa]``, ``video[B, T, S, S]``.

        Masked frames (``audio_mask[B, T]``) have their audio zeroed before the
        projection; the visual stream is never masked. ``use_visual=False``
        zeroes the visual embedding (audio-only decoding).
        """
        audio = np.asarray(audio, dtype=np.float64)
        video = np.asarray(video, dtype=np.float64)
        if audio.ndim != 3 or video.ndim != 4 or audio.shape[:2] != video.shape[:2]:
            raise ShapeError(f"need audio [B, T, F] and video [B, T, S, S] with equal B, T; "
                             f"got {audio.shape} and {video.shape}")
        if audio_mask is not None:
            audio = np.where(np.asarray(audio_mask, bool)[..., None], 0.0, audio)
        a = self.audio_proj(Tensor(audio))
        v = self.visual(Tensor(video))
        b = audio.shape[0]
        keep_a = np.ones((b, 1, 1))
        keep_v = np.ones((b, 1, 1)) if use_visual else np.zeros((b, 1, 1))
        if training and modality_drop and rng is not None:
            fc = self.config.fusion
            for i in range(b):
                ka, kv = modality_keep(fc.p_audio, fc.p_visual, rng)
                keep_a[i] *= ka
                keep_v[i] *= kv
        if not keep_a.all():
            a = a * keep_a
        if not keep_v.all():
            v = v * keep_v
        x = self.fusion(a, v)
        return self.encoder(x, rng=rng, training=training, return_layers=return_layers)

    def frontend_modules(self) -> dict[str, Module]:
        return {"audio_proj": self.audio_proj, "visual": self.visual, "fusion": self.fusion,
                "encoder": self.encoder}
