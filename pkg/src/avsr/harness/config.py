"""Run configuration: one INI file with a fixed set of sections and keys.

Unknown sections or keys are rejected so that typos fail loudly. The
resolved configuration (defaults filled in) is written next to every run's
outputs.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..audio import AudioFeatureConfig
from ..encoder import EncoderConfig
from ..errors import ConfigError
from ..fusion import FusionConfig
from ..model import ModelConfig
from ..objectives import MaskSpec, PhaseSchedule, TrainConfig
from ..visual import VisualConfig
from .noise import parse_noise_specs
from .synth import CorpusSpec


@dataclass
class RunSection:
    seed: int = 0


@dataclass
class CorpusSection:
    num_utts: int = 20
    duration_s: float = 1.2
    seed: int = 0


@dataclass
class AudioSection:
    window_ms: float = 25.0
    hop_ms: float = 10.0
    n_mels: int = 26
    stack: int = 4


@dataclass
class VisualSection:
    backbone: str = "resnet"
    frame_size: int = 16
    width: float = 0.125
    stem_kernel: str = "5,7,7"


@dataclass
class FusionSection:
    mode: str = "glu"
    p_audio: float = 0.0
    p_visual: float = 0.0


@dataclass
class EncoderSection:
    backbone: str = "conformer"
    blocks: int = 2
    dim: int = 64
    heads: int = 4
    ffn_expansion: int = 4
    conv_kernel: int = 15
    pos_conv_kernel: int = 15
    layer_drop: float = 0.05
    dropout: float = 0.0
    attention_dropout: float = 0.0


@dataclass
class ObjectiveSection:
    schedule: str = "100:mfcc39"
    mask_prob: float = 0.08
    span_len: int = 10
    kmeans_iters: int = 30
    kmeans_restarts: int = 1


@dataclass
class PretrainSection:
    steps: int = 2000
    batch_size: int = 2
    update_freq: int = 1
    peak_lr: float = 3e-3
    warmup_steps: int = 100
    modality_drop: bool = True


@dataclass
class FinetuneSection:
    steps: int = 1500
    batch_size: int = 2
    update_freq: int = 1
    peak_lr: float = 3e-3
    warmup_steps: int = 100
    freeze_fraction: float = 0.8
    modality_drop: bool = True
    unit: str = "char"
    vocab_file: str = ""
    decoder_layers: int = 2
    decoder_heads: int = 4
    max_len: int = 64


@dataclass
class EvalSection:
    modes: str = "A,AV"
    noise: str = "babble:5,music:5,natural:5,all:5"
    seed: int = 0


@dataclass
class RunConfig:
    run: RunSection = field(default_factory=RunSection)
    corpus: CorpusSection = field(default_factory=CorpusSection)
    audio: AudioSection = field(default_factory=AudioSection)
    visual: VisualSection = field(default_factory=VisualSection)
    fusion: FusionSection = field(default_factory=FusionSection)
    encoder: EncoderSection = field(default_factory=EncoderSection)
    objective: ObjectiveSection = field(default_factory=ObjectiveSection)
    pretrain: PretrainSection = field(default_factory=PretrainSection)
    finetune: FinetuneSection = field(default_factory=FinetuneSection)
    eval: EvalSection = field(default_factory=EvalSection)

    # -- parsing --------------------------------------------------------------
    @classmethod
    def from_ini(cls, text: str, source: str = "<config>") -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        cfg = cls()
        sections = {f.name: f for f in fields(cls)}
        for name in parser.sections():
            if name not in sections:
                raise ConfigError(f"{source}: unknown section [{name}]")
            sec = getattr(cfg, name)
            known = {f.name: f for f in fields(sec)}
            for key, raw in parser.items(name):
                if key not in known:
                    raise ConfigError(f"{source}: unknown key {key!r} in [{name}]")
                setattr(sec, key, _coerce(raw, known[key].type, f"{name}.{key}", source))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.from_ini(path.read_text(encoding="utf-8"), str(path))

    def set(self, dotted: str, value) -> None:
        sec_name, _, key = dotted.partition(".")
        sec = getattr(self, sec_name, None)
        if sec is None or key not in {f.name for f in fields(sec)}:
            raise ConfigError(f"unknown setting {dotted!r}")
        ftype = {f.name: f.type for f in fields(sec)}[key]
        setattr(sec, key, _coerce(str(value), ftype, dotted, "<override>"))
        self.validate()

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for f in fields(self):
            sec = getattr(self, f.name)
            parser[f.name] = {k: _format(v) for k, v in dataclasses.asdict(sec).items()}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    # -- derived objects --------------------------------------------------------
    def validate(self) -> None:
        """Build every derived object once so invalid values surface as ConfigError."""
        self.model_config()
        self.audio_config()
        self.corpus_spec()
        self.schedule()
        self.mask_spec()
        self.pretrain_config()
        self.finetune_config()
        self.eval_modes()
        parse_noise_specs(self.eval.noise, self.eval.seed)
        if self.finetune.unit not in ("char", "subword"):
            raise ConfigError(f"finetune.unit must be 'char' or 'subword', got {self.finetune.unit!r}")
        if self.finetune.unit == "subword" and not self.finetune.vocab_file:
            raise ConfigError("finetune.unit = subword needs finetune.vocab_file")
        if self.audio.stack < 1:
            raise ConfigError("audio.stack must be >= 1")

    def audio_config(self) -> AudioFeatureConfig:
        return AudioFeatureConfig(window_ms=self.audio.window_ms, hop_ms=self.audio.hop_ms,
                                  n_mels=self.audio.n_mels)

    def visual_config(self) -> VisualConfig:
        try:
            kernel = tuple(int(k) for k in self.visual.stem_kernel.split(","))
        except ValueError:
            raise ConfigError(f"visual.stem_kernel must be three integers, got {self.visual.stem_kernel!r}") from None
        if len(kernel) != 3:
            raise ConfigError(f"visual.stem_kernel must be three integers, got {self.visual.stem_kernel!r}")
        return VisualConfig(backbone=self.visual.backbone, frame_size=self.visual.frame_size,
                            stem_kernel=kernel, embed_dim=self.encoder.dim,
                            width_multiplier=self.visual.width)

    def encoder_config(self) -> EncoderConfig:
        e = self.encoder
        return EncoderConfig(backbone=e.backbone, num_blocks=e.blocks, model_dim=e.dim, num_heads=e.heads,
                             ffn_expansion=e.ffn_expansion, conv_kernel=e.conv_kernel,
                             pos_conv_kernel=e.pos_conv_kernel, layer_drop=e.layer_drop,
                             dropout=e.dropout, attention_dropout=e.attention_dropout)

    def model_config(self) -> ModelConfig:
        fusion = FusionConfig(self.fusion.mode, self.encoder.dim, self.fusion.p_audio, self.fusion.p_visual)
        return ModelConfig(self.audio.n_mels * self.audio.stack, self.visual_config(), fusion,
                           self.encoder_config())

    def corpus_spec(self) -> CorpusSpec:
        return CorpusSpec(self.corpus.num_utts, self.corpus.duration_s, self.visual.frame_size,
                          self.corpus.seed)

    def schedule(self) -> PhaseSchedule:
        return PhaseSchedule.parse(self.objective.schedule)

    def mask_spec(self) -> MaskSpec:
        return MaskSpec(self.objective.mask_prob, self.objective.span_len)

    def pretrain_config(self) -> TrainConfig:
        p = self.pretrain
        return TrainConfig(steps=p.steps, batch_size=p.batch_size, update_freq=p.update_freq,
                           peak_lr=p.peak_lr, warmup_steps=p.warmup_steps, freeze_fraction=0.0,
                           modality_drop=p.modality_drop)

    def finetune_config(self) -> TrainConfig:
        p = self.finetune
        return TrainConfig(steps=p.steps, batch_size=p.batch_size, update_freq=p.update_freq,
                           peak_lr=p.peak_lr, warmup_steps=p.warmup_steps,
                           freeze_fraction=p.freeze_fraction, modality_drop=p.modality_drop)

    def eval_modes(self) -> list[str]:
        modes = [m.strip() for m in self.eval.modes.split(",") if m.strip()]
        bad = [m for m in modes if m not in ("A", "AV")]
        if bad or not modes:
            raise ConfigError(f"eval.modes must list A and/or AV, got {self.eval.modes!r}")
        return modes


def _coerce(raw: str, ftype, key: str, source: str):
    ftype = ftype if isinstance(ftype, str) else ftype.__name__
    raw = raw.strip()
    try:
        if ftype == "int":
            return int(raw)
        if ftype == "float":
            return float(raw)
        if ftype == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{source}: {key} expects {ftype}, got {raw!r}") from None
    return raw


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)
