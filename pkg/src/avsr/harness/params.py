"""Exact parameter counts of full-size configurations, without allocating weights."""

from __future__ import annotations

from dataclasses import dataclass

from ..encoder import EncoderConfig
from ..fusion import FusionConfig
from ..model import AVModel, ModelConfig
from ..numerics import Init
from ..objectives import DecoderConfig, Seq2SeqDecoder
from ..visual import VisualConfig, count_params

# stacked fbank26 at the video rate
FULL_AUDIO_DIM = 26 * 4
FULL_DIM = 768


@dataclass(frozen=True)
class CountRow:
    encoder: str
    visual: str
    fusion: str
    audio_proj: int
    visual_stem: int
    visual_trunk: int
    visual_head: int
    fusion_params: int
    encoder_params: int
    total: int


def full_scale_config(encoder: str, visual: str, fusion: str = "concat") -> ModelConfig:
    return ModelConfig(FULL_AUDIO_DIM, VisualConfig.full_scale(visual, FULL_DIM),
                       FusionConfig(fusion, FULL_DIM), EncoderConfig.full_scale(encoder))


def count_system(encoder: str, visual: str, fusion: str = "concat") -> CountRow:
    model = AVModel(full_scale_config(encoder, visual, fusion), Init(0, meta=True))
    c = count_params(model)
    sub = model.visual.submodule_counts()
    return CountRow(encoder, visual, fusion, c["audio_proj"], sub["stem"], sub["trunk"], sub["head"],
                    c["fusion"], c["encoder"], c["total"])


def count_decoder(vocab_size: int = 1000, layers: int = 6) -> int:
    dec = Seq2SeqDecoder(DecoderConfig(vocab_size, FULL_DIM, 12, layers), Init(0, meta=True))
    return dec.num_parameters()


def count_table(fusions=("concat", "glu")) -> list[CountRow]:
    return [count_system(e, v, f) for e in ("transformer", "conformer") for v in ("resnet", "mobilenet")
            for f in fusions]


COUNT_COLUMNS = ("encoder", "visual", "fusion", "audio_proj", "visual_stem", "visual_trunk", "visual_head",
                 "fusion_params", "encoder_params", "total")


def rows_to_tsv(rows: list[CountRow]) -> str:
    lines = ["\t".join(COUNT_COLUMNS)]
    lines += ["\t".join(str(getattr(r, c)) for c in COUNT_COLUMNS) for r in rows]
    return "\n".join(lines) + "\n"
