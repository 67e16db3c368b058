"""Pipeline steps behind the CLI, each reading and writing a fixed workspace layout.

::

    out/
      config.ini                 resolved configuration of the last command
      corpus/manifest.tsv        synthetic corpus (when generated)
      features/                  AVHT feature dumps and a preview figure
      labels/phase<N>/           one int32 label file per utterance, centroids, labels.json
      checkpoints/phase<N>/      AV model + prediction head after pre-training phase N
      checkpoints/finetune/      AV model + decoder
      metrics/*.jsonl, *.png     training curves
      decode/hyps.tsv
      eval/report.{tsv,jsonl,png}
"""

from __future__ import annotations

import json
import logging
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..data import UtteranceFeatures, load_corpus, read_manifest
from ..errors import ConfigError, DataError, PipelineError
from ..model import AVModel
from ..numerics import Init
from ..numerics.io import load_checkpoint, save_tensor
from ..objectives import (DecoderConfig, Seq2SeqDecoder, Vocab, decode_items, finetune, load_modules,
                          make_head, masked_accuracy, pretrain, read_labels, run_phase_labeling,
                          save_modules, write_labels)
from . import plotting
from .config import RunConfig
from .evaluate import EvalReport, run_eval
from .noise import parse_noise_specs
from .scoring import score_corpus
from .synth import make_corpus

log = logging.getLogger("avsr")


def derive_seed(seed: int, *tags) -> int:
    """Stable sub-seed for a named purpose."""
    words = [int(seed)] + [zlib.crc32(str(t).encode()) for t in tags]
    return int(np.random.SeedSequence(words).generate_state(1)[0])


@dataclass
class Workspace:
    root: Path

    def __post_init__(self):
        self.root = Path(self.root)

    @property
    def manifest(self) -> Path:
        return self.root / "corpus" / "manifest.tsv"

    def labels(self, phase: int) -> Path:
        return self.root / "labels" / f"phase{phase}"

    def checkpoint(self, phase: int) -> Path:
        return self.root / "checkpoints" / f"phase{phase}"

    @property
    def finetuned(self) -> Path:
        return self.root / "checkpoints" / "finetune"

    @property
    def metrics(self) -> Path:
        return self.root / "metrics"

    def latest_pretrained(self) -> Path | None:
        phases = sorted((int(p.name[5:]), p) for p in (self.root / "checkpoints").glob("phase*")
                        if p.name[5:].isdigit() and (p / "manifest.json").is_file())
        return phases[-1][1] if phases else None

    def record_config(self, cfg: RunConfig) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        text = cfg.to_ini()
        (self.root / "config.ini").write_text(text, encoding="utf-8")
        log.info("resolved configuration:\n%s", text.strip())


def _check_phase(cfg: RunConfig, phase: int) -> None:
    n = len(cfg.schedule())
    if not 1 <= phase <= n:
        raise ConfigError(f"phase {phase} outside the configured schedule of {n} phases")


def _corpus(cfg: RunConfig, manifest) -> list[UtteranceFeatures]:
    return load_corpus(manifest, cfg.audio_config(), cfg.audio.stack)


def build_model(cfg: RunConfig) -> AVModel:
    return AVModel(cfg.model_config(), Init(derive_seed(cfg.run.seed, "model")))


def _load_pretrained(cfg: RunConfig, ckpt: Path) -> AVModel:
    if not (Path(ckpt) / "manifest.json").is_file():
        raise PipelineError(f"checkpoint not found: {ckpt}")
    model = build_model(cfg)
    load_modules(ckpt, {"model": model})
    return model


# -- steps ---------------------------------------------------------------------

def step_synth(cfg: RunConfig, ws: Workspace) -> Path:
    manifest = make_corpus(ws.manifest.parent, cfg.corpus_spec())
    log.info("wrote %d utterances to %s", cfg.corpus.num_utts, manifest)
    return manifest


def step_featurize(cfg: RunConfig, ws: Workspace, manifest) -> Path:
    items = _corpus(cfg, manifest)
    out = ws.root / "features"
    out.mkdir(parents=True, exist_ok=True)
    rows = ["utt_id\tframes\taudio_dim\tmfcc_dim"]
    for it in items:
        save_tensor(out / f"{it.utt_id}.audio.avht", it.audio)
        save_tensor(out / f"{it.utt_id}.mfcc.avht", it.mfcc)
        rows.append(f"{it.utt_id}\t{it.num_frames}\t{it.audio.shape[1]}\t{it.mfcc.shape[1]}")
    (out / "features.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    plotting.plot_features(items[0].audio, items[0].mfcc, items[0].video, out / "features.png", items[0].utt_id)
    return out / "features.tsv"


def step_cluster(cfg: RunConfig, ws: Workspace, manifest, phase: int, checkpoint=None) -> Path:
    _check_phase(cfg, phase)
    schedule = cfg.schedule()
    items = _corpus(cfg, manifest)
    model = None
    if phase > 1:
        ckpt = Path(checkpoint) if checkpoint else ws.checkpoint(phase - 1)
        if not (ckpt / "manifest.json").is_file():
            raise PipelineError(f"phase {phase} clusters encoder features and needs the phase {phase - 1} "
                                f"checkpoint, not found at {ckpt}")
        model = _load_pretrained(cfg, ckpt)
    o = cfg.objective
    labelset = run_phase_labeling(items, schedule, phase, model, derive_seed(cfg.run.seed, "kmeans", phase),
                                  o.kmeans_iters, o.kmeans_restarts)
    k, src = schedule.phases[phase - 1]
    out = write_labels(ws.labels(phase), labelset, {"phase": phase, "source": str(src)})
    log.info("phase %d: k=%d on %s, inertia %.6g", phase, k, src, labelset.inertia)
    return out


def step_pretrain(cfg: RunConfig, ws: Workspace, manifest, phase: int) -> dict:
    _check_phase(cfg, phase)
    items = _corpus(cfg, manifest)
    if not (ws.labels(phase) / "labels.json").is_file():
        raise PipelineError(f"no labels for phase {phase} under {ws.labels(phase)}; run cluster first")
    labels, k = read_labels(ws.labels(phase), [it.utt_id for it in items])
    model = build_model(cfg) if phase == 1 else _load_pretrained(cfg, ws.checkpoint(phase - 1))
    head = make_head(model, k, derive_seed(cfg.run.seed, "head", phase))
    rng = np.random.default_rng(derive_seed(cfg.run.seed, "pretrain", phase))
    metrics = ws.metrics / f"pretrain_phase{phase}.jsonl"
    res = pretrain(model, head, items, labels, cfg.mask_spec(), cfg.pretrain_config(), rng, metrics, phase)
    acc = masked_accuracy(model, head, items, labels, cfg.mask_spec(), derive_seed(cfg.run.seed, "acc", phase))
    save_modules(ws.checkpoint(phase), {"model": model, "head": head},
                 {"phase": phase, "k": k, "masked_accuracy": acc})
    if res.history:
        plotting.plot_training(res.history, metrics.with_suffix(".png"), f"pre-training phase {phase}")
    log.info("phase %d: %d steps, final loss %.4f, masked accuracy %.4f", phase, len(res.history),
             res.history[-1]["loss"] if res.history else float("nan"), acc)
    return {"phase": phase, "k": k, "masked_accuracy": acc}


def make_vocab(cfg: RunConfig, items: list[UtteranceFeatures]) -> Vocab:
    if cfg.finetune.unit == "subword":
        return Vocab.from_file(cfg.finetune.vocab_file)
    return Vocab.from_transcripts([it.transcript for it in items])


def _decoder(cfg: RunConfig, vocab_size: int) -> Seq2SeqDecoder:
    dcfg = DecoderConfig(vocab_size, cfg.encoder.dim, cfg.finetune.decoder_heads, cfg.finetune.decoder_layers)
    return Seq2SeqDecoder(dcfg, Init(derive_seed(cfg.run.seed, "decoder")))


def step_finetune(cfg: RunConfig, ws: Workspace, manifest, checkpoint=None) -> dict:
    items = _corpus(cfg, manifest)
    ckpt = Path(checkpoint) if checkpoint else ws.latest_pretrained()
    if ckpt is None:
        raise PipelineError(f"no pre-trained checkpoint under {ws.root / 'checkpoints'}; run pretrain first")
    model = _load_pretrained(cfg, ckpt)
    vocab = make_vocab(cfg, items)
    decoder = _decoder(cfg, len(vocab))
    rng = np.random.default_rng(derive_seed(cfg.run.seed, "finetune"))
    metrics = ws.metrics / "finetune.jsonl"
    res = finetune(model, decoder, items, vocab, cfg.finetune_config(), rng, metrics)
    save_modules(ws.finetuned, {"model": model, "decoder": decoder},
                 {"vocab": vocab.itos[4:], "unit": vocab.unit, "init_from": str(Path(ckpt).name)})
    if res.history:
        plotting.plot_training(res.history, metrics.with_suffix(".png"), "fine-tuning")
    return {"steps": len(res.history), "final_loss": res.history[-1]["loss"] if res.history else None}


def load_finetuned(cfg: RunConfig, ws: Workspace, checkpoint=None) -> tuple[AVModel, Seq2SeqDecoder, Vocab]:
    ckpt = Path(checkpoint) if checkpoint else ws.finetuned
    if not (ckpt / "manifest.json").is_file():
        raise PipelineError(f"fine-tuned checkpoint not found: {ckpt}")
    _, extra = load_checkpoint(ckpt)
    vocab = Vocab(extra["vocab"], extra.get("unit", "char"))
    model = build_model(cfg)
    decoder = _decoder(cfg, len(vocab))
    load_modules(ckpt, {"model": model, "decoder": decoder})
    return model, decoder, vocab


def step_decode(cfg: RunConfig, ws: Workspace, manifest, checkpoint=None) -> dict:
    items = _corpus(cfg, manifest)
    model, decoder, vocab = load_finetuned(cfg, ws, checkpoint)
    hyps = decode_items(model, decoder, items, vocab, cfg.finetune.max_len)
    out = ws.root / "decode"
    out.mkdir(parents=True, exist_ok=True)
    lines = ["utt_id\treference\thypothesis"] + [f"{it.utt_id}\t{it.transcript}\t{hyps[it.utt_id]}" for it in items]
    (out / "hyps.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    unit = "char" if vocab.unit == "char" else "word"
    sc = score_corpus([(it.transcript, hyps[it.utt_id]) for it in items], unit)
    return {"unit": unit, "rate": sc.rate, "S": sc.S, "D": sc.D, "I": sc.I, "N_ref": sc.N}


def step_evaluate(cfg: RunConfig, ws: Workspace, manifest, checkpoint=None) -> EvalReport:
    utts = read_manifest(manifest)
    model, decoder, vocab = load_finetuned(cfg, ws, checkpoint)
    specs = parse_noise_specs(cfg.eval.noise, cfg.eval.seed)
    report = run_eval(model, decoder, vocab, utts, cfg.audio_config(), cfg.audio.stack, cfg.eval_modes(),
                      specs, cfg.finetune.max_len)
    out = ws.root / "eval"
    report.write(out)
    plotting.plot_report(report.rows, out / "report.png")
    return report


def run_pipeline(cfg: RunConfig, ws: Workspace, manifest=None) -> EvalReport:
    """synth (unless a manifest is given) -> every phase's cluster + pretrain -> finetune -> decode -> evaluate."""
    manifest = Path(manifest) if manifest else step_synth(cfg, ws)
    if not Path(manifest).is_file():
        raise DataError(f"manifest not found: {manifest}")
    schedule = cfg.schedule()
    inertias = []
    for phase in range(1, len(schedule) + 1):
        step_cluster(cfg, ws, manifest, phase)
        inertias.append(json.loads((ws.labels(phase) / "labels.json").read_text())["inertia"])
        step_pretrain(cfg, ws, manifest, phase)
    plotting.plot_phase_summary(schedule.cluster_counts, inertias, ws.root / "labels" / "phases.png")
    step_finetune(cfg, ws, manifest)
    step_decode(cfg, ws, manifest)
    return step_evaluate(cfg, ws, manifest)
