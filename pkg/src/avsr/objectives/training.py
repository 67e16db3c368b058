"""Pre-training and fine-tuning loops.

Both loops draw batches from length buckets, accumulate gradients over
``update_freq`` micro-batches, step Adam with the warmup/inverse-sqrt
schedule and append one JSON line per optimizer step to a metrics log.
Optimizer steps are numbered from 1, so the first update already uses a
nonzero learning rate.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..data import UtteranceFeatures, length_buckets
from ..errors import ConfigError, TrainingError
from ..model import AVModel
from ..numerics import Init, Linear, Module, Tensor, no_grad
from ..numerics.io import load_checkpoint, save_checkpoint
from .decoder import Seq2SeqDecoder, Vocab, greedy_decode, seq2seq_step
from .masking import MaskSpec, masked_prediction_loss, span_mask
from .optim import Adam, LRSchedule

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 200
    batch_size: int = 2
    update_freq: int = 1
    peak_lr: float = 1e-3
    warmup_steps: int = 100
    freeze_fraction: float = 0.8
    modality_drop: bool = True

    def __post_init__(self):
        if self.steps < 0 or self.batch_size < 1 or self.update_freq < 1:
            raise ConfigError("steps must be >= 0, batch_size and update_freq >= 1")
        if not 0.0 <= self.freeze_fraction <= 1.0:
            raise ConfigError(f"freeze_fraction must lie in [0, 1], got {self.freeze_fraction}")

    @property
    def schedule(self) -> LRSchedule:
        return LRSchedule(self.peak_lr, self.warmup_steps)


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)

    @property
    def losses(self) -> list[float]:
        return [h["loss"] for h in self.history]


class MetricsLog:
    def __init__(self, path=None):
        self._fh = None
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(path, "w", encoding="utf-8")

    def write(self, row: dict) -> None:
        if self._fh:
            self._fh.write(json.dumps(row) + "\n")

    def close(self) -> None:
        if self._fh:
            self._fh.close()


def _sample_batch(items: list[UtteranceFeatures], batch_size: int, rng: np.random.Generator) -> list[int]:
    buckets = list(length_buckets(items).values())
    sizes = np.array([len(b) for b in buckets], dtype=np.float64)
    bucket = buckets[int(rng.choice(len(buckets), p=sizes / sizes.sum()))]
    pick = rng.choice(len(bucket), size=min(batch_size, len(bucket)), replace=False)
    return [bucket[i] for i in sorted(pick)]


def _stack(items, idx, attr):
    return np.stack([getattr(items[i], attr) for i in idx])


def _check_finite(value: float, step: int, what: str, lr: float, ids) -> None:
    if not math.isfinite(value):
        raise TrainingError(f"non-finite {what} {value} at step {step} (lr={lr:.3g}); "
                            f"batch utterances {ids}")


def _grad_norm(params: list[Tensor]) -> float:
    return math.sqrt(sum(float((p.grad ** 2).sum()) for p in params if p.grad is not None))


def make_head(model: AVModel, k: int, seed) -> Linear:
    return Linear(model.config.encoder.model_dim, k, Init(seed))


def pretrain(model: AVModel, head: Linear, items: list[UtteranceFeatures], labels: dict[str, np.ndarray],
             mask: MaskSpec, cfg: TrainConfig, rng: np.random.Generator, metrics_path=None,
             phase: int | None = None) -> TrainResult:
    """Masked prediction of ``labels`` from audio-masked, visually intact input."""
    for it in items:
        if labels[it.utt_id].shape[0] != it.num_frames:
            raise TrainingError(f"{it.utt_id}: {labels[it.utt_id].shape[0]} labels for {it.num_frames} frames")
    params = model.parameters() + head.parameters()
    opt = Adam(params)
    sched = cfg.schedule
    out = TrainResult()
    metrics = MetricsLog(metrics_path)
    try:
        for step in range(1, cfg.steps + 1):
            lr = sched(step)
            total, n_masked, n_correct, ids = 0.0, 0, 0, []
            for _ in range(cfg.update_freq):
                idx = _sample_batch(items, cfg.batch_size, rng)
                ids += [items[i].utt_id for i in idx]
                t = items[idx[0]].num_frames
                spec = MaskSpec(mask.mask_prob, min(mask.span_len, t))
                m = np.stack([span_mask(t, spec, rng) for _ in idx])
                lab = np.stack([labels[items[i].utt_id] for i in idx])
                x = model.encode(_stack(items, idx, "audio"), _stack(items, idx, "video"), audio_mask=m,
                                 rng=rng, training=True, modality_drop=cfg.modality_drop)
                res = masked_prediction_loss(head(x), lab, m)
                if res.empty:
                    continue
                _check_finite(res.loss.item(), step, "loss", lr, ids)
                (res.loss * (1.0 / cfg.update_freq)).backward()
                total += res.loss.item() / cfg.update_freq
                n_masked += res.num_masked
                n_correct += res.num_correct
            _check_finite(_grad_norm(params), step, "gradient norm", lr, ids)
            opt.step(lr)
            for p in params:
                p.grad = None
            row = {"step": step, "loss": total, "lr": lr,
                   "masked_acc": n_correct / n_masked if n_masked else None}
            if phase is not None:
                row["phase"] = phase
            out.history.append(row)
            metrics.write(row)
    finally:
        metrics.close()
    return out


def masked_accuracy(model: AVModel, head: Linear, items: list[UtteranceFeatures],
                    labels: dict[str, np.ndarray], mask: MaskSpec, seed=0) -> float:
    """Inference-mode accuracy on freshly drawn masks (one per utterance)."""
    rng = np.random.default_rng(seed)
    correct = total = 0
    with no_grad():
        for it in items:
            spec = MaskSpec(mask.mask_prob, min(mask.span_len, it.num_frames))
            m = span_mask(it.num_frames, spec, rng)
            if not m.any():
                continue
            x = model.encode(it.audio[None], it.video[None], audio_mask=m[None])
            res = masked_prediction_loss(head(x), labels[it.utt_id][None], m[None])
            correct += res.num_correct
            total += res.num_masked
    return correct / total if total else float("nan")


def finetune(model: AVModel, decoder: Seq2SeqDecoder, items: list[UtteranceFeatures], vocab: Vocab,
             cfg: TrainConfig, rng: np.random.Generator, metrics_path=None,
             on_step: Callable[[int, bool], None] | None = None) -> TrainResult:
    """Seq2seq training; the AV model stays frozen for ``freeze_fraction`` of the steps.

    While frozen, the model runs once per utterance in inference mode and its
    outputs are cached, so frozen tensors receive no gradient at all.
    """
    targets = {it.utt_id: vocab.encode(it.transcript) for it in items}
    frozen_params = model.parameters()
    params = frozen_params + decoder.parameters()
    n_frozen = len(frozen_params)
    opt = Adam(params)
    sched = cfg.schedule
    freeze_steps = int(math.floor(cfg.freeze_fraction * cfg.steps))
    cache: dict[str, np.ndarray] = {}
    if freeze_steps:
        with no_grad():
            for it in items:
                cache[it.utt_id] = model.encode(it.audio[None], it.video[None]).data[0]
    out = TrainResult()
    metrics = MetricsLog(metrics_path)
    try:
        for step in range(1, cfg.steps + 1):
            frozen = step <= freeze_steps
            lr = sched(step)
            total, ids = 0.0, []
            for _ in range(cfg.update_freq):
                idx = _sample_batch(items, cfg.batch_size, rng)
                ids += [items[i].utt_id for i in idx]
                if frozen:
                    memory = Tensor(np.stack([cache[items[i].utt_id] for i in idx]))
                else:
                    memory = model.encode(_stack(items, idx, "audio"), _stack(items, idx, "video"),
                                          rng=rng, training=True, modality_drop=cfg.modality_drop)
                loss = seq2seq_step(memory, decoder, [targets[items[i].utt_id] for i in idx],
                                    rng=rng, training=True)
                _check_finite(loss.item(), step, "loss", lr, ids)
                (loss * (1.0 / cfg.update_freq)).backward()
                total += loss.item() / cfg.update_freq
            _check_finite(_grad_norm(params), step, "gradient norm", lr, ids)
            if on_step is not None:
                on_step(step, frozen)
            active = [not frozen] * n_frozen + [True] * (len(params) - n_frozen)
            opt.step(lr, active)
            for p in params:
                p.grad = None
            row = {"step": step, "loss": total, "lr": lr, "masked_acc": None, "frozen": frozen}
            out.history.append(row)
            metrics.write(row)
    finally:
        metrics.close()
    return out


def decode_items(model: AVModel, decoder: Seq2SeqDecoder, items: list[UtteranceFeatures], vocab: Vocab,
                 max_len: int = 64, use_visual: bool = True) -> dict[str, str]:
    hyps = {}
    with no_grad():
        for it in items:
            memory = model.encode(it.audio[None], it.video[None], use_visual=use_visual)
            hyps[it.utt_id] = vocab.decode(greedy_decode(memory, decoder, max_len))
    return hyps


# -- checkpoints -------------------------------------------------------------

def save_modules(directory, modules: dict[str, Module], extra: dict | None = None) -> Path:
    tensors = {}
    for prefix, mod in modules.items():
        for name, arr in mod.state_dict().items():
            tensors[f"{prefix}.{name}"] = np.ascontiguousarray(arr, dtype=np.float64)
    return save_checkpoint(directory, tensors, extra)


def load_modules(directory, modules: dict[str, Module]) -> dict:
    """Fill ``modules`` from a checkpoint; returns the manifest's ``extra`` dict."""
    tensors, extra = load_checkpoint(directory)
    for prefix, mod in modules.items():
        sub = {k[len(prefix) + 1:]: v for k, v in tensors.items() if k.startswith(prefix + ".")}
        mod.load_state_dict(sub)
    return extra
