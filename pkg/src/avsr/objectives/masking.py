"""Span masking and the masked-prediction loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError, ShapeError
from ..numerics import Tensor
from ..numerics import tensor as F


@dataclass(frozen=True)
class MaskSpec:
    mask_prob: float = 0.08
    span_len: int = 10

    def __post_init__(self):
        if not 0.0 <= self.mask_prob <= 1.0:
            raise ConfigError(f"mask_prob must lie in [0, 1], got {self.mask_prob}")
        if self.span_len < 1:
            raise ConfigError(f"span_len must be >= 1, got {self.span_len}")


def span_mask(t: int, spec: MaskSpec, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask ``[t]``: about ``mask_prob * t`` distinct starts, each opening a span.

    The start count is ``floor(mask_prob * t + u)`` with ``u ~ U[0, 1)``, so
    its expectation is exactly ``mask_prob * t``. Spans are clipped at ``t``.
    """
    if spec.span_len > t:
        raise InputError(f"span_len {spec.span_len} exceeds sequence length {t}")
    n = min(t, int(np.floor(spec.mask_prob * t + rng.random())))
    mask = np.zeros(t, dtype=bool)
    if n == 0:
        return mask
    for s in rng.choice(t, size=n, replace=False):
        mask[s:s + spec.span_len] = True
    return mask


@dataclass
class MaskedLoss:
    loss: Tensor
    num_masked: int
    num_correct: int
    empty: bool   # no masked frame; loss is defined as zero

    @property
    def accuracy(self) -> float:
        return self.num_correct / self.num_masked if self.num_masked else float("nan")


def masked_prediction_loss(logits, labels: np.ndarray, mask: np.ndarray) -> MaskedLoss:
    """Mean cross-entropy over masked frames of ``logits[..., T, k]``.

    Masked rows are selected before the softmax, so values at unmasked frames
    cannot influence the result in any way.
    """
    logits = F.as_tensor(logits)
    labels = np.asarray(labels)
    mask = np.asarray(mask, dtype=bool)
    if logits.shape[:-1] != labels.shape or labels.shape != mask.shape:
        raise ShapeError(f"logits {logits.shape}, labels {labels.shape} and mask {mask.shape} disagree")
    k = logits.shape[-1]
    flat_idx = np.flatnonzero(mask.reshape(-1))
    if flat_idx.size == 0:
        return MaskedLoss(Tensor(np.zeros(())), 0, 0, True)
    target = labels.reshape(-1)[flat_idx].astype(np.int64)
    if target.min() < 0 or target.max() >= k:
        raise ShapeError(f"labels outside [0, {k})")
    rows = logits.reshape(-1, k)[flat_idx]
    logp = F.log_softmax(rows, axis=-1)
    picked = logp[np.arange(flat_idx.size), target]
    correct = int((rows.data.argmax(axis=-1) == target).sum())
    return MaskedLoss(-picked.mean(), int(flat_idx.size), correct, False)
