"""Per-phase pseudo-label generation and label-file I/O."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..data import UtteranceFeatures
from ..errors import DataError, PipelineError
from ..model import AVModel
from ..numerics import no_grad
from ..numerics.io import load_tensor, save_tensor
from .clustering import MFCC, PhaseSchedule, PseudoLabelSet, cluster_utterances


def default_layer(model: AVModel) -> int:
    """Index into the encoder's layer list (0 = stack input) of the middle block."""
    return model.config.encoder.num_blocks // 2


def encoder_features(model: AVModel, items: list[UtteranceFeatures], layer: int | None = None
                     ) -> dict[str, np.ndarray]:
    layer = default_layer(model) if layer is None else layer
    n = model.config.encoder.num_blocks
    if not 0 <= layer <= n:
        raise PipelineError(f"encoder layer {layer} outside [0, {n}]")
    out = {}
    with no_grad():
        for it in items:
            layers = model.encode(it.audio[None], it.video[None], return_layers=True)
            out[it.utt_id] = layers[layer].data[0]
    return out


def run_phase_labeling(items: list[UtteranceFeatures], schedule: PhaseSchedule, phase: int,
                       model: AVModel | None = None, seed=0, max_iters: int = 30,
                       n_init: int = 1) -> PseudoLabelSet:
    """Cluster the features named by ``schedule`` for 1-based ``phase``.

    Phase 1 clusters stacked MFCC-39; later phases need the model trained in
    the previous phase.
    """
    if not 1 <= phase <= len(schedule):
        raise PipelineError(f"phase {phase} outside schedule of {len(schedule)} phases")
    k, src = schedule.phases[phase - 1]
    if src.kind == MFCC:
        feats = {it.utt_id: it.mfcc for it in items}
    else:
        if model is None:
            raise PipelineError(f"phase {phase} clusters encoder features and needs the phase "
                                f"{phase - 1} checkpoint")
        feats = encoder_features(model, items, src.layer)
    total = sum(f.shape[0] for f in feats.values())
    if total < k:
        raise PipelineError(f"phase {phase}: {total} frames cannot form {k} clusters")
    return cluster_utterances(feats, k, max_iters, seed, n_init)


def write_labels(directory, labelset: PseudoLabelSet, info: dict | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for uid, lab in labelset.labels.items():
        save_tensor(directory / f"{uid}.avht", lab.astype(np.int32))
    save_tensor(directory / "centroids.avht", labelset.centroids)
    summary = {"k": labelset.k, "inertia": labelset.inertia, "utterances": sorted(labelset.labels)}
    summary.update(info or {})
    (directory / "labels.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n",
                                           encoding="utf-8")
    return directory


def read_labels(directory, utt_ids) -> tuple[dict[str, np.ndarray], int]:
    directory = Path(directory)
    meta_path = directory / "labels.json"
    if not meta_path.is_file():
        raise DataError(f"label summary not found: {meta_path}")
    k = int(json.loads(meta_path.read_text(encoding="utf-8"))["k"])
    labels = {}
    for uid in utt_ids:
        labels[uid] = load_tensor(directory / f"{uid}.avht").astype(np.int64)
    return labels, k
