"""Pseudo-label clustering, masked prediction, and seq2seq fine-tuning."""

from .clustering import (FeatureSource, KMeansResult, PhaseSchedule, PseudoLabelSet, assign_labels,
                         cluster_utterances, kmeans)
from .decoder import (DecoderConfig, Seq2SeqDecoder, Vocab, greedy_decode, seq2seq_step,
                      teacher_forcing_batch)
from .masking import MaskedLoss, MaskSpec, masked_prediction_loss, span_mask
from .optim import Adam, LRSchedule
from .phases import encoder_features, read_labels, run_phase_labeling, write_labels
from .training import (TrainConfig, TrainResult, decode_items, finetune, load_modules, make_head,
                       masked_accuracy, pretrain, save_modules)

__all__ = [
    "Adam", "DecoderConfig", "FeatureSource", "KMeansResult", "LRSchedule", "MaskSpec", "MaskedLoss",
    "PhaseSchedule", "PseudoLabelSet", "Seq2SeqDecoder", "TrainConfig", "TrainResult", "Vocab",
    "assign_labels", "cluster_utterances", "decode_items", "encoder_features", "finetune",
    "greedy_decode", "kmeans", "load_modules", "make_head", "masked_accuracy", "masked_prediction_loss",
    "pretrain", "read_labels", "run_phase_labeling", "save_modules", "seq2seq_step", "span_mask",
    "teacher_forcing_batch", "write_labels",
]
