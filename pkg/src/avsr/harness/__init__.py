"""Evaluation harness: synthetic corpus and noise, scoring, run configuration, pipeline and CLI."""

from .config import RunConfig
from .evaluate import EvalReport, EvalRow, run_eval
from .noise import CATEGORIES, NoiseMixSpec, measured_snr, mix_at_snr, parse_noise_specs, synth_noise
from .scoring import CorpusScore, EditCounts, edit_distance, score_corpus, tokenize
from .synth import CorpusSpec, make_corpus

__all__ = [
    "CATEGORIES", "CorpusScore", "CorpusSpec", "EditCounts", "EvalReport", "EvalRow", "NoiseMixSpec",
    "RunConfig", "edit_distance", "make_corpus", "measured_snr", "mix_at_snr", "parse_noise_specs",
    "run_eval", "score_corpus", "synth_noise", "tokenize",
]
