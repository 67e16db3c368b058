"""Noise-robustness evaluation: decode clean and noisy copies of a corpus in A and AV modes."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..audio import AudioFeatureConfig, read_wav
from ..data import Utterance, featurize
from ..errors import DataError
from ..model import AVModel
from ..numerics import no_grad
from ..numerics.io import load_tensor
from ..objectives import Seq2SeqDecoder, Vocab, greedy_decode
from .noise import CATEGORIES, NoiseMixSpec, mix_at_snr, synth_noise
from .scoring import score_corpus

TSV_COLUMNS = ("mode", "noise", "snr_db", "unit", "rate", "S", "D", "I", "N_ref")


@dataclass(frozen=True)
class EvalRow:
    mode: str
    noise: str
    snr_db: float | None
    unit: str
    rate: float
    S: int
    D: int
    I: int
    N_ref: int

    @property
    def condition(self) -> str:
        return "clean" if self.snr_db is None else f"{self.noise}@{self.snr_db:g}dB"


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)
    hypotheses: dict[str, dict[str, str]] = field(default_factory=dict)  # condition/mode -> utt -> text

    def to_tsv(self) -> str:
        lines = ["\t".join(TSV_COLUMNS)]
        for r in self.rows:
            snr = "inf" if r.snr_db is None else f"{r.snr_db:g}"
            lines.append("\t".join([r.mode, r.noise, snr, r.unit, f"{r.rate:.6f}", str(r.S), str(r.D),
                                    str(r.I), str(r.N_ref)]))
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(r)) + "\n" for r in self.rows)

    def write(self, directory, stem: str = "report") -> dict[str, Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = {"tsv": directory / f"{stem}.tsv", "jsonl": directory / f"{stem}.jsonl",
                 "hyp": directory / f"{stem}.hyp.tsv"}
        paths["tsv"].write_text(self.to_tsv(), encoding="utf-8")
        paths["jsonl"].write_text(self.to_jsonl(), encoding="utf-8")
        hyp_lines = ["condition\tmode\tutt_id\thypothesis"]
        for key, hyps in self.hypotheses.items():
            cond, mode = key.rsplit("/", 1)
            hyp_lines += [f"{cond}\t{mode}\t{u}\t{h}" for u, h in hyps.items()]
        paths["hyp"].write_text("\n".join(hyp_lines) + "\n", encoding="utf-8")
        return paths

    def rate(self, mode: str, condition: str) -> float:
        for r in self.rows:
            if r.mode == mode and r.condition == condition:
                return r.rate
        raise KeyError((mode, condition))


def noisy_copy(samples: np.ndarray, spec: NoiseMixSpec, utt_index: int, spec_index: int) -> np.ndarray:
    """Mix one utterance; ``all`` draws its category per utterance from the seeded stream."""
    rng = np.random.default_rng([spec.seed, spec_index, utt_index])
    category = spec.category
    if category == "all":
        category = CATEGORIES[int(rng.integers(len(CATEGORIES)))]
    noise_seed = int(rng.integers(2 ** 31))
    noise = synth_noise(category, len(samples) / 16000.0, noise_seed)
    return mix_at_snr(samples, noise, spec.snr_db)


def run_eval(model: AVModel, decoder: Seq2SeqDecoder, vocab: Vocab, utts: list[Utterance],
             audio_cfg: AudioFeatureConfig, stack: int = 4, modes=("A", "AV"),
             noise_specs: list[NoiseMixSpec] = (), max_len: int = 64, unit: str | None = None) -> EvalReport:
    """Clean rows first, then one row per noise spec, each for every mode.

    Mode A zeroes the visual stream; both modes see the same noisy audio.
    """
    unit = unit or ("char" if vocab.unit == "char" else "word")
    raw = []
    for u in utts:
        if not Path(u.video_path).is_file():
            raise DataError(f"video file not found: {u.video_path}")
        raw.append((read_wav(u.audio_path), load_tensor(u.video_path)))
    conditions: list[tuple[str, float | None, list[np.ndarray]]] = [("clean", None, [a for a, _ in raw])]
    for si, spec in enumerate(noise_specs):
        conditions.append((spec.category, spec.snr_db,
                           [noisy_copy(a, spec, ui, si) for ui, (a, _) in enumerate(raw)]))
    report = EvalReport()
    for noise, snr, audios in conditions:
        feats = [featurize(a, v, audio_cfg, stack, u.utt_id, u.transcript)
                 for u, a, (_, v) in zip(utts, audios, raw)]
        for mode in modes:
            hyps = {}
            with no_grad():
                for f in feats:
                    memory = model.encode(f.audio[None], f.video[None], use_visual=(mode == "AV"))
                    hyps[f.utt_id] = vocab.decode(greedy_decode(memory, decoder, max_len))
            sc = score_corpus([(u.transcript, hyps[u.utt_id]) for u in utts], unit)
            row = EvalRow(mode, noise, snr, unit, sc.rate, sc.S, sc.D, sc.I, sc.N)
            report.rows.append(row)
            report.hypotheses[f"{row.condition}/{mode}"] = hyps
    return report


def read_report_tsv(path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split("\t")
    out = []
    for ln in lines[1:]:
        rec = dict(zip(header, ln.split("\t")))
        rec["rate"] = float(rec["rate"])
        rec["snr_db"] = math.inf if rec["snr_db"] == "inf" else float(rec["snr_db"])
        out.append(rec)
    return out
