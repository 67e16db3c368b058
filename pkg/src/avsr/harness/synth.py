"""Procedural audio-visual corpus.

Every character has a fixed articulation: a two-tone chord in the audio and
an ellipse of fixed width/height (the "mouth") in the video. A character
lasts three video frames (120 ms); the space is silence with a nearly
closed mouth. Utterances have a fixed duration and are padded with
silence, and the mouth centre drifts slowly so no two utterances share
pixels exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..audio import write_wav
from ..data import VIDEO_RATE_HZ, Utterance, write_manifest
from ..errors import ConfigError
from ..numerics.io import save_tensor

SAMPLE_RATE = 16000
ALPHABET = "abcdefghijkl"
FRAMES_PER_CHAR = 3
SAMPLES_PER_FRAME = SAMPLE_RATE // int(VIDEO_RATE_HZ)


@dataclass(frozen=True)
class CorpusSpec:
    num_utts: int = 20
    duration_s: float = 1.2
    frame_size: int = 16
    seed: int = 0
    min_word: int = 2
    max_word: int = 4

    def __post_init__(self):
        if self.num_utts < 1:
            raise ConfigError("num_utts must be >= 1")
        if self.max_chars < 2:
            raise ConfigError(f"duration {self.duration_s}s leaves no room for a word")
        if not 1 <= self.min_word <= self.max_word:
            raise ConfigError("need 1 <= min_word <= max_word")

    @property
    def num_video_frames(self) -> int:
        return int(round(self.duration_s * VIDEO_RATE_HZ))

    @property
    def max_chars(self) -> int:
        # one leading and one trailing silent slot
        return self.num_video_frames // FRAMES_PER_CHAR - 2


def articulation(ch: str) -> tuple[float, float, float, float]:
    """(f1 Hz, f2 Hz, mouth width, mouth height) as fractions of the frame."""
    if ch == " ":
        return 0.0, 0.0, 0.3, 0.05
    i = ALPHABET.index(ch)
    n = len(ALPHABET)
    f1 = 300.0 + 60.0 * i
    f2 = 1100.0 + 190.0 * ((5 * i) % n)
    width = 0.3 + 0.45 * ((7 * i) % n) / (n - 1)
    height = 0.12 + 0.55 * i / (n - 1)
    return f1, f2, width, height


def random_transcript(spec: CorpusSpec, rng: np.random.Generator) -> str:
    words: list[str] = []
    used = 0
    while True:
        length = int(rng.integers(spec.min_word, spec.max_word + 1))
        need = length + (1 if words else 0)
        if used + need > spec.max_chars:
            break
        words.append("".join(rng.choice(list(ALPHABET), size=length)))
        used += need
    if not words:
        words.append("".join(rng.choice(list(ALPHABET), size=min(spec.max_chars, spec.min_word))))
    return " ".join(words)


def render(text: str, spec: CorpusSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Audio samples ``[N]`` and video ``[T, 1, S, S]`` for ``text``."""
    t_video = spec.num_video_frames
    slots = [" "] + list(text)
    slots += [" "] * (t_video // FRAMES_PER_CHAR + 1 - len(slots))
    n = int(round(spec.duration_s * SAMPLE_RATE))
    audio = np.zeros(n)
    seg = FRAMES_PER_CHAR * SAMPLES_PER_FRAME
    tt = np.arange(seg) / SAMPLE_RATE
    for k, ch in enumerate(slots):
        start = k * seg
        if start >= n:
            break
        f1, f2, _, _ = articulation(ch)
        if f1 > 0:
            wave = 0.3 * np.sin(2 * np.pi * f1 * tt) + 0.2 * np.sin(2 * np.pi * f2 * tt)
            audio[start:start + seg] = wave[:n - start]
    s = spec.frame_size
    yy, xx = np.mgrid[0:s, 0:s].astype(np.float64) + 0.5
    phase = rng.uniform(0, 2 * np.pi, size=2)
    video = np.zeros((t_video, 1, s, s))
    for t in range(t_video):
        _, _, w, h = articulation(slots[t // FRAMES_PER_CHAR])
        cx = s / 2 + 0.08 * s * np.sin(2 * np.pi * 0.4 * t / VIDEO_RATE_HZ + phase[0])
        cy = s / 2 + 0.05 * s * np.sin(2 * np.pi * 0.3 * t / VIDEO_RATE_HZ + phase[1])
        r = np.sqrt(((xx - cx) / (0.5 * w * s)) ** 2 + ((yy - cy) / (0.5 * h * s)) ** 2)
        video[t, 0] = 1.0 / (1.0 + np.exp((r - 1.0) / 0.08))
    return audio, video


def make_corpus(out_dir, spec: CorpusSpec, prefix: str = "utt") -> Path:
    """Write WAV and AVHT files plus ``manifest.tsv``; returns the manifest path."""
    out_dir = Path(out_dir)
    (out_dir / "audio").mkdir(parents=True, exist_ok=True)
    (out_dir / "video").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    utts = []
    for i in range(spec.num_utts):
        uid = f"{prefix}{i:04d}"
        text = random_transcript(spec, rng)
        audio, video = render(text, spec, rng)
        write_wav(out_dir / "audio" / f"{uid}.wav", audio, SAMPLE_RATE)
        save_tensor(out_dir / "video" / f"{uid}.avht", video.astype(np.float32))
        utts.append(Utterance(uid, Path("audio") / f"{uid}.wav", Path("video") / f"{uid}.avht", text))
    manifest = out_dir / "manifest.tsv"
    write_manifest(manifest, utts)
    return manifest
