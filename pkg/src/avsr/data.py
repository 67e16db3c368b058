"""Corpus manifests and per-utterance feature bundles.

A manifest is a UTF-8 TSV with one utterance per line::

    utt_id <TAB> audio_path <TAB> video_path <TAB> transcript

Relative paths resolve against the manifest's directory. Video files are
AVHT tensors ``[T, 1, S, S]`` at 25 fps with values in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import (AudioFeatureConfig, fbank, mfcc39, normalize_utterance, read_wav,
                    stack_to_video_rate)
from .errors import AlignmentError, DataError
from .numerics.io import load_tensor

VIDEO_RATE_HZ = 25.0
# audio and video lengths of one recording may differ by rounding at the tail
ALIGN_SLACK = 2


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    audio_path: Path
    video_path: Path
    transcript: str


@dataclass
class UtteranceFeatures:
    """Frame-aligned inputs of one utterance at the video rate."""

    utt_id: str
    audio: np.ndarray      # [T, stack * n_mels], normalized log-mel
    mfcc: np.ndarray       # [T, stack * 39]
    video: np.ndarray      # [T, S, S]
    transcript: str

    @property
    def num_frames(self) -> int:
        return self.audio.shape[0]


def read_manifest(path) -> list[Utterance]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"manifest not found: {path}")
    base = path.parent
    utts, seen = [], set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 tab-separated columns, got {len(cols)}")
        uid, audio, video, text = cols
        if uid in seen:
            raise DataError(f"{path}:{lineno}: duplicate utterance id {uid!r}")
        seen.add(uid)
        utts.append(Utterance(uid, base / audio, base / video, text))
    if not utts:
        raise DataError(f"manifest {path} lists no utterances")
    return utts


def write_manifest(path, utts: list[Utterance]) -> None:
    path = Path(path)
    base = path.parent
    lines = []
    for u in utts:
        audio = Path(u.audio_path)
        video = Path(u.video_path)
        audio = audio.relative_to(base) if audio.is_absolute() and audio.is_relative_to(base) else audio
        video = video.relative_to(base) if video.is_absolute() and video.is_relative_to(base) else video
        lines.append(f"{u.utt_id}\t{audio.as_posix()}\t{video.as_posix()}\t{u.transcript}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def align_lengths(audio_t: int, video_t: int, uid: str = "") -> int:
    if abs(audio_t - video_t) > ALIGN_SLACK:
        raise AlignmentError(f"{uid}: audio has T={audio_t} frames but video has T={video_t}")
    return min(audio_t, video_t)


def featurize(samples: np.ndarray, video: np.ndarray, cfg: AudioFeatureConfig, stack: int = 4,
              uid: str = "", transcript: str = "") -> UtteranceFeatures:
    """Stacked, normalized log-mel and stacked MFCC-39, both cut to the video length."""
    video = np.asarray(video, dtype=np.float64)
    if video.ndim == 4:
        video = video[:, 0]
    fb = fbank(samples, cfg)
    fb = type(fb)(normalize_utterance(fb.frames), fb.frame_rate_hz, fb.kind)
    audio = stack_to_video_rate(fb, stack).frames
    mf = stack_to_video_rate(mfcc39(samples, cfg), stack).frames
    t = align_lengths(audio.shape[0], video.shape[0], uid)
    return UtteranceFeatures(uid, audio[:t], mf[:t], video[:t], transcript)


def load_utterance(utt: Utterance, cfg: AudioFeatureConfig, stack: int = 4) -> UtteranceFeatures:
    samples = read_wav(utt.audio_path)
    if not Path(utt.video_path).is_file():
        raise DataError(f"video file not found: {utt.video_path}")
    video = load_tensor(utt.video_path)
    return featurize(samples, video, cfg, stack, utt.utt_id, utt.transcript)


def load_corpus(manifest, cfg: AudioFeatureConfig, stack: int = 4) -> list[UtteranceFeatures]:
    return [load_utterance(u, cfg, stack) for u in read_manifest(manifest)]


def length_buckets(items: list[UtteranceFeatures]) -> dict[int, list[int]]:
    """Indices grouped by frame count; batches are drawn within one bucket so no padding is needed."""
    buckets: dict[int, list[int]] = {}
    for i, it in enumerate(items):
        buckets.setdefault(it.num_frames, []).append(i)
    return dict(sorted(buckets.items()))
