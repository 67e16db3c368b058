"""Audio frontend: framing, log-mel filterbanks, MFCC-39 and frame stacking."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.fft import dct, rfft

from .errors import ConfigError, DataError, InputError

LOG_FLOOR = 1e-10
FEATURE_KINDS = ("fbank", "mfcc39", "visual", "fused", "encoded")


@dataclass(frozen=True)
class AudioFeatureConfig:
    sample_rate_hz: int = 16000
    window_ms: float = 25.0
    hop_ms: float = 10.0
    n_mels: int = 26
    fft_size: int | None = None
    mfcc_coeffs: int = 13
    mfcc_mels: int = 26

    def __post_init__(self):
        if self.window_ms < self.hop_ms:
            raise ConfigError(f"window {self.window_ms} ms shorter than hop {self.hop_ms} ms")
        if self.n_mels < 1 or self.mfcc_mels < 1:
            raise ConfigError("mel filter count must be >= 1")
        if self.hop_samples < 1:
            raise ConfigError(f"hop of {self.hop_ms} ms is below one sample")
        n = self.n_fft
        if n & (n - 1) or n < self.window_samples:
            raise ConfigError(f"fft_size {n} must be a power of two >= {self.window_samples}")

    @property
    def window_samples(self) -> int:
        return int(round(self.sample_rate_hz * self.window_ms / 1000.0))

    @property
    def hop_samples(self) -> int:
        return int(round(self.sample_rate_hz * self.hop_ms / 1000.0))

    @property
    def n_fft(self) -> int:
        if self.fft_size is not None:
            return int(self.fft_size)
        return 1 << max(0, int(self.window_samples - 1).bit_length())

    @property
    def frame_rate_hz(self) -> float:
        return self.sample_rate_hz / self.hop_samples


@dataclass
class FeatureSequence:
    """Time-major feature matrix ``[T, D]`` with its frame rate."""

    frames: np.ndarray
    frame_rate_hz: float
    kind: str

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ConfigError(f"unknown feature kind {self.kind!r}")
        if self.frames.ndim != 2 or self.frames.shape[0] < 1:
            raise InputError(f"feature sequence must be [T>=1, D], got {self.frames.shape}")
        if self.frame_rate_hz <= 0:
            raise ConfigError("frame rate must be positive")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def num_frames(n_samples: int, window: int, hop: int) -> int:
    return 1 + (n_samples - window) // hop


def frame_signal(samples: np.ndarray, cfg: AudioFeatureConfig) -> np.ndarray:
    """Cut ``samples`` into Hamming-windowed frames ``[T, W]`` without padding."""
    samples = np.asarray(samples, dtype=np.float64)
    w, h = cfg.window_samples, cfg.hop_samples
    if samples.ndim != 1 or len(samples) < w:
        raise InputError(f"signal of {len(samples)} samples is shorter than one window "
                         f"({w} samples required)")
    t = num_frames(len(samples), w, h)
    idx = np.arange(w)[None, :] + h * np.arange(t)[:, None]
    return samples[idx] * np.hamming(w)[None, :]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_center_frequencies(n_mels: int, sample_rate_hz: int) -> np.ndarray:
    """Edge and center frequencies: ``n_mels + 2`` points equally spaced in HTK mel."""
    return mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate_hz / 2.0), n_mels + 2))


def mel_filterbank(n_mels: int, n_fft: int, sample_rate_hz: int) -> np.ndarray:
    """Triangular filters ``[n_mels, n_fft // 2 + 1]`` with unit peak, 0 Hz to Nyquist."""
    pts = mel_center_frequencies(n_mels, sample_rate_hz)
    freqs = np.arange(n_fft // 2 + 1) * sample_rate_hz / n_fft
    lo, mid, hi = pts[:-2, None], pts[1:-1, None], pts[2:, None]
    rising = (freqs[None, :] - lo) / (mid - lo)
    falling = (hi - freqs[None, :]) / (hi - mid)
    return np.maximum(0.0, np.minimum(rising, falling))


def power_spectrum(frames: np.ndarray, n_fft: int) -> np.ndarray:
    spec = rfft(frames, n=n_fft, axis=-1)
    return (spec.real ** 2 + spec.imag ** 2) / n_fft


def _log_mel(frames: np.ndarray, n_mels: int, cfg: AudioFeatureConfig) -> np.ndarray:
    fb = mel_filterbank(n_mels, cfg.n_fft, cfg.sample_rate_hz)
    energies = power_spectrum(frames, cfg.n_fft) @ fb.T
    return np.log(np.maximum(energies, LOG_FLOOR))


def log_mel_fbank(frames: np.ndarray, cfg: AudioFeatureConfig) -> FeatureSequence:
    if frames.ndim != 2 or frames.shape[1] != cfg.window_samples:
        raise InputError(f"frames {frames.shape} do not match window of {cfg.window_samples} samples")
    return FeatureSequence(_log_mel(frames, cfg.n_mels, cfg), cfg.frame_rate_hz, "fbank")


def fbank(samples: np.ndarray, cfg: AudioFeatureConfig) -> FeatureSequence:
    return log_mel_fbank(frame_signal(samples, cfg), cfg)


def deltas(feats: np.ndarray, width: int = 2) -> np.ndarray:
    """Regression deltas over +-``width`` frames with edge replication."""
    t = feats.shape[0]
    padded = np.concatenate([np.repeat(feats[:1], width, 0), feats,
                             np.repeat(feats[-1:], width, 0)])
    num = np.zeros_like(feats)
    for n in range(1, width + 1):
        num += n * (padded[width + n:width + n + t] - padded[width - n:width - n + t])
    return num / (2.0 * sum(n * n for n in range(1, width + 1)))


def mfcc39(samples: np.ndarray, cfg: AudioFeatureConfig) -> FeatureSequence:
    """13 DCT-II cepstra of a 26-band log-mel plus deltas and delta-deltas."""
    frames = frame_signal(samples, cfg)
    if frames.shape[0] < 5:
        raise InputError(f"mfcc39 needs at least 5 frames for the delta window, got {frames.shape[0]}")
    ceps = dct(_log_mel(frames, cfg.mfcc_mels, cfg), type=2, norm="ortho", axis=-1)
    ceps = ceps[:, :cfg.mfcc_coeffs]
    d1 = deltas(ceps)
    d2 = deltas(d1)
    return FeatureSequence(np.concatenate([ceps, d1, d2], axis=1), cfg.frame_rate_hz, "mfcc39")


def stack_to_video_rate(feats: FeatureSequence, factor: int) -> FeatureSequence:
    """Concatenate each run of ``factor`` frames; the trailing remainder is dropped."""
    if factor <= 0:
        raise ConfigError(f"stacking factor must be >= 1, got {factor}")
    t = feats.num_frames // factor
    if t < 1:
        raise InputError(f"{feats.num_frames} frames cannot be stacked by {factor}")
    stacked = feats.frames[:t * factor].reshape(t, factor * feats.dim)
    return FeatureSequence(stacked, feats.frame_rate_hz / factor, feats.kind)


def normalize_utterance(frames: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Per-utterance mean/variance normalization of each feature dimension."""
    mu = frames.mean(axis=0, keepdims=True)
    sd = frames.std(axis=0, keepdims=True)
    return (frames - mu) / np.maximum(sd, eps)


def read_wav(path) -> np.ndarray:
    """Read a mono 16-bit 16 kHz PCM WAV as float samples in [-1, 1)."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"audio file not found: {path}")
    try:
        with wave.open(str(path), "rb") as wf:
            ch, width, rate = wf.getnchannels(), wf.getsampwidth(), wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        raise DataError(f"{path}: {exc}") from exc
    if (ch, width, rate) != (1, 2, 16000):
        raise DataError(f"{path}: need single-channel 16-bit 16 kHz PCM, got "
                        f"{ch} ch / {8 * width}-bit / {rate} Hz")
    return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0


def write_wav(path, samples: np.ndarray, sample_rate_hz: int = 16000) -> None:
    pcm = np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate_hz)
        wf.writeframes(pcm.tobytes())
