"""Seeded stand-ins for babble, music and natural noise, and SNR mixing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from ..errors import ConfigError, InputError

CATEGORIES = ("babble", "music", "natural")
SAMPLE_RATE = 16000
TARGET_RMS = 0.1


@dataclass(frozen=True)
class NoiseMixSpec:
    category: str
    snr_db: float
    seed: int = 0

    def __post_init__(self):
        if self.category not in CATEGORIES + ("all",):
            raise ConfigError(f"noise category must be one of {CATEGORIES + ('all',)}, got {self.category!r}")
        if not math.isfinite(self.snr_db):
            raise ConfigError(f"snr must be finite, got {self.snr_db}")

    @property
    def label(self) -> str:
        return f"{self.category}@{self.snr_db:g}dB"


def parse_noise_specs(text: str, seed: int = 0) -> list[NoiseMixSpec]:
    """``"babble:5,all:0"`` -> specs; an empty string means clean only."""
    specs = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        cat, _, snr = item.partition(":")
        try:
            specs.append(NoiseMixSpec(cat, float(snr), seed))
        except ValueError as exc:
            raise ConfigError(f"bad noise spec {item!r}: {exc}") from None
    return specs


def _finish(x: np.ndarray) -> np.ndarray:
    x = x - x.mean()
    rms = np.sqrt(np.mean(x * x))
    return x * (TARGET_RMS / rms) if rms > 0 else x


def _babble(n: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    out = np.zeros(n)
    for _ in range(6):
        f0 = rng.uniform(100.0, 250.0)
        vib = 1.0 + 0.03 * np.sin(2 * np.pi * rng.uniform(4, 7) * t + rng.uniform(0, 2 * np.pi))
        phase = 2 * np.pi * np.cumsum(f0 * vib) / SAMPLE_RATE
        voice = np.zeros(n)
        for h in range(1, int(3800.0 // (f0 * 1.04)) + 1):
            voice += np.sin(h * phase + rng.uniform(0, 2 * np.pi)) / h
        syllable = 0.5 * (1.0 + np.sin(2 * np.pi * rng.uniform(3.0, 6.0) * t + rng.uniform(0, 2 * np.pi)))
        out += voice * syllable
    sos = signal.butter(4, [100.0, 4000.0], btype="bandpass", fs=SAMPLE_RATE, output="sos")
    return signal.sosfilt(sos, out)


def _music(n: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    beat = 60.0 / rng.uniform(90.0, 140.0)
    out = np.zeros(n)
    n_beats = int(np.ceil(t[-1] / beat)) + 1 if n else 0
    for b in range(n_beats):
        start = int(b * beat * SAMPLE_RATE)
        stop = min(n, int((b + 1) * beat * SAMPLE_RATE))
        if start >= n:
            break
        tb = t[start:stop] - t[start]
        env = np.exp(-3.0 * tb / beat)
        root = 220.0 * 2 ** (rng.integers(0, 12) / 12.0)
        for ratio in (1.0, 1.25, 1.5):
            for h in range(1, 5):
                out[start:stop] += env * np.sin(2 * np.pi * root * ratio * h * tb) / h ** 1.5
    return out


def _natural(n: int, rng: np.random.Generator) -> np.ndarray:
    white = rng.standard_normal(n)
    spec = np.fft.rfft(white)
    f = np.fft.rfftfreq(n, 1.0 / SAMPLE_RATE)
    f[0] = f[1] if n > 1 else 1.0
    pink = np.fft.irfft(spec / np.sqrt(f), n)
    sos = signal.butter(2, [40.0, 7000.0], btype="bandpass", fs=SAMPLE_RATE, output="sos")
    return signal.sosfilt(sos, pink)


_GENERATORS = {"babble": _babble, "music": _music, "natural": _natural}


def synth_noise(category: str, duration_s: float, seed: int) -> np.ndarray:
    """Zero-mean noise at RMS 0.1; identical (category, seed) give identical samples."""
    if category not in _GENERATORS:
        raise ConfigError(f"noise category must be one of {CATEGORIES}, got {category!r}")
    if duration_s <= 0:
        raise InputError(f"duration must be positive, got {duration_s}")
    n = max(2, int(round(duration_s * SAMPLE_RATE)))
    return _finish(_GENERATORS[category](n, np.random.default_rng(seed)))


def power(x: np.ndarray) -> float:
    return float(np.mean(np.square(x, dtype=np.float64)))


def mix_gain(speech: np.ndarray, noise: np.ndarray, snr_db: float) -> float:
    ps, pn = power(speech), power(noise)
    if ps == 0.0:
        raise InputError("speech is silent; SNR is undefined")
    if pn == 0.0:
        raise InputError("noise is silent; SNR is undefined")
    if snr_db == math.inf:
        return 0.0
    return math.sqrt(ps / (pn * 10.0 ** (snr_db / 10.0)))


def fit_length(noise: np.ndarray, n: int) -> np.ndarray:
    if len(noise) == 0:
        raise InputError("noise is empty")
    reps = -(-n // len(noise))
    return np.tile(noise, reps)[:n]


def mix_at_snr(speech: np.ndarray, noise: np.ndarray, snr_db: float) -> np.ndarray:
    """``speech + g * noise`` with ``g`` chosen so the mixture has the requested SNR."""
    speech = np.asarray(speech, dtype=np.float64)
    noise = fit_length(np.asarray(noise, dtype=np.float64), len(speech))
    return speech + mix_gain(speech, noise, snr_db) * noise


def measured_snr(speech: np.ndarray, mixture: np.ndarray) -> float:
    residual = np.asarray(mixture, dtype=np.float64) - speech
    return 10.0 * math.log10(power(speech) / power(residual))
