import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from avsr import audio
from avsr.audio import AudioFeatureConfig, FeatureSequence
from avsr.errors import ConfigError, DataError, InputError

CFG25 = AudioFeatureConfig(window_ms=25.0, n_mels=26)
CFG15 = AudioFeatureConfig(window_ms=15.0, n_mels=80)


def test_frame_count_25ms():
    frames = audio.frame_signal(np.zeros(16000), CFG25)
    assert frames.shape == (98, 400)


def test_frame_count_15ms():
    frames = audio.frame_signal(np.zeros(16000), CFG15)
    assert frames.shape == (99, 240)


def test_single_frame():
    assert audio.frame_signal(np.ones(400), CFG25).shape == (1, 400)


def test_too_short_signal_names_minimum():
    with pytest.raises(InputError, match="400"):
        audio.frame_signal(np.ones(399), CFG25)


def test_hamming_applied():
    frames = audio.frame_signal(np.ones(400), CFG25)
    np.testing.assert_allclose(frames[0], np.hamming(400))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 30), st.integers(0, 4000))
def test_frame_count_formula(window_ms, hop_ms, extra):
    if hop_ms > window_ms:
        hop_ms = window_ms
    cfg = AudioFeatureConfig(window_ms=window_ms, hop_ms=hop_ms)
    w, h = cfg.window_samples, cfg.hop_samples
    n = w + extra
    assert audio.frame_signal(np.zeros(n), cfg).shape == (1 + (n - w) // h, w)


def test_config_validation():
    with pytest.raises(ConfigError):
        AudioFeatureConfig(window_ms=5.0, hop_ms=10.0)
    with pytest.raises(ConfigError):
        AudioFeatureConfig(fft_size=300)
    with pytest.raises(ConfigError):
        AudioFeatureConfig(fft_size=256)  # below 400-sample window
    assert AudioFeatureConfig().n_fft == 512
    assert CFG15.n_fft == 256


@pytest.mark.parametrize("n_mels", [26, 80])
def test_fbank_dims(n_mels):
    cfg = AudioFeatureConfig(n_mels=n_mels)
    sig = np.random.default_rng(0).normal(size=16000)
    feats = audio.fbank(sig, cfg)
    assert feats.frames.shape == (98, n_mels) and feats.kind == "fbank"
    assert feats.frame_rate_hz == 100.0


def test_silence_hits_floor():
    feats = audio.fbank(np.zeros(4000), CFG25)
    assert np.all(feats.frames == np.log(audio.LOG_FLOOR))


def _analytic_peak_filter(freq_hz, n_mels, sr=16000):
    pts = audio.mel_center_frequencies(n_mels, sr)
    lo, mid, hi = pts[:-2], pts[1:-1], pts[2:]
    tri = np.maximum(0.0, np.minimum((freq_hz - lo) / (mid - lo), (hi - freq_hz) / (hi - mid)))
    return int(np.argmax(tri)), mid


@pytest.mark.parametrize("cfg", [CFG25, CFG15, AudioFeatureConfig(n_mels=80)])
def test_1khz_tone_peaks_in_analytic_bin(cfg):
    t = np.arange(16000) / 16000.0
    feats = audio.fbank(np.sin(2 * np.pi * 1000.0 * t), cfg)
    got = int(np.argmax(feats.frames[feats.num_frames // 2]))
    want, centers = _analytic_peak_filter(1000.0, cfg.n_mels)
    assert got == want
    below, above = np.searchsorted(centers, 1000.0) - 1, np.searchsorted(centers, 1000.0)
    assert got in (below, above)


def test_filterbank_shape_properties():
    fb = audio.mel_filterbank(26, 512, 16000)
    assert fb.shape == (26, 257)
    assert np.all(fb >= 0)
    peaks = np.argmax(fb, axis=1)
    assert np.all(np.diff(peaks) > 0)
    # neighbouring triangles overlap
    assert all(np.any((fb[i] > 0) & (fb[i + 1] > 0)) for i in range(25))
    np.testing.assert_allclose(fb @ np.ones(257), fb.sum(axis=1))


def test_fbank_deterministic():
    sig = np.random.default_rng(5).normal(size=8000)
    a = audio.fbank(sig, CFG15).frames
    b = audio.fbank(sig.copy(), CFG15).frames
    assert a.tobytes() == b.tobytes()


def test_mfcc39_dims():
    feats = audio.mfcc39(np.random.default_rng(1).normal(size=16000), CFG25)
    assert feats.frames.shape == (98, 39) and feats.kind == "mfcc39"
    assert np.all(np.isfinite(feats.frames))


def test_mfcc39_stationary_signal_has_zero_deltas():
    # a hop-periodic tone gives bit-identical frames
    period = np.sin(2 * np.pi * np.arange(32) / 32.0)  # 500 Hz, 5 periods per hop
    feats = audio.mfcc39(np.tile(period, 500), CFG25).frames
    assert np.all(feats[:, 13:] == 0.0)


def test_mfcc39_silence_finite():
    feats = audio.mfcc39(np.zeros(2000), CFG25).frames
    assert np.all(np.isfinite(feats)) and np.all(feats[:, 13:] == 0.0)


def test_mfcc39_delta_regression_oracle():
    sig = np.random.default_rng(2).normal(size=8000)
    feats = audio.mfcc39(sig, CFG25).frames
    c = feats[:, :13]
    t = len(c)
    oracle = np.zeros_like(c)
    for i in range(t):
        acc = 0.0
        for n in (1, 2):
            acc = acc + n * (c[min(i + n, t - 1)] - c[max(i - n, 0)])
        oracle[i] = acc / 10.0
    assert np.max(np.abs(feats[:, 13:26] - oracle)) < 1e-10


def test_mfcc39_short_input():
    with pytest.raises(InputError):
        audio.mfcc39(np.zeros(400 + 160 * 3), CFG25)


def test_stack_to_video_rate():
    fs = FeatureSequence(np.arange(8000.0).reshape(100, 80), 100.0, "fbank")
    out = audio.stack_to_video_rate(fs, 4)
    assert out.frames.shape == (25, 320) and out.frame_rate_hz == 25.0
    np.testing.assert_array_equal(out.frames[1], fs.frames[4:8].reshape(-1))


def test_stack_identity_and_remainder():
    fs = FeatureSequence(np.ones((103, 2)), 100.0, "fbank")
    assert np.array_equal(audio.stack_to_video_rate(fs, 1).frames, fs.frames)
    assert audio.stack_to_video_rate(fs, 4).frames.shape == (25, 8)
    with pytest.raises(ConfigError):
        audio.stack_to_video_rate(fs, 0)


def test_wav_roundtrip_and_rejection(tmp_path):
    import wave
    sig = np.sin(np.linspace(0, 100, 1600)) * 0.5
    audio.write_wav(tmp_path / "a.wav", sig)
    back = audio.read_wav(tmp_path / "a.wav")
    assert np.max(np.abs(back - sig)) < 1e-4
    with wave.open(str(tmp_path / "b.wav"), "wb") as wf:
        wf.setnchannels(2)
        wf.setsampwidth(2)
        wf.setframerate(16000)
        wf.writeframes(bytes(400))
    with pytest.raises(DataError, match="single-channel"):
        audio.read_wav(tmp_path / "b.wav")
    with pytest.raises(DataError):
        audio.read_wav(tmp_path / "missing.wav")
