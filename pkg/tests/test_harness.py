import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import signal

import oracles
from avsr.data import read_manifest
from avsr.errors import ConfigError, InputError
from avsr.harness import (CATEGORIES, CorpusSpec, EvalReport, EvalRow, NoiseMixSpec, RunConfig, edit_distance,
                          make_corpus, measured_snr, mix_at_snr, parse_noise_specs, score_corpus, synth_noise,
                          tokenize)
from avsr.harness.cli import main
from avsr.harness.evaluate import noisy_copy, read_report_tsv
from avsr.harness.params import count_system, rows_to_tsv

SR = 16000

TINY_INI = """
[corpus]
num_utts = 4
duration_s = 0.8

[encoder]
dim = 16
heads = 2
conv_kernel = 3
pos_conv_kernel = 3

[objective]
schedule = 8:mfcc39,6
mask_prob = 0.2
span_len = 3
kmeans_iters = 10

[pretrain]
steps = 5
warmup_steps = 2

[finetune]
steps = 6
warmup_steps = 2
decoder_layers = 1
max_len = 12

[eval]
noise = babble:5,all:0
"""


# -- noise ---------------------------------------------------------------------

@pytest.mark.parametrize("category", CATEGORIES)
def test_noise_seeded_zero_mean_unit_level(category):
    a = synth_noise(category, 0.5, 7)
    assert a.tobytes() == synth_noise(category, 0.5, 7).tobytes()
    assert a.tobytes() != synth_noise(category, 0.5, 8).tobytes()
    assert abs(a.mean()) < 1e-12
    assert np.sqrt(np.mean(a * a)) == pytest.approx(0.1, rel=1e-12)


def _band_fraction(x, lo, hi):
    f, p = signal.welch(x, fs=SR, nperseg=1024)
    return p[(f >= lo) & (f <= hi)].sum() / p.sum()


def test_babble_is_speech_band_limited():
    babble = synth_noise("babble", 2.0, 0)
    natural = synth_noise("natural", 2.0, 0)
    assert _band_fraction(babble, 100, 4000) > 0.99
    assert _band_fraction(natural, 100, 4000) < _band_fraction(babble, 100, 4000)
    assert _band_fraction(babble, 5000, 8000) < 1e-3


def test_noise_errors():
    with pytest.raises(ConfigError):
        synth_noise("traffic", 1.0, 0)
    with pytest.raises(ConfigError):
        parse_noise_specs("babble:loud")
    assert parse_noise_specs("") == []
    assert [s.label for s in parse_noise_specs("all:5, music:-5")] == ["all@5dB", "music@-5dB"]


@pytest.mark.parametrize("snr", [-5.0, 0.0, 5.0, 20.0])
@pytest.mark.parametrize("category", CATEGORIES)
def test_mix_hits_requested_snr(category, snr):
    speech = np.sin(2 * np.pi * 440 * np.arange(12000) / SR) * 0.3
    noise = synth_noise(category, 0.4, 3)  # shorter than speech: tiled
    mix = mix_at_snr(speech, noise, snr)
    assert abs(measured_snr(speech, mix) - snr) < 0.01


def test_mix_gain_one_when_powers_already_match():
    rng = np.random.default_rng(0)
    speech = rng.normal(size=4000)
    noise = rng.normal(size=4000)
    noise *= np.sqrt(np.mean(speech ** 2) / np.mean(noise ** 2))
    np.testing.assert_allclose(mix_at_snr(speech, noise, 0.0), speech + noise, atol=1e-12)


def test_mix_limits_and_errors():
    speech = np.random.default_rng(1).normal(size=100)
    noise = np.random.default_rng(2).normal(size=100)
    assert mix_at_snr(speech, noise, math.inf).tobytes() == speech.tobytes()
    with pytest.raises(InputError, match="silent"):
        mix_at_snr(np.zeros(100), noise, 5.0)
    with pytest.raises(InputError, match="silent"):
        mix_at_snr(speech, np.zeros(10), 5.0)


def test_noisy_copy_all_category_is_seeded():
    speech = np.random.default_rng(0).normal(size=3200)
    spec = NoiseMixSpec("all", 5.0, seed=4)
    a = [noisy_copy(speech, spec, i, 0) for i in range(6)]
    b = [noisy_copy(speech, spec, i, 0) for i in range(6)]
    assert all(x.tobytes() == y.tobytes() for x, y in zip(a, b))
    assert all(abs(measured_snr(speech, x) - 5.0) < 0.01 for x in a)


# -- scoring -------------------------------------------------------------------

@pytest.mark.parametrize("ref,hyp,counts", [
    ("abc", "abc", (0, 0, 0)),
    ("abc", "", (0, 3, 0)),
    ("", "ab", (0, 0, 2)),
    ("abc", "axc", (1, 0, 0)),
    ("abc", "ac", (0, 1, 0)),
    ("ac", "abc", (0, 0, 1)),
    ("kitten", "sitting", (2, 0, 1)),
    ("ab", "ba", (2, 0, 0)),
])
def test_edit_distance_hand_cases(ref, hyp, counts):
    c = edit_distance(ref, hyp)
    assert (c.S, c.D, c.I) == counts


def test_edit_distance_matches_oracle_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        ref = rng.integers(0, 4, size=rng.integers(0, 9)).tolist()
        hyp = rng.integers(0, 4, size=rng.integers(0, 9)).tolist()
        c = edit_distance(ref, hyp)
        assert c.errors == oracles.levenshtein_matrix(ref, hyp)
        # counts are consistent with the sequence lengths
        assert len(ref) - c.D + c.I == len(hyp)


@settings(max_examples=200, deadline=None)
@given(st.text("abc", max_size=7), st.text("abc", max_size=7), st.text("abc", max_size=7))
def test_edit_distance_is_a_metric(a, b, c):
    d = lambda x, y: edit_distance(x, y).errors
    assert (d(a, b) == 0) == (a == b)
    assert d(a, b) == d(b, a)
    assert d(a, c) <= d(a, b) + d(b, c)


def test_tokenize():
    assert tokenize(" ab  cd ", "word") == ["ab", "cd"]
    assert tokenize("ab cd", "char") == ["a", "b", "c", "d"]
    with pytest.raises(InputError):
        tokenize("x", "phone")


def test_corpus_rate_is_pooled():
    pairs = [("a b c d e f g h i j", "a b c d e f g h i x"), ("k", "z")]
    sc = score_corpus(pairs, "word")
    assert (sc.S, sc.N) == (2, 11)
    assert sc.rate == pytest.approx(2 / 11)
    assert sc.rate != pytest.approx((0.1 + 1.0) / 2)
    with pytest.raises(InputError):
        score_corpus([], "word")
    with pytest.raises(InputError):
        score_corpus([("", "x")], "word")


# -- configuration ---------------------------------------------------------------

def test_config_rejects_unknown_keys_and_sections():
    with pytest.raises(ConfigError, match="unknown key"):
        RunConfig.from_ini("[encoder]\nblock = 3\n")
    with pytest.raises(ConfigError, match="unknown section"):
        RunConfig.from_ini("[encoders]\nblocks = 3\n")
    with pytest.raises(ConfigError, match="expects int"):
        RunConfig.from_ini("[encoder]\nblocks = three\n")
    with pytest.raises(ConfigError):
        RunConfig.from_ini("[fusion]\nmode = add\n")
    with pytest.raises(ConfigError):
        RunConfig().set("encoder.nope", 1)


def test_config_round_trip():
    cfg = RunConfig.from_ini(TINY_INI)
    assert cfg.encoder.dim == 16 and cfg.pretrain.modality_drop is True
    again = RunConfig.from_ini(cfg.to_ini())
    assert again == cfg
    assert cfg.schedule().cluster_counts == [8, 6]


# -- synthetic corpus -------------------------------------------------------------

def test_corpus_is_deterministic_and_aligned(tmp_path):
    spec = CorpusSpec(num_utts=3, duration_s=0.8, seed=2)
    m1 = make_corpus(tmp_path / "a", spec)
    m2 = make_corpus(tmp_path / "b", spec)
    u1, u2 = read_manifest(m1), read_manifest(m2)
    assert [u.transcript for u in u1] == [u.transcript for u in u2]
    for a, b in zip(u1, u2):
        assert a.audio_path.read_bytes() == b.audio_path.read_bytes()
        assert a.video_path.read_bytes() == b.video_path.read_bytes()
    assert all(set(u.transcript) <= set("abcdefghijkl ") for u in u1)


# -- reports ---------------------------------------------------------------------

def test_report_tsv_round_trip(tmp_path):
    rows = [EvalRow("A", "clean", None, "char", 0.25, 1, 0, 0, 4),
            EvalRow("AV", "babble", 5.0, "char", 0.0, 0, 0, 0, 4)]
    rep = EvalReport(rows, {"clean/A": {"u1": "ab"}, "babble@5dB/AV": {"u1": "abc"}})
    paths = rep.write(tmp_path)
    back = read_report_tsv(paths["tsv"])
    assert [r["mode"] for r in back] == ["A", "AV"]
    assert back[0]["snr_db"] == math.inf and back[1]["snr_db"] == 5.0
    assert rep.rate("AV", "babble@5dB") == 0.0
    assert paths["hyp"].read_text().splitlines()[1] == "clean\tA\tu1\tab"


# -- parameter counts -----------------------------------------------------------

def test_full_scale_counts():
    t = count_system("transformer", "resnet")
    c = count_system("conformer", "resnet")
    assert abs(t.total - 103e6) / 103e6 < 0.15
    assert abs(c.total - 183e6) / 183e6 < 0.15
    assert c.total > t.total
    m = count_system("conformer", "mobilenet")
    assert c.encoder_params == m.encoder_params
    assert rows_to_tsv([t]).splitlines()[1].split("\t")[:3] == ["transformer", "resnet", "concat"]


# -- CLI -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def tiny_ini(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "tiny.ini"
    path.write_text(TINY_INI)
    return path


def test_cli_exit_codes(tmp_path, tiny_ini, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[nonsense]\nx = 1\n")
    assert main(["synth", "--config", str(bad), "--out-dir", str(tmp_path / "w")]) == 2
    assert main(["synth", "--config", str(tiny_ini), "--set", "encoder.blocks", "--out-dir",
                 str(tmp_path / "w")]) == 2
    assert main(["featurize", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "empty")]) == 3
    assert main(["cluster", "--phase", "2", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "w"),
                 "--manifest", str(tmp_path / "missing.tsv")]) == 3
    assert main(["cluster", "--phase", "9", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "w")]) == 2
    capsys.readouterr()
    assert main(["synth", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "w")]) == 0
    assert main(["featurize", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "w")]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[-5] == "utt_id\tframes\taudio_dim\tmfcc_dim"
    assert all(ln.split("\t")[2:] == ["104", "156"] for ln in lines[-4:])
    assert (tmp_path / "w" / "features" / "features.png").stat().st_size > 0
    # phase 2 needs the phase 1 checkpoint
    assert main(["cluster", "--phase", "2", "--config", str(tiny_ini), "--out-dir", str(tmp_path / "w")]) == 3


def test_cli_pipeline_report(tmp_path, tiny_ini, capsys):
    assert main(["pipeline", "--config", str(tiny_ini), "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split("\t") == ["mode", "noise", "snr_db", "unit", "rate", "S", "D", "I", "N_ref"]
    rows = read_report_tsv(tmp_path / "eval" / "report.tsv")
    conds = [(r["mode"], r["noise"], r["snr_db"]) for r in rows]
    assert conds == [("A", "clean", math.inf), ("AV", "clean", math.inf), ("A", "babble", 5.0),
                     ("AV", "babble", 5.0), ("A", "all", 0.0), ("AV", "all", 0.0)]
    for r in rows:
        edits = int(r["S"]) + int(r["D"]) + int(r["I"])
        assert abs(r["rate"] - edits / int(r["N_ref"])) < 1e-6
    assert (tmp_path / "eval" / "report.png").stat().st_size > 0
    assert (tmp_path / "config.ini").is_file()
    assert RunConfig.load(tmp_path / "config.ini") == RunConfig.from_ini(TINY_INI)
