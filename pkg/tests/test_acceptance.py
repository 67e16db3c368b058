"""Acceptance suite: one PASS/FAIL line per criterion, every tolerance pinned here.

Run with ``pytest tests/test_acceptance.py -v`` (the summary lines appear at
the end of the session) or directly with ``python3 tests/test_acceptance.py``.
"""

import json
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from avsr import audio  # noqa: E402
from avsr.audio import AudioFeatureConfig  # noqa: E402
from avsr.data import load_corpus  # noqa: E402
from avsr.encoder import ConformerBlock, EncoderConfig  # noqa: E402
from avsr.fusion import FusionConfig, GatedFusionParams, gated_fuse  # noqa: E402
from avsr.harness import (CATEGORIES, CorpusSpec, NoiseMixSpec, RunConfig, edit_distance, make_corpus,  # noqa: E402
                          measured_snr, mix_at_snr, score_corpus, synth_noise)
from avsr.harness.evaluate import noisy_copy  # noqa: E402
from avsr.harness.params import count_system  # noqa: E402
from avsr.harness.pipeline import Workspace, run_pipeline  # noqa: E402
from avsr.model import AVModel, ModelConfig  # noqa: E402
from avsr.numerics import Init, Tensor, grad_check  # noqa: E402
from avsr.numerics.io import load_tensor  # noqa: E402
from avsr.objectives import (DecoderConfig, MaskSpec, Seq2SeqDecoder, TrainConfig, Vocab,  # noqa: E402
                             cluster_utterances, decode_items, finetune, make_head, masked_accuracy,
                             masked_prediction_loss, pretrain)
from avsr.visual import VisualConfig  # noqa: E402

# -- pinned tolerances and budgets ------------------------------------------------
C1_INSTANCES, C1_CONFORMER_TOL, C1_GATE_TOL, C1_SECONDS = 1000, 1e-10, 1e-12, 30.0
C1_MUTANT_RATE = 1.0
C2_TRANSFORMER, C2_CONFORMER, C2_REL = 103e6, 183e6, 0.15
C2_DIFF, C2_DIFF_TOL, C2_SECONDS = 7e6, 1.5e6, 5.0
C3_TOL, C3_SECONDS = 1e-4, 120.0
C4_UTTS, C4_K, C4_MAX_STEPS, C4_ACC, C4_SECONDS = 20, 100, 2000, 0.90, 600.0
C5_UTTS, C5_MAX_STEPS, C5_SECONDS = 10, 3000, 600.0
C6_COUNTS, C6_SECONDS = [100, 100, 500, 1000, 2000], 1200.0
C7_SNRS, C7_TOL_DB, C7_SECONDS = (-5.0, 0.0, 5.0, 20.0), 0.01, 10.0
C8_PAIRS, C8_SECONDS = 1000, 10.0
C9_TRIPLES, C9_SECONDS = 20, 10.0

RESULTS: list[str] = []

TOY_DIM = 64


def _record(n: int, title: str, ok: bool, detail: str, seconds: float) -> bool:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{seconds:.1f}s]"
    RESULTS.append(line)
    print(line)
    return ok


def _toy_model_config(dim=TOY_DIM, blocks=2, heads=4, conv=15, layer_drop=0.05) -> ModelConfig:
    return ModelConfig(104, VisualConfig(backbone="resnet", frame_size=16, width_multiplier=0.125, embed_dim=dim),
                       FusionConfig(mode="glu", model_dim=dim),
                       EncoderConfig(num_blocks=blocks, model_dim=dim, num_heads=heads, conv_kernel=conv,
                                     pos_conv_kernel=conv, layer_drop=layer_drop))


# -- 1: block and gate against straight-line oracles --------------------------------

def criterion_1():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_c = worst_g = 0.0
    caught_c = caught_g = 0
    for _ in range(C1_INSTANCES):
        # D = 1 is excluded: layer norm over one feature is constant, so every block variant agrees
        heads = int(rng.choice([1, 2, 4]))
        d = heads * int(rng.integers(max(1, 2 // heads), 16 // heads + 1))
        t = int(rng.integers(1, 9))
        kernel = int(rng.choice([1, 3, 5, 7]))
        blk = ConformerBlock(EncoderConfig(num_blocks=1, model_dim=d, num_heads=heads, conv_kernel=kernel,
                                           pos_conv_kernel=3, layer_drop=0.0), Init(int(rng.integers(2 ** 31))))
        for _, p in blk.named_parameters():
            p.data = rng.normal(scale=0.5, size=p.shape)
        x = rng.normal(size=(t, d))
        params = oracles.params_of(blk)
        got = blk(Tensor(x)).data
        worst_c = max(worst_c, float(np.max(np.abs(got - oracles.conformer_block(x, params, heads)))))
        caught_c += float(np.max(np.abs(got - oracles.conformer_block(x, params, heads, half=1.0)))) > C1_CONFORMER_TOL

        dg = int(rng.integers(1, 17))
        tg = int(rng.integers(1, 9))
        arrs = dict(U=rng.normal(size=(2 * dg, dg)), W=rng.normal(size=(dg, dg)), V=rng.normal(size=(dg, dg)),
                    a=rng.normal(size=dg), b=rng.normal(size=dg), c=rng.normal(size=dg))
        gp = GatedFusionParams(**{k: Tensor(v) for k, v in arrs.items()})
        a, v = rng.normal(size=(tg, dg)), rng.normal(size=(tg, dg))
        out = gated_fuse(Tensor(a), Tensor(v), gp).data
        ref = oracles.gated_fuse(a, v, arrs["U"], arrs["W"], arrs["V"], arrs["a"], arrs["b"], arrs["c"])
        swapped = oracles.gated_fuse(a, v, arrs["U"], arrs["W"], arrs["V"], arrs["a"], arrs["b"], arrs["c"],
                                     visual_first=False)
        worst_g = max(worst_g, float(np.max(np.abs(out - ref))))
        caught_g += float(np.max(np.abs(out - swapped))) > C1_GATE_TOL
    secs = time.perf_counter() - start
    ok = (worst_c < C1_CONFORMER_TOL and worst_g < C1_GATE_TOL and caught_c / C1_INSTANCES >= C1_MUTANT_RATE
          and caught_g / C1_INSTANCES >= C1_MUTANT_RATE and secs < C1_SECONDS)
    detail = (f"{C1_INSTANCES} instances each; conformer max err {worst_c:.1e} (<{C1_CONFORMER_TOL:g}), "
              f"gate max err {worst_g:.1e} (<{C1_GATE_TOL:g}); instances failing the full-step FFN mutant "
              f"{caught_c}, the swapped-concat mutant {caught_g} (all required)")
    return _record(1, "block/gate oracles", ok, detail, secs)


# -- 2: full-size parameter counts --------------------------------------------------

def criterion_2():
    start = time.perf_counter()
    t = count_system("transformer", "resnet")
    c = count_system("conformer", "resnet")
    m = count_system("conformer", "mobilenet")
    # everything that changes with the backbone choice: trunk plus its projection to D (the stem is shared)
    frontend_diff = (c.visual_trunk + c.visual_head) - (m.visual_trunk + m.visual_head)
    trunk_only = c.visual_trunk - m.visual_trunk
    secs = time.perf_counter() - start
    ok = (abs(t.total - C2_TRANSFORMER) <= C2_REL * C2_TRANSFORMER
          and abs(c.total - C2_CONFORMER) <= C2_REL * C2_CONFORMER
          and c.total > t.total and abs(frontend_diff - C2_DIFF) <= C2_DIFF_TOL and secs < C2_SECONDS)
    detail = (f"transformer {t.total / 1e6:.2f}M (103M +-15%), conformer {c.total / 1e6:.2f}M (183M +-15%), "
              f"resnet-mobilenet frontend diff {frontend_diff / 1e6:.2f}M (7M +-1.5M; "
              f"trunk alone {trunk_only / 1e6:.2f}M)")
    return _record(2, "parameter counts", ok, detail, secs)


# -- 3: gradients -----------------------------------------------------------------

class _KinkRecorder:
    """Records which side of every ReLU / ReLU6 kink the visual frontend's inputs fall on.

    Piecewise-linear activations have no derivative at their kinks, so a
    central difference that straddles one measures a jump, not a gradient.
    """

    def __init__(self):
        import avsr.visual as visual
        self.module = visual
        self.original = visual.F
        self.patterns: list[np.ndarray] = []
        rec = self

        class Proxy:
            def __getattr__(self, name):
                return getattr(rec.original, name)

            def relu(self, x):
                rec.patterns.append(x.data > 0)
                return rec.original.relu(x)

            def relu6(self, x):
                rec.patterns.append(np.stack([x.data > 0, x.data < 6]))
                return rec.original.relu6(x)

        self.proxy = Proxy()

    def __enter__(self):
        self.module.F = self.proxy
        return self

    def __exit__(self, *exc):
        self.module.F = self.original

    def run(self, f):
        self.patterns = []
        value = f().item()
        return value, self.patterns


def _guarded_difference(f, x: Tensor, d: np.ndarray, rec: _KinkRecorder, p0, eps=1e-6):
    """Central difference along ``d``, or None when the step crosses a kink of base pattern ``p0``."""
    base = x.data.copy()
    try:
        x.data = base + eps * d
        up, p1 = rec.run(f)
        x.data = base - eps * d
        down, p2 = rec.run(f)
    finally:
        x.data = base
    if any((a != b).any() or (a != c).any() for a, b, c in zip(p0, p1, p2)):
        return None
    return (up - down) / (2 * eps)


def _rel_err(a: float, n: float) -> float:
    return abs(a - n) / max(abs(a), abs(n), 1e-3)


def criterion_3():
    from test_numerics import PRIMITIVES
    start = time.perf_counter()
    worst_prim = 0.0
    for name, fn in PRIMITIVES.items():
        worst_prim = max(worst_prim, grad_check(fn, Tensor(np.random.default_rng(5).normal(size=(3, 4)))))
    model = AVModel(_toy_model_config(dim=8, heads=2, conv=3, layer_drop=0.0), Init(3))
    head = make_head(model, 5, 4)
    rng = np.random.default_rng(0)
    audio_in = rng.normal(size=(1, 6, 104))
    video_in = rng.random(size=(1, 6, 16, 16))
    mask = np.zeros((1, 6), bool)
    mask[0, 1:4] = True
    labels = rng.integers(0, 5, size=(1, 6))
    for _, p in model.named_parameters():
        p.data = p.data + rng.normal(scale=0.1, size=p.shape)

    def loss():
        x = model.encode(audio_in, video_in, audio_mask=mask)
        return masked_prediction_loss(head(x), labels, mask).loss

    params = list(model.named_parameters()) + [("head." + n, p) for n, p in head.named_parameters()]
    for _, p in params:
        p.requires_grad = True
        p.grad = None
    loss().backward()
    grads = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for _, p in params]
    for _, p in params:
        p.grad = None

    worst_full = worst_dir = 0.0
    coords = skipped = directions = redrawn = 0
    with _KinkRecorder() as rec:
        _, p0 = rec.run(loss)
        for (name, p), g in zip(params, grads):
            if p.size <= 128:
                for i in range(p.size):
                    e = np.zeros(p.size)
                    e[i] = 1.0
                    num = _guarded_difference(loss, p, e.reshape(p.shape), rec, p0)
                    if num is None:
                        skipped += 1
                        continue
                    coords += 1
                    worst_full = max(worst_full, _rel_err(float(g.flat[i]), num))
            checked = 0
            for _ in range(20):
                d = rng.normal(size=p.shape)
                num = _guarded_difference(loss, p, d, rec, p0)
                if num is None:
                    redrawn += 1
                    continue
                worst_dir = max(worst_dir, _rel_err(float(np.sum(g * d)), num))
                checked += 1
                if checked == 2:
                    break
            directions += checked
    all_covered = directions == 2 * len(params)
    secs = time.perf_counter() - start
    ok = max(worst_prim, worst_full, worst_dir) < C3_TOL and all_covered and secs < C3_SECONDS
    detail = (f"{len(PRIMITIVES)} primitives max rel err {worst_prim:.1e}; 2-block toy model, all "
              f"{len(params)} tensors: {coords} coordinates max {worst_full:.1e}, {directions} random directions "
              f"max {worst_dir:.1e} (<{C3_TOL:g}); steps straddling a ReLU kink redrawn/skipped: "
              f"{redrawn}/{skipped}")
    return _record(3, "gradient integrity", ok, detail, secs)


# -- 4: toy pre-training ------------------------------------------------------------

def criterion_4(tmp: Path):
    start = time.perf_counter()
    manifest = make_corpus(tmp / "c4", CorpusSpec(num_utts=C4_UTTS, duration_s=1.2, frame_size=16, seed=0))
    items = load_corpus(manifest, AudioFeatureConfig())
    labels = cluster_utterances({it.utt_id: it.mfcc for it in items}, C4_K, 50, 0).labels
    model = AVModel(_toy_model_config(), Init(0))
    head = make_head(model, C4_K, 1)
    cfg = TrainConfig(steps=C4_MAX_STEPS, batch_size=2, peak_lr=3e-3, warmup_steps=100)
    pretrain(model, head, items, labels, MaskSpec(), cfg, np.random.default_rng(0))
    acc = masked_accuracy(model, head, items, labels, MaskSpec(), seed=1)
    secs = time.perf_counter() - start
    ok = acc >= C4_ACC and secs < C4_SECONDS
    detail = f"{C4_UTTS} utts, k={C4_K} MFCC-39 labels, {cfg.steps} steps, D={TOY_DIM}: masked acc {acc:.3f} (>= {C4_ACC})"
    return _record(4, "toy pre-training", ok, detail, secs)


# -- 5: toy fine-tuning -------------------------------------------------------------

def criterion_5(tmp: Path):
    start = time.perf_counter()
    manifest = make_corpus(tmp / "c5", CorpusSpec(num_utts=C5_UTTS, duration_s=1.2, frame_size=16, seed=1))
    items = load_corpus(manifest, AudioFeatureConfig())
    labels = cluster_utterances({it.utt_id: it.mfcc for it in items}, 100, 50, 0).labels
    model = AVModel(_toy_model_config(), Init(0))
    pre = TrainConfig(steps=300, batch_size=2, peak_lr=3e-3, warmup_steps=100)
    pretrain(model, make_head(model, 100, 1), items, labels, MaskSpec(), pre, np.random.default_rng(0))
    vocab = Vocab.from_transcripts([it.transcript for it in items])
    dec = Seq2SeqDecoder(DecoderConfig(len(vocab), TOY_DIM, 4, 2), Init(5))
    ft = TrainConfig(steps=1500, batch_size=2, peak_lr=3e-3, warmup_steps=100, freeze_fraction=0.8)
    finetune(model, dec, items, vocab, ft, np.random.default_rng(1))
    hyps = decode_items(model, dec, items, vocab)
    sc = score_corpus([(it.transcript, hyps[it.utt_id]) for it in items], "char")
    exact = sum(hyps[it.utt_id] == it.transcript for it in items)
    total_steps = pre.steps + ft.steps
    secs = time.perf_counter() - start
    ok = sc.rate == 0.0 and exact == C5_UTTS and total_steps <= C5_MAX_STEPS and secs < C5_SECONDS
    detail = (f"{C5_UTTS} pairs, {total_steps} steps ({pre.steps} pre-train + {ft.steps} fine-tune, "
              f"{ft.freeze_fraction:.0%} frozen): {exact}/{C5_UTTS} exact, CER {sc.rate:.4f}")
    return _record(5, "toy fine-tuning", ok, detail, secs)


# -- 6 and 10: pipeline runs --------------------------------------------------------

SCHEDULE_INI = """
[corpus]
num_utts = 30
duration_s = 3.2

[encoder]
dim = 32
heads = 4

[objective]
schedule = 100:mfcc39,100,500,1000,2000
kmeans_iters = 20

[pretrain]
steps = 15
warmup_steps = 5

[finetune]
steps = 10
warmup_steps = 5
max_len = 24

[eval]
noise = babble:5,all:5
"""

DETERMINISM_INI = """
[corpus]
num_utts = 6
duration_s = 1.2

[encoder]
dim = 16
heads = 2

[objective]
schedule = 20:mfcc39,30
mask_prob = 0.2
span_len = 3

[pretrain]
steps = 20
warmup_steps = 5

[finetune]
steps = 30
warmup_steps = 5
max_len = 24

[eval]
noise = babble:5,music:5,natural:5,all:5
"""


def criterion_6(tmp: Path):
    start = time.perf_counter()
    ws = Workspace(tmp / "c6")
    run_pipeline(RunConfig.from_ini(SCHEDULE_INI), ws)
    found, distinct, frames = [], [], 0
    for phase in range(1, len(C6_COUNTS) + 1):
        d = ws.labels(phase)
        info = json.loads((d / "labels.json").read_text())
        labels = np.concatenate([load_tensor(d / f"{u}.avht") for u in info["utterances"]])
        found.append(int(info["k"]))
        found_centroids = load_tensor(d / "centroids.avht").shape[0]
        if found_centroids != found[-1]:
            found[-1] = -found_centroids
        distinct.append(int(len(np.unique(labels))))
        frames = max(frames, labels.size)
    report_ok = (ws.root / "eval" / "report.tsv").is_file()
    secs = time.perf_counter() - start
    ok = found == C6_COUNTS and distinct == C6_COUNTS and report_ok and secs < C6_SECONDS
    detail = f"k per phase {found}, distinct labels used {distinct}, {frames} frames, report written {report_ok}"
    return _record(6, "five-phase schedule", ok, detail, secs)


def _tree_bytes(root: Path, subdirs) -> dict[str, bytes]:
    out = {}
    for sub in subdirs:
        for p in sorted((root / sub).rglob("*")):
            if p.is_file():
                out[str(p.relative_to(root))] = p.read_bytes()
    return out


def criterion_10(tmp: Path):
    start = time.perf_counter()
    cfg = RunConfig.from_ini(DETERMINISM_INI)
    trees = []
    for name in ("run_a", "run_b"):
        ws = Workspace(tmp / "c10" / name)
        run_pipeline(cfg, ws)
        trees.append(_tree_bytes(ws.root, ("labels", "checkpoints", "eval")))
    a, b = trees
    differing = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
    secs = time.perf_counter() - start
    n_labels = sum(k.startswith("labels") for k in a)
    n_ckpt = sum(k.startswith("checkpoints") for k in a)
    n_eval = sum(k.startswith("eval") for k in a)
    ok = not differing and n_labels > 0 and n_ckpt > 0 and n_eval > 0
    detail = (f"{len(a)} files compared ({n_labels} label, {n_ckpt} checkpoint, {n_eval} report): "
              f"{len(differing)} differ" + (f" e.g. {differing[:3]}" if differing else ""))
    return _record(10, "determinism", ok, detail, secs)


# -- 7: SNR mixing ----------------------------------------------------------------

def criterion_7():
    start = time.perf_counter()
    from avsr.harness.synth import render
    speech, _ = render("abc def", CorpusSpec(num_utts=1, duration_s=1.2), np.random.default_rng(0))
    worst = 0.0
    for cat in CATEGORIES:
        noise = synth_noise(cat, 1.0, 11)
        for snr in C7_SNRS:
            worst = max(worst, abs(measured_snr(speech, mix_at_snr(speech, noise, snr)) - snr))
    # the 5 dB evaluation condition, through the same path the report uses
    worst5 = 0.0
    for si, cat in enumerate(CATEGORIES + ("all",)):
        for ui in range(5):
            mixed = noisy_copy(speech, NoiseMixSpec(cat, 5.0, seed=3), ui, si)
            worst5 = max(worst5, abs(measured_snr(speech, mixed) - 5.0))
    secs = time.perf_counter() - start
    ok = worst < C7_TOL_DB and worst5 < C7_TOL_DB and secs < C7_SECONDS
    detail = (f"{len(CATEGORIES)} categories x {list(C7_SNRS)} dB max |err| {worst:.2e} dB; "
              f"5 dB eval condition max |err| {worst5:.2e} dB (<{C7_TOL_DB} dB)")
    return _record(7, "SNR mixing", ok, detail, secs)


# -- 8: error-rate metric -----------------------------------------------------------

def criterion_8():
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    words = ["a", "b", "c", "d", "e"]
    mismatches = 0
    for _ in range(C8_PAIRS):
        ref = [words[i] for i in rng.integers(0, 5, size=rng.integers(1, 12))]
        hyp = [words[i] for i in rng.integers(0, 5, size=rng.integers(0, 12))]
        got = score_corpus([(" ".join(ref), " ".join(hyp))], "word")
        want = oracles.levenshtein_matrix(ref, hyp)
        mismatches += (got.S + got.D + got.I != want) or edit_distance(ref, hyp).errors != want
    hand = [score_corpus([("the cat sat", "the cat sit")]).rate,
            score_corpus([("the cat sat", "")]).rate,
            score_corpus([("the cat sat", "the cat sat")]).rate]
    secs = time.perf_counter() - start
    ok = mismatches == 0 and hand == [1 / 3, 1.0, 0.0] and secs < C8_SECONDS
    detail = f"{C8_PAIRS} random pairs, {mismatches} disagree with the DP oracle; hand cases {[round(h, 4) for h in hand]}"
    return _record(8, "metric oracle", ok, detail, secs)


# -- 9: audio frontend ------------------------------------------------------------

def criterion_9():
    start = time.perf_counter()
    rng = np.random.default_rng(9)
    frame_errors = 0
    for _ in range(C9_TRIPLES):
        window_ms = int(rng.integers(5, 41))
        hop_ms = int(rng.integers(1, window_ms + 1))
        cfg = AudioFeatureConfig(window_ms=window_ms, hop_ms=hop_ms)
        w, h = cfg.window_samples, cfg.hop_samples
        n = w + int(rng.integers(0, 8000))
        want = 1 + (n - w) // h
        frame_errors += audio.frame_signal(np.zeros(n), cfg).shape != (want, w)
        frame_errors += audio.num_frames(n, w, h) != want
    sig = np.random.default_rng(0).normal(size=16000)
    dims = {m: audio.fbank(sig, AudioFeatureConfig(n_mels=m)).dim for m in (26, 80)}
    mfcc_dim = audio.mfcc39(sig, AudioFeatureConfig()).dim
    tone = np.sin(2 * np.pi * 1000.0 * np.arange(16000) / 16000.0)
    peaks_ok = True
    for cfg in (AudioFeatureConfig(), AudioFeatureConfig(window_ms=15.0), AudioFeatureConfig(n_mels=80)):
        feats = audio.fbank(tone, cfg).frames
        pts = audio.mel_center_frequencies(cfg.n_mels, 16000)
        tri = np.maximum(0.0, np.minimum((1000.0 - pts[:-2]) / (pts[1:-1] - pts[:-2]),
                                         (pts[2:] - 1000.0) / (pts[2:] - pts[1:-1])))
        peaks_ok &= int(np.argmax(feats[len(feats) // 2])) == int(np.argmax(tri))
    secs = time.perf_counter() - start
    ok = frame_errors == 0 and dims == {26: 26, 80: 80} and mfcc_dim == 39 and peaks_ok and secs < C9_SECONDS
    detail = (f"{C9_TRIPLES} (N, W, H) triples, {frame_errors} frame-count errors; fbank dims {sorted(dims.values())}, "
              f"MFCC dim {mfcc_dim}; 1 kHz tone in analytic mel bin: {peaks_ok}")
    return _record(9, "feature frontend", ok, detail, secs)


# -- pytest entry points ----------------------------------------------------------

@pytest.fixture(scope="module")
def scratch(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def test_criterion_01_oracles():
    assert criterion_1()


def test_criterion_02_param_counts():
    assert criterion_2()


def test_criterion_03_gradients():
    assert criterion_3()


def test_criterion_04_pretraining(scratch):
    assert criterion_4(scratch)


def test_criterion_05_finetuning(scratch):
    assert criterion_5(scratch)


def test_criterion_06_phase_schedule(scratch):
    assert criterion_6(scratch)


def test_criterion_07_snr(scratch):
    assert criterion_7()


def test_criterion_08_metric():
    assert criterion_8()


def test_criterion_09_frontend():
    assert criterion_9()


def test_criterion_10_determinism(scratch):
    assert criterion_10(scratch)


def main() -> int:
    with tempfile.TemporaryDirectory() as d:
        tmp = Path(d)
        results = [criterion_1(), criterion_2(), criterion_3(), criterion_4(tmp), criterion_5(tmp),
                   criterion_6(tmp), criterion_7(), criterion_8(), criterion_9(), criterion_10(tmp)]
    print(f"{sum(results)}/{len(results)} criteria passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
