"""Figures written next to the delimited outputs (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed metadata keeps PNG bytes reproducible
_META = {"Software": None}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def plot_report(rows, path) -> Path:
    """Grouped bars: error rate per condition, one bar per mode."""
    conditions = list(dict.fromkeys(r.condition for r in rows))
    modes = list(dict.fromkeys(r.mode for r in rows))
    width = 0.8 / max(len(modes), 1)
    fig, ax = plt.subplots(figsize=(max(5, 1.3 * len(conditions)), 3.5))
    x = np.arange(len(conditions))
    for i, mode in enumerate(modes):
        rate = {r.condition: r.rate for r in rows if r.mode == mode}
        ax.bar(x + i * width, [100 * rate.get(c, np.nan) for c in conditions], width, label=mode)
    ax.set_xticks(x + width * (len(modes) - 1) / 2)
    ax.set_xticklabels(conditions, rotation=20, ha="right")
    unit = rows[0].unit.upper() if rows else ""
    ax.set_ylabel(f"{'CER' if unit == 'CHAR' else 'WER'} (%)")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_training(history: list[dict], path, title: str = "") -> Path:
    steps = [h["step"] for h in history]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(steps, [h["loss"] for h in history], lw=0.8, label="loss")
    ax.set_xlabel("step")
    ax.set_ylabel("loss")
    acc = [(h["step"], h["masked_acc"]) for h in history if h.get("masked_acc") is not None]
    if acc:
        ax2 = ax.twinx()
        ax2.plot(*zip(*acc), lw=0.8, color="tab:orange", label="masked acc")
        ax2.set_ylabel("masked accuracy")
        ax2.set_ylim(0, 1)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_features(audio: np.ndarray, mfcc: np.ndarray, video: np.ndarray, path, title: str = "") -> Path:
    fig, axes = plt.subplots(1, 3, figsize=(10, 3))
    axes[0].imshow(audio.T, aspect="auto", origin="lower")
    axes[0].set_title("stacked log-mel")
    axes[1].imshow(mfcc.T, aspect="auto", origin="lower")
    axes[1].set_title("stacked MFCC-39")
    axes[2].imshow(np.concatenate(list(video[: min(6, len(video))]), axis=1), cmap="gray")
    axes[2].set_title("video frames")
    axes[2].axis("off")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_param_counts(rows, path) -> Path:
    labels = [f"{r.encoder}\n{r.visual}/{r.fusion}" for r in rows]
    parts = ("encoder_params", "visual_trunk", "fusion_params")
    fig, ax = plt.subplots(figsize=(max(6, 1.1 * len(rows)), 3.8))
    bottom = np.zeros(len(rows))
    for part in parts:
        vals = np.array([getattr(r, part) for r in rows]) / 1e6
        ax.bar(labels, vals, bottom=bottom, label=part)
        bottom += vals
    rest = np.array([r.total for r in rows]) / 1e6 - bottom
    ax.bar(labels, rest, bottom=bottom, label="other")
    ax.set_ylabel("parameters (M)")
    ax.legend(fontsize=7)
    ax.tick_params(axis="x", labelsize=7)
    fig.tight_layout()
    return _save(fig, path)


def plot_phase_summary(counts: list[int], inertias: list[float], path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.2))
    phases = np.arange(1, len(counts) + 1)
    ax.bar(phases, counts)
    ax.set_xlabel("phase")
    ax.set_ylabel("clusters k")
    for p, k, inertia in zip(phases, counts, inertias):
        ax.annotate(f"{inertia:.3g}", (p, k), ha="center", va="bottom", fontsize=7)
    fig.tight_layout()
    return _save(fig, path)
