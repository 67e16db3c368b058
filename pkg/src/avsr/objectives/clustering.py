"""k-means pseudo-labels and the phase schedule that says what to cluster."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InputError

MFCC = "mfcc39"
ENCODER = "encoder"


@dataclass(frozen=True)
class FeatureSource:
    kind: str                 # MFCC or ENCODER
    layer: int | None = None  # encoder layer index; None picks the middle block

    def __post_init__(self):
        if self.kind not in (MFCC, ENCODER):
            raise ConfigError(f"feature source must be {MFCC!r} or {ENCODER!r}, got {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == MFCC:
            return MFCC
        return "enc" if self.layer is None else f"enc@{self.layer}"


@dataclass(frozen=True)
class PhaseSchedule:
    phases: tuple[tuple[int, FeatureSource], ...]

    def __post_init__(self):
        if not self.phases:
            raise ConfigError("phase schedule is empty")
        for i, (k, src) in enumerate(self.phases):
            if k < 2:
                raise ConfigError(f"phase {i + 1}: cluster count must be >= 2, got {k}")
            if i == 0 and src.kind != MFCC:
                raise ConfigError("phase 1 must cluster MFCC features; no model exists yet")

    @classmethod
    def standard(cls) -> "PhaseSchedule":
        return cls.parse("100:mfcc39,100,500,1000,2000")

    @classmethod
    def parse(cls, text: str) -> "PhaseSchedule":
        """``"100:mfcc39,100,500:enc@3"``; a bare count means the default encoder layer."""
        phases = []
        for i, item in enumerate(t.strip() for t in text.split(",")):
            m = re.fullmatch(r"(\d+)(?::(mfcc39|enc(?:@(\d+))?))?", item)
            if not m:
                raise ConfigError(f"cannot parse phase {item!r}")
            k, tag, layer = int(m.group(1)), m.group(2), m.group(3)
            if tag is None:
                tag = MFCC if i == 0 else "enc"
            src = FeatureSource(MFCC) if tag == MFCC else FeatureSource(ENCODER, None if layer is None else int(layer))
            phases.append((k, src))
        return cls(tuple(phases))

    def __str__(self) -> str:
        return ",".join(f"{k}:{src}" for k, src in self.phases)

    @property
    def cluster_counts(self) -> list[int]:
        return [k for k, _ in self.phases]

    def __len__(self) -> int:
        return len(self.phases)


@dataclass
class PseudoLabelSet:
    labels: dict[str, np.ndarray]   # utt_id -> int labels [T]
    centroids: np.ndarray           # [k, F]
    inertia: float
    history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float
    history: list[float]
    iterations: int


def _sq_dists(x: np.ndarray, c: np.ndarray, x_sq: np.ndarray) -> np.ndarray:
    d = x_sq[:, None] - 2.0 * (x @ c.T) + (c * c).sum(axis=1)[None, :]
    return np.maximum(d, 0.0)


def _plus_plus(x: np.ndarray, k: int, rng: np.random.Generator, x_sq: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(x, x[chosen], x_sq)[:, 0]
    taken = np.zeros(n, bool)
    taken[chosen[0]] = True
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a centre already; fall back to unused indices
            idx = int(rng.choice(np.flatnonzero(~taken)))
        chosen.append(idx)
        taken[idx] = True
        closest = np.minimum(closest, _sq_dists(x, x[idx:idx + 1], x_sq)[:, 0])
    return x[chosen].copy()


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iters: int, x_sq: np.ndarray) -> KMeansResult:
    k = centroids.shape[0]
    assign = None
    history: list[float] = []
    it = 0
    for it in range(1, max_iters + 1):
        d = _sq_dists(x, centroids, x_sq)
        new_assign = d.argmin(axis=1)
        history.append(float(d[np.arange(len(x)), new_assign].sum()))
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        counts = np.bincount(assign, minlength=k)
        sums = np.zeros_like(centroids)
        np.add.at(sums, assign, x)
        filled = counts > 0
        centroids[filled] = sums[filled] / counts[filled, None]
        empty = np.flatnonzero(~filled)
        if empty.size:
            # re-seed from the points worst served by their current centre
            own = ((x - centroids[assign]) ** 2).sum(axis=1)
            order = np.argsort(-own, kind="stable")
            for j, idx in zip(empty, order):
                centroids[j] = x[idx]
    d = _sq_dists(x, centroids, x_sq)
    assign = d.argmin(axis=1)
    inertia = float(d[np.arange(len(x)), assign].sum())
    if not history or inertia < history[-1]:
        history.append(inertia)
    return KMeansResult(centroids, assign, inertia, history, it)


def kmeans(features: np.ndarray, k: int, max_iters: int = 50, seed=0, n_init: int = 1) -> KMeansResult:
    """k-means++ seeding followed by Lloyd iterations; the best of ``n_init`` restarts is kept.

    ``history`` holds the inertia after each assignment step of the winning run
    and never increases.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise InputError(f"features must be [N, F], got shape {x.shape}")
    n = x.shape[0]
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if n < k:
        raise InputError(f"need at least k={k} points, got N={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    x_sq = (x * x).sum(axis=1)
    best = None
    for _ in range(max(1, n_init)):
        res = _lloyd(x, _plus_plus(x, k, rng, x_sq), max_iters, x_sq)
        if best is None or res.inertia < best.inertia:
            best = res
    return best


def assign_labels(features: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    x = np.asarray(features, dtype=np.float64)
    return _sq_dists(x, centroids, (x * x).sum(axis=1)).argmin(axis=1)


def cluster_utterances(feats: dict[str, np.ndarray], k: int, max_iters: int = 50, seed=0,
                       n_init: int = 1) -> PseudoLabelSet:
    """Pool frames of all utterances, cluster, and split the labels back per utterance."""
    ids = list(feats)
    pooled = np.concatenate([feats[u] for u in ids], axis=0)
    res = kmeans(pooled, k, max_iters, seed, n_init)
    labels, start = {}, 0
    for u in ids:
        t = feats[u].shape[0]
        labels[u] = res.assignment[start:start + t].astype(np.int32)
        start += t
    return PseudoLabelSet(labels, res.centroids, res.inertia, res.history)
