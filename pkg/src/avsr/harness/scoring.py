"""Levenshtein alignment counts and pooled corpus error rates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class EditCounts:
    S: int
    D: int
    I: int

    @property
    def errors(self) -> int:
        return self.S + self.D + self.I


def edit_distance(ref, hyp) -> EditCounts:
    """Unit-cost alignment of two token sequences.

    Among minimum-cost alignments the backtrace prefers, at every cell, a
    substitution (or match) over a deletion over an insertion.
    """
    ref, hyp = list(ref), list(hyp)
    n, m = len(ref), len(hyp)
    d = np.zeros((n + 1, m + 1), dtype=np.int64)
    d[:, 0] = np.arange(n + 1)
    d[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        r = ref[i - 1]
        for j in range(1, m + 1):
            d[i, j] = min(d[i - 1, j - 1] + (r != hyp[j - 1]), d[i - 1, j] + 1, d[i, j - 1] + 1)
    s = de = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i, j] == d[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]):
            s += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and d[i, j] == d[i - 1, j] + 1:
            de += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return EditCounts(int(s), de, ins)


def tokenize(text: str, unit: str) -> list[str]:
    """Words split on whitespace, or characters with whitespace removed."""
    if unit == "word":
        return text.split()
    if unit == "char":
        return [c for c in text if not c.isspace()]
    raise InputError(f"unit must be 'word' or 'char', got {unit!r}")


@dataclass(frozen=True)
class CorpusScore:
    unit: str
    S: int
    D: int
    I: int
    N: int

    @property
    def rate(self) -> float:
        return (self.S + self.D + self.I) / self.N


def score_corpus(pairs, unit: str = "word") -> CorpusScore:
    """Pooled rate: total edits over total reference tokens."""
    pairs = list(pairs)
    if not pairs:
        raise InputError("cannot score an empty corpus")
    s = de = ins = n = 0
    for ref, hyp in pairs:
        r, h = tokenize(ref, unit), tokenize(hyp, unit)
        c = edit_distance(r, h)
        s, de, ins, n = s + c.S, de + c.D, ins + c.I, n + len(r)
    if n == 0:
        raise InputError("reference corpus has no tokens")
    return CorpusScore(unit, s, de, ins, n)
