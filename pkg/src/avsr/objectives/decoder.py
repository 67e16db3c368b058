"""Token vocabularies and the attention decoder used for fine-tuning."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..encoder import MultiHeadAttention
from ..errors import ConfigError, DataError
from ..numerics import FeedForward, Init, LayerNorm, Linear, Module, Tensor, no_grad
from ..numerics import tensor as F

SPECIALS = ("<pad>", "<s>", "</s>", "<unk>")
WORD_BOUNDARY = "▁"


class Vocab:
    """Dense token table with the four specials at ids 0..3.

    ``unit="char"`` splits text into characters. ``unit="subword"`` uses a
    precomputed piece list (``▁`` marks a word start) and segments by
    greedy longest match.
    """

    def __init__(self, tokens, unit: str = "char"):
        if unit not in ("char", "subword"):
            raise ConfigError(f"vocab unit must be 'char' or 'subword', got {unit!r}")
        self.unit = unit
        self.itos = list(SPECIALS)
        for tok in tokens:
            if tok in SPECIALS:
                continue
            if tok in self.itos:
                raise ConfigError(f"duplicate vocabulary entry {tok!r}")
            self.itos.append(tok)
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        self._max_piece = max((len(t) for t in self.itos[len(SPECIALS):]), default=1)

    pad, bos, eos, unk = 0, 1, 2, 3

    def __len__(self) -> int:
        return len(self.itos)

    @classmethod
    def from_transcripts(cls, texts) -> "Vocab":
        return cls(sorted({c for t in texts for c in t}), "char")

    @classmethod
    def from_file(cls, path) -> "Vocab":
        """One piece per line; an optional second tab-separated column (a score) is ignored."""
        path = Path(path)
        if not path.is_file():
            raise DataError(f"vocabulary file not found: {path}")
        pieces = [ln.split("\t")[0] for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        return cls(pieces, "subword")

    def save(self, path) -> None:
        Path(path).write_text("\n".join(self.itos[len(SPECIALS):]) + "\n", encoding="utf-8")

    def encode(self, text: str) -> list[int]:
        if self.unit == "char":
            return [self.stoi.get(c, self.unk) for c in text]
        ids = []
        for word in text.split():
            s = WORD_BOUNDARY + word
            i = 0
            while i < len(s):
                for j in range(min(len(s), i + self._max_piece), i, -1):
                    if s[i:j] in self.stoi:
                        ids.append(self.stoi[s[i:j]])
                        i = j
                        break
                else:
                    ids.append(self.unk)
                    i += 1
        return ids

    def decode(self, ids) -> str:
        toks = [self.itos[i] for i in ids if i >= len(SPECIALS)]
        if self.unit == "char":
            return "".join(toks)
        return "".join(toks).replace(WORD_BOUNDARY, " ").strip()


def absolute_sinusoids(length: int, dim: int) -> np.ndarray:
    pos = np.arange(length, dtype=np.float64)[:, None]
    freqs = 1.0 / (10000.0 ** (np.arange(0, dim, 2, dtype=np.float64) / dim))
    pe = np.zeros((length, dim))
    pe[:, 0::2] = np.sin(pos * freqs)
    pe[:, 1::2] = np.cos(pos * freqs[: dim // 2])
    return pe


@dataclass(frozen=True)
class DecoderConfig:
    vocab_size: int
    model_dim: int = 64
    num_heads: int = 4
    num_layers: int = 2
    ffn_expansion: int = 4
    dropout: float = 0.0

    def __post_init__(self):
        if self.model_dim % self.num_heads:
            raise ConfigError(f"decoder model_dim {self.model_dim} not divisible by {self.num_heads} heads")
        if self.vocab_size <= len(SPECIALS):
            raise ConfigError("vocabulary has no regular tokens")
        if self.num_layers < 1:
            raise ConfigError("decoder needs at least one layer")


class DecoderLayer(Module):
    """Post-LN causal self-attention, cross-attention and feed-forward."""

    def __init__(self, cfg: DecoderConfig, init: Init):
        d = cfg.model_dim
        self.self_attn = MultiHeadAttention(d, cfg.num_heads, init)
        self.norm_self = LayerNorm(d, init)
        self.cross_attn = MultiHeadAttention(d, cfg.num_heads, init)
        self.norm_cross = LayerNorm(d, init)
        self.ffn = FeedForward(d, cfg.ffn_expansion * d, init)
        self.norm_ffn = LayerNorm(d, init)
        self._dropout = cfg.dropout

    def __call__(self, y: Tensor, memory: Tensor, causal: np.ndarray, rng=None, training=False) -> Tensor:
        p = self._dropout
        y = self.norm_self(y + F.dropout(self.self_attn(y, mask=causal), p, rng, training))
        y = self.norm_cross(y + F.dropout(self.cross_attn(y, kv=memory), p, rng, training))
        return self.norm_ffn(y + F.dropout(self.ffn(y, rng, training, p), p, rng, training))


class Seq2SeqDecoder(Module):
    def __init__(self, cfg: DecoderConfig, init: Init):
        self.config = cfg
        d = cfg.model_dim
        self.embed = init.uniform((cfg.vocab_size, d), fan_in=d)
        self.layers = [DecoderLayer(cfg, init) for _ in range(cfg.num_layers)]
        self.out = Linear(d, cfg.vocab_size, init)

    def __call__(self, tokens: np.ndarray, memory, rng=None, training: bool = False) -> Tensor:
        """Logits ``[B, L, V]`` for input tokens ``[B, L]`` attending to ``memory[B, T, D]``."""
        tokens = np.asarray(tokens, dtype=np.int64)
        memory = F.as_tensor(memory)
        if tokens.ndim != 2 or memory.ndim != 3 or memory.shape[0] != tokens.shape[0]:
            raise ConfigError(f"decoder needs tokens [B, L] and memory [B, T, D]; got {tokens.shape}, "
                              f"{memory.shape}")
        b, length = tokens.shape
        d = self.config.model_dim
        y = F.embedding(self.embed, tokens) * np.sqrt(d) + absolute_sinusoids(length, d)
        causal = np.tril(np.ones((length, length), dtype=bool))
        for layer in self.layers:
            y = layer(y, memory, causal, rng, training)
        return self.out(y)


def _check_ids(seqs, vocab_size: int) -> None:
    for s in seqs:
        for t in s:
            if not 0 <= t < vocab_size:
                raise DataError(f"token id {t} outside vocabulary of size {vocab_size}")


def teacher_forcing_batch(targets, vocab_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inputs ``<s> y``, outputs ``y </s>``, and a validity mask; pads trail every row."""
    _check_ids(targets, vocab_size)
    length = max(len(t) for t in targets) + 1
    inp = np.full((len(targets), length), Vocab.pad, dtype=np.int64)
    out = np.full((len(targets), length), Vocab.pad, dtype=np.int64)
    valid = np.zeros((len(targets), length), dtype=bool)
    for i, t in enumerate(targets):
        inp[i, :len(t) + 1] = [Vocab.bos, *t]
        out[i, :len(t) + 1] = [*t, Vocab.eos]
        valid[i, :len(t) + 1] = True
    return inp, out, valid


def seq2seq_step(memory, decoder: Seq2SeqDecoder, targets, rng=None, training: bool = False,
                 reduction: str = "mean"):
    """Teacher-forced cross-entropy of ``targets`` (id lists without specials).

    ``reduction="none"`` returns the per-position loss tensor ``[B, L]`` with
    zeros at padding.
    """
    memory = F.as_tensor(memory)
    if memory.ndim == 2:
        memory = memory.reshape(1, *memory.shape)
    inp, out, valid = teacher_forcing_batch(targets, decoder.config.vocab_size)
    logp = F.log_softmax(decoder(inp, memory, rng, training), axis=-1)
    bi, li = np.nonzero(valid)
    picked = logp[bi, li, out[bi, li]]
    if reduction == "none":
        full = np.zeros(valid.shape)
        full[bi, li] = -picked.data
        return Tensor(full)
    return -picked.mean()


def greedy_decode(memory, decoder: Seq2SeqDecoder, max_len: int = 64) -> list[int]:
    """Argmax decoding from ``<s>`` until ``</s>`` or ``max_len`` tokens; returns ids without specials."""
    if max_len < 1:
        raise ConfigError(f"max_len must be >= 1, got {max_len}")
    memory = F.as_tensor(memory)
    if memory.ndim == 2:
        memory = memory.reshape(1, *memory.shape)
    seq = [Vocab.bos]
    with no_grad():
        for _ in range(max_len):
            logits = decoder(np.array([seq]), memory).data[0, -1]
            nxt = int(np.argmax(logits))
            if nxt == Vocab.eos:
                break
            seq.append(nxt)
    return seq[1:]
