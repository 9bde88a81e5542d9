"""Order-c Markov model over token sequences with Laplace smoothing.

Each training sequence is padded with c-1 begin sentinels and one end
sentinel, so repairs of different lengths stay comparable (a word's
score includes the probability of stopping).  Transition probabilities
are fully Laplace-smoothed: (count + 1) / (total + |vocab|), which keeps
every per-context distribution proper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BOS = "<s>"
EOS = "</s>"


@dataclass(frozen=True)
class NGramModel:
    c: int
    vocab: tuple  # user tokens plus the two sentinels
    counts: dict  # c-token window -> count
    totals: dict  # (c-1)-token context -> count

    def __post_init__(self):
        if self.c < 2:
            raise ValueError("order must be at least 2")
        if BOS not in self.vocab or EOS not in self.vocab:
            raise ValueError("vocabulary must include the sentinels")


def _check_tokens(tokens):
    for t in tokens:
        if t in (BOS, EOS):
            raise ValueError(f"reserved sentinel {t!r} in user tokens")
        if not t or any(ch.isspace() for ch in t):
            raise ValueError(f"token {t!r} is empty or contains whitespace")


def _make(c, user_tokens, counts):
    vocab = tuple(sorted(set(user_tokens))) + (BOS, EOS)
    totals = {}
    for window, n in counts.items():
        totals[window[:-1]] = totals.get(window[:-1], 0) + n
    return NGramModel(c=c, vocab=vocab, counts=dict(counts), totals=totals)


def train(corpus, c: int = 4, alphabet=None) -> NGramModel:
    """Count every length-c window of each padded corpus sequence.

    `alphabet` widens the vocabulary beyond the tokens seen in the
    corpus (unseen tokens fall back to the smoothing mass)."""
    corpus = [tuple(seq) for seq in corpus]
    if not corpus:
        raise ValueError("empty corpus")
    if c < 2:
        raise ValueError("order must be at least 2")
    user_tokens = set()
    for seq in corpus:
        _check_tokens(seq)
        user_tokens.update(seq)
    if alphabet is not None:
        _check_tokens(alphabet)
        user_tokens.update(alphabet)

    counts = {}
    for seq in corpus:
        padded = (BOS,) * (c - 1) + seq + (EOS,)
        for i in range(len(padded) - c + 1):
            window = padded[i : i + c]
            counts[window] = counts.get(window, 0) + 1
    return _make(c, user_tokens, counts)


def uniform(alphabet, c: int = 2) -> NGramModel:
    """Zero-count model: every continuation is equally likely."""
    _check_tokens(alphabet)
    if not alphabet:
        raise ValueError("empty alphabet")
    return _make(c, set(alphabet), {})


def widen(m: NGramModel, alphabet) -> NGramModel:
    """Extend the vocabulary without touching counts."""
    extra = set(alphabet) - set(m.vocab)
    if not extra:
        return m
    _check_tokens(extra)
    user = [t for t in m.vocab if t not in (BOS, EOS)]
    return _make(m.c, set(user) | extra, m.counts)


def logprob(m: NGramModel, ctx, s: str) -> float:
    """Smoothed ln P(s | ctx) for a (c-1)-token context."""
    ctx = tuple(ctx)
    if len(ctx) != m.c - 1:
        raise ValueError(f"context must have {m.c - 1} tokens")
    if s not in m.vocab:
        raise KeyError(f"token {s!r} not in vocabulary")
    num = m.counts.get(ctx + (s,), 0) + 1
    den = m.totals.get(ctx, 0) + len(m.vocab)
    return math.log(num / den)


def score(m: NGramModel, sigma) -> float:
    """Log probability of a full sequence, end transition included."""
    sigma = tuple(sigma)
    if not sigma:
        raise ValueError("empty sequence")
    padded = (BOS,) * (m.c - 1) + sigma + (EOS,)
    return sum(
        logprob(m, padded[i : i + m.c - 1], padded[i + m.c - 1])
        for i in range(len(padded) - m.c + 1)
    )


def to_text(m: NGramModel) -> str:
    """Serialize: header `ngram <c> <vocab-size>`, one vocabulary line,
    then one tab-separated count line per window."""
    lines = [f"ngram {m.c} {len(m.vocab)}", " ".join(m.vocab)]
    for window in sorted(m.counts):
        lines.append(" ".join(window) + "\t" + str(m.counts[window]))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> NGramModel:
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith("ngram "):
        raise ValueError("not an ngram model file")
    _, c_str, size_str = lines[0].split()
    c = int(c_str)
    vocab = tuple(lines[1].split())
    if len(vocab) != int(size_str):
        raise ValueError("vocabulary size mismatch")
    counts = {}
    for line in lines[2:]:
        if not line.strip():
            continue
        window_str, count_str = line.split("\t")
        window = tuple(window_str.split())
        if len(window) != c:
            raise ValueError(f"window {window!r} has wrong length")
        for t in window:
            if t not in vocab:
                raise ValueError(f"window token {t!r} not in vocabulary")
        counts[window] = int(count_str)
    user = [t for t in vocab if t not in (BOS, EOS)]
    m = _make(c, user, counts)
    if m.vocab != vocab:
        raise ValueError("vocabulary is not in canonical order")
    return m
