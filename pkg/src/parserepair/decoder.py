"""Best-first decoding of a finite term into ranked repair candidates.

A global max-priority queue holds partial trajectories (prefix, residual
derivative, accumulated log score).  Expanding a trajectory takes one
derivative per continuation token and adds the Markov transition score;
nullable residuals additionally emit a completed word whose score
includes the end-sentinel transition, so words of different lengths
compete fairly.  Prefix scores are not admissible heuristics, hence no
optimality claim before exhaustion: the contract is exhaustion-or-budget.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

from . import gre, ngram


@dataclass(frozen=True)
class Trajectory:
    prefix: tuple
    residual: gre.Gre
    logscore: float


@dataclass(frozen=True)
class Repair:
    tokens: tuple
    logscore: float
    distance: int | None = None


@dataclass(frozen=True)
class RepairResult:
    repairs: tuple  # of Repair, best first
    exhausted: bool  # whole language decoded (no budget stop, no eviction)
    expansions: int = 0


def edit_distance(a, b) -> int:
    """Levenshtein distance over token sequences."""
    a, b = tuple(a), tuple(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def reg_dcode(
    e: gre.Gre,
    m: ngram.NGramModel,
    k: int,
    max_expansions: int | None = None,
    max_seconds: float | None = None,
    queue_cap: int = 10**6,
    sigma=None,
) -> RepairResult:
    """Top-k words of L(e) ranked by n-gram score.

    Ties break lexicographically by vocabulary index for
    reproducibility.  The queue is capped; evicting a trajectory
    forfeits the exhaustion guarantee and clears the flag.  When sigma
    is given each repair is annotated with its edit distance from it.
    """
    if e is gre.EMPTY:
        raise ValueError("cannot decode the empty language")
    if k < 1:
        raise ValueError("k must be positive")

    idx = {t: i for i, t in enumerate(m.vocab)}
    pad = (ngram.BOS,) * (m.c - 1)

    def order_key(prefix):
        return tuple(idx[t] for t in prefix)

    # heap of (-logscore, lexicographic key, prefix, residual)
    heap = [(0.0, (), (), e)]
    completed = {}  # prefix -> logscore
    expansions = 0
    evicted = False
    deadline = time.monotonic() + max_seconds if max_seconds is not None else None
    exhausted = False

    while heap:
        if max_expansions is not None and expansions >= max_expansions:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
        neg, _, prefix, residual = heapq.heappop(heap)
        expansions += 1
        score = -neg
        ctx = (pad + prefix)[-(m.c - 1) :]
        if gre.nullable(residual):
            completed[prefix] = score + ngram.logprob(m, ctx, ngram.EOS)
        for tok in sorted(gre.follow(residual)):
            nxt = gre.derivative(residual, tok)
            if nxt is gre.EMPTY:
                continue
            new_prefix = prefix + (tok,)
            new_score = score + ngram.logprob(m, ctx, tok)
            heapq.heappush(heap, (-new_score, order_key(new_prefix), new_prefix, nxt))
        if len(heap) > queue_cap:
            heap = heapq.nsmallest(queue_cap, heap)
            heapq.heapify(heap)
            evicted = True
    else:
        exhausted = not evicted

    ranked = sorted(completed.items(), key=lambda kv: (-kv[1], order_key(kv[0])))
    repairs = tuple(
        Repair(
            tokens=word,
            logscore=s,
            distance=edit_distance(word, sigma) if sigma is not None else None,
        )
        for word, s in ranked[:k]
    )
    return RepairResult(repairs=repairs, exhausted=exhausted, expansions=expansions)


def enumerate_all(e: gre.Gre, limit: int) -> list:
    """Distinct-word list of e in sorted order; refuses terms whose tree
    count exceeds the limit."""
    if e is gre.EMPTY:
        raise ValueError("cannot enumerate the empty language")
    total = gre.tree_count(e)
    if total > limit:
        raise ValueError(f"tree count {total} exceeds limit {limit}")
    return sorted({gre.enum(e, i) for i in range(total)})
