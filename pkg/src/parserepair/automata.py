"""Acyclic symbolic NFAs: Levenshtein balls, string rows, hole templates.

Arcs carry token predicates (equals / not-equals / any) instead of one
arc per concrete token, which keeps edit-ball automata small without
changing their language.  All automata here are epsilon-free and
acyclic; the state list order doubles as the topological order once
`order_states` has run (the constructors already emit ordered states).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Predicate:
    kind: str  # "eq" | "ne" | "any"
    token: str | None = None

    def accepts(self, s: str) -> bool:
        if self.kind == "eq":
            return s == self.token
        if self.kind == "ne":
            return s != self.token
        return True

    def concrete(self, alphabet: Sequence[str]) -> tuple:
        return tuple(s for s in alphabet if self.accepts(s))

    def __str__(self):
        if self.kind == "eq":
            return f"={self.token}"
        if self.kind == "ne":
            return f"!{self.token}"
        return "*"


ANY = Predicate("any")


def eq(token: str) -> Predicate:
    return Predicate("eq", token)


def ne(token: str) -> Predicate:
    return Predicate("ne", token)


@dataclass(frozen=True)
class SymbolicNfa:
    states: tuple  # hashable labels; list position is the state order
    arcs: frozenset  # of (src, Predicate, dst)
    initials: tuple
    finals: frozenset
    alphabet: tuple
    coords: dict = field(compare=False, hash=False, default=None)  # Levenshtein (i, j) per state

    @property
    def initial(self):
        return self.initials[0]

    def position(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def is_ordered(self) -> bool:
        pos = self.position()
        return all(pos[s] < pos[t] for s, _, t in self.arcs)


def lev_build(sigma: Sequence[str], d_max: int, alphabet: Sequence[str]) -> SymbolicNfa:
    """Levenshtein ball automaton: accepts exactly the strings within
    edit distance d_max of sigma.

    States are (i, j) with i consumed reference tokens and j edits
    spent, ordered by (i + j, i) which every arc strictly increases.
    """
    n = len(sigma)
    if n == 0:
        raise ValueError("empty input string")
    if d_max < 0:
        raise ValueError("negative edit distance")
    alphabet = tuple(alphabet)
    missing = set(sigma) - set(alphabet)
    if missing:
        raise KeyError(f"tokens not in alphabet: {sorted(missing)}")

    arcs = set()
    for i in range(0, n + 1):
        for j in range(1, d_max + 1):
            # insertion; at the right boundary there is no next reference
            # token to exclude, so the predicate is unrestricted
            pred = ne(sigma[i]) if i < n else ANY
            arcs.add(((i, j - 1), pred, (i, j)))
    for i in range(1, n + 1):
        for j in range(1, d_max + 1):
            # substitution admits every token (a substitution by sigma[i-1]
            # itself burns an edit without changing the language); this
            # redundancy is the source of alignment ambiguity, which tree
            # counting must be able to observe
            arcs.add(((i - 1, j - 1), ANY, (i, j)))
    for i in range(1, n + 1):
        for j in range(0, d_max + 1):
            arcs.add(((i - 1, j), eq(sigma[i - 1]), (i, j)))  # match
    for d in range(1, d_max + 1):
        for i in range(d + 1, n + 1):
            for j in range(d, d_max + 1):
                arcs.add(((i - d - 1, j - d), eq(sigma[i - 1]), (i, j)))  # deletion skip

    states = tuple(
        sorted(
            ((i, j) for i in range(n + 1) for j in range(d_max + 1)),
            key=lambda s: (s[0] + s[1], s[0]),
        )
    )
    finals = frozenset((i, j) for (i, j) in states if abs(n - i + j) <= d_max)
    return SymbolicNfa(
        states=states,
        arcs=frozenset(arcs),
        initials=((0, 0),),
        finals=finals,
        alphabet=alphabet,
        coords={s: s for s in states},
    )


def singleton_nfa(sigma: Sequence[str], alphabet: Sequence[str] | None = None) -> SymbolicNfa:
    """Chain accepting exactly sigma."""
    if not sigma:
        raise ValueError("empty input string")
    alphabet = tuple(alphabet) if alphabet is not None else tuple(dict.fromkeys(sigma))
    arcs = frozenset((i, eq(t), i + 1) for i, t in enumerate(sigma))
    return SymbolicNfa(
        states=tuple(range(len(sigma) + 1)),
        arcs=arcs,
        initials=(0,),
        finals=frozenset({len(sigma)}),
        alphabet=alphabet,
    )


HOLE = "_"


def template_nfa(porous: Sequence[str], alphabet: Sequence[str]) -> SymbolicNfa:
    """Chain accepting every completion of a porous string, where `_`
    marks a hole filled by any token."""
    if not porous:
        raise ValueError("empty template")
    alphabet = tuple(alphabet)
    arcs = set()
    for i, t in enumerate(porous):
        if t == HOLE:
            arcs.add((i, ANY, i + 1))
        else:
            if t not in alphabet:
                raise KeyError(f"token {t!r} not in alphabet")
            arcs.add((i, eq(t), i + 1))
    return SymbolicNfa(
        states=tuple(range(len(porous) + 1)),
        arcs=frozenset(arcs),
        initials=(0,),
        finals=frozenset({len(porous)}),
        alphabet=alphabet,
    )


def range_template_nfa(
    prefix: Sequence[str],
    lo: int,
    hi: int,
    suffix: Sequence[str],
    alphabet: Sequence[str],
) -> SymbolicNfa:
    """Chain with a variable-width gap: accepts prefix, then between lo
    and hi arbitrary tokens, then suffix.  Equivalent to the union of
    the fixed-width hole templates for every gap size in [lo, hi]."""
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    prefix, suffix = tuple(prefix), tuple(suffix)
    alphabet = tuple(alphabet)
    for t in prefix + suffix:
        if t not in alphabet:
            raise KeyError(f"token {t!r} not in alphabet")
    k = len(prefix)
    arcs = set()
    for i, t in enumerate(prefix):
        arcs.add((i, eq(t), i + 1))
    # hole chain: state k + m means m gap tokens consumed
    for m in range(hi):
        arcs.add((k + m, ANY, k + m + 1))
    # the suffix is enterable from every admissible gap width
    suffix_base = k + hi
    for i, t in enumerate(suffix):
        arcs.add((suffix_base + i, eq(t), suffix_base + i + 1))
    if suffix:
        for m in range(lo, hi + 1):
            arcs.add((k + m, eq(suffix[0]), suffix_base + 1))
        finals = frozenset({suffix_base + len(suffix)})
    else:
        finals = frozenset(k + m for m in range(lo, hi + 1))
    n_states = suffix_base + len(suffix) + 1
    return SymbolicNfa(
        states=tuple(range(n_states)),
        arcs=frozenset(arcs),
        initials=(0,),
        finals=finals,
        alphabet=alphabet,
    )


def order_states(a: SymbolicNfa) -> SymbolicNfa:
    """Reorder states so every arc strictly ascends.

    Already-ordered automata are returned unchanged; otherwise a Kahn
    topological sort with the original index as tie-break is applied.
    Raises on cycles.
    """
    if a.is_ordered():
        return a
    pos = a.position()
    succs = {s: [] for s in a.states}
    indegree = {s: 0 for s in a.states}
    for s, _, t in a.arcs:
        succs[s].append(t)
        indegree[t] += 1
    import heapq

    ready = [pos[s] for s in a.states if indegree[s] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        s = a.states[heapq.heappop(ready)]
        order.append(s)
        for t in succs[s]:
            indegree[t] -= 1
            if indegree[t] == 0:
                heapq.heappush(ready, pos[t])
    if len(order) != len(a.states):
        raise ValueError("automaton contains a cycle")
    # keep initial states first among order-equivalent placements
    return SymbolicNfa(
        states=tuple(order),
        arcs=a.arcs,
        initials=a.initials,
        finals=a.finals,
        alphabet=a.alphabet,
        coords=a.coords,
    )


def adjacency(a: SymbolicNfa) -> np.ndarray:
    pos = a.position()
    m = np.zeros((len(a.states), len(a.states)), dtype=bool)
    for s, _, t in a.arcs:
        m[pos[s], pos[t]] = True
    return m


def reachability(m: np.ndarray) -> np.ndarray:
    """Transitive closure by repeated boolean squaring (the input is
    nilpotent, so at most ceil(log2 |Q|) rounds)."""
    r = m.copy()
    while True:
        nxt = r | (r @ r)
        if np.array_equal(nxt, r):
            return nxt
        r = nxt


def nfa_accepts(a: SymbolicNfa, sigma: Sequence[str]) -> bool:
    by_src = {}
    for s, pred, t in a.arcs:
        by_src.setdefault(s, []).append((pred, t))
    current = set(a.initials)
    for tok in sigma:
        nxt = set()
        for s in current:
            for pred, t in by_src.get(s, ()):
                if pred.accepts(tok):
                    nxt.add(t)
        if not nxt:
            return False
        current = nxt
    return bool(current & a.finals)


def concretize(a: SymbolicNfa) -> SymbolicNfa:
    """Expand symbolic predicates into one equals-arc per accepted token."""
    arcs = set()
    for s, pred, t in a.arcs:
        for tok in pred.concrete(a.alphabet):
            arcs.add((s, eq(tok), t))
    return SymbolicNfa(
        states=a.states,
        arcs=frozenset(arcs),
        initials=a.initials,
        finals=a.finals,
        alphabet=a.alphabet,
        coords=a.coords,
    )


def restrict(a: SymbolicNfa, keep: Iterable) -> SymbolicNfa:
    keep = set(keep)
    return SymbolicNfa(
        states=tuple(s for s in a.states if s in keep),
        arcs=frozenset((s, p, t) for s, p, t in a.arcs if s in keep and t in keep),
        initials=tuple(s for s in a.initials if s in keep),
        finals=frozenset(s for s in a.finals if s in keep),
        alphabet=a.alphabet,
        coords=a.coords,
    )


def prune(a: SymbolicNfa, g, sigma: Sequence[str]) -> SymbolicNfa:
    """Drop edit-ball states that provably cannot contribute to the
    intersection with g, given that sigma itself is not in L(g).

    Trailing zero-edit states are removable when no valid string starts
    with the corresponding prefix of sigma; leading max-edit states when
    no valid string ends with the corresponding suffix.  Because the
    zero-edit row is only reachable along itself (and the max-edit row
    only leaves through itself), one emptiness test at the boundary
    state covers the whole removed run.  Each test intersects a
    variable-gap template with the grammar covering every completion
    length the boundary state can still realize: the edit radius
    permits completions shorter or longer than the remainder of sigma,
    so a single exact-length template would not be sound.  For the same
    reason the exact-string
    state q_{n,0} cannot go unconditionally — repairs that extend sigma
    by pure insertions transit through it — so its removal is the s=0
    instance of the trailing-run test.
    """
    from . import intersection

    n = len(sigma)
    if not a.coords:
        raise ValueError("prune expects a Levenshtein-ball automaton")
    d_max = max(j for (_, j) in a.coords.values())
    removed = set()

    def hole_range_empty(prefix, center, suffix):
        lo = max(0, center - d_max)
        hi = center + d_max
        if not prefix and not suffix and hi == 0:
            return True  # only the empty string fits, and CNF excludes it
        try:
            gap = range_template_nfa(prefix, lo, hi, suffix, a.alphabet)
        except KeyError:
            return False
        return not intersection.decide_early(g, gap)

    def smallest_true(lo, hi, f):
        """Least argument where a monotone predicate holds, or None."""
        if not f(hi):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if f(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    # every test constrains the completion to total length n +- d_max, so
    # a longer dead prefix (or suffix) stays dead: both scans are monotone
    # and binary search finds the same boundary as a linear scan
    k = smallest_true(1, n, lambda k: hole_range_empty(sigma[:k], n - k, ()))
    if k is not None:
        removed |= {(i, 0) for i in range(k, n + 1)}
    if d_max > 0 and n >= 2:
        j = smallest_true(1, n - 1, lambda j: hole_range_empty((), n - j, sigma[n - j :]))
        if j is not None:
            removed |= {(i, d_max) for i in range(0, n - j + 1)}
    removed.discard((0, 0))
    return restrict(a, set(a.states) - removed)


def export_text(a: SymbolicNfa) -> str:
    """Debug listing: one `src  predicate  dst` line per arc, then
    initial/final markers."""
    pos = a.position()
    lines = []
    for s, pred, t in sorted(a.arcs, key=lambda arc: (pos[arc[0]], pos[arc[2]], str(arc[1]))):
        lines.append(f"{s}  {pred}  {t}")
    lines.append(f"initial {a.initial}")
    lines.append("final " + " ".join(str(s) for s in sorted(a.finals, key=pos.get)))
    return "\n".join(lines) + "\n"
