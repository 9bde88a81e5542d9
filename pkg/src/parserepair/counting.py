"""Exact word counting for finite languages given as terms.

A term is compiled to an epsilon-arc-free NFA by structural induction,
determinized by subset construction, minimized with Brzozowski's double
reversal, and counted with the transfer-matrix method over exact Python
integers.  The minimal DFA's word count is the true language size;
tree_count on the original term only bounds it from above (ambiguity).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import gre
from .automata import SymbolicNfa, eq, lev_build, order_states
from .grammar import CnfGrammar
from .intersection import cfl_fixpt, nonempty, reg_build


@dataclass(frozen=True)
class Dfa:
    states: tuple
    delta: dict  # (state, token) -> state; partial
    initial: object
    finals: frozenset

    def accepts(self, sigma) -> bool:
        q = self.initial
        for tok in sigma:
            q = self.delta.get((q, tok))
            if q is None:
                return False
        return q in self.finals


def gre_to_nfa(e: gre.Gre, merge_or: bool = False) -> SymbolicNfa:
    """Compile a nonempty (epsilon, conjunction)-free term to an NFA.

    Three cases: token sets become a two-state fan, concatenation wires
    the left fragment's finals to the right fragment's start arcs, and
    disjunction gets a fresh shared start.  With merge_or the two branch
    final sets are additionally funneled into one fresh final state;
    without it the final sets are simply unioned.  Shared subterms are
    instantiated afresh per occurrence (state reuse across contexts
    would splice unrelated paths).
    """
    if e is gre.EMPTY or e is gre.EPSILON:
        raise ValueError("term must be nonempty and epsilon-free")

    counter = itertools.count()
    frags = []  # (start, arcs set, finals frozenset)
    work = [(e, False)]
    while work:
        node, done = work.pop()
        if not done:
            if node.kind in (gre.EMPTY_KIND, gre.EPSILON_KIND, gre.AND_KIND):
                raise ValueError(f"unsupported subterm kind {node.kind!r}")
            work.append((node, True))
            if node.kind in (gre.CAT_KIND, gre.OR_KIND):
                work.append((node.right, False))
                work.append((node.left, False))
            continue
        if node.kind == gre.ATOMS_KIND:
            s, f = next(counter), next(counter)
            frags.append((s, {(s, eq(t), f) for t in node.tokens}, frozenset({f})))
        elif node.kind == gre.CAT_KIND:
            zs, zarcs, zfin = frags.pop()
            xs, xarcs, xfin = frags.pop()
            arcs = set(xarcs)
            for src, pred, dst in zarcs:
                if src == zs:
                    for fx in xfin:
                        arcs.add((fx, pred, dst))
                else:
                    arcs.add((src, pred, dst))
            frags.append((xs, arcs, zfin))
        else:  # or
            zs, zarcs, zfin = frags.pop()
            xs, xarcs, xfin = frags.pop()
            start = next(counter)
            arcs = set()
            for src, pred, dst in xarcs | zarcs:
                arcs.add((start if src in (xs, zs) else src, pred, dst))
            finals = xfin | zfin
            if merge_or:
                merged = next(counter)
                arcs = {(s, p, merged if t in finals else t) for s, p, t in arcs}
                finals = frozenset({merged})
            frags.append((start, arcs, finals))

    start, arcs, finals = frags[0]
    states = {start} | {s for s, _, t in arcs for s in (s, t)}
    alphabet = set()
    for _, pred, _ in arcs:
        alphabet.add(pred.token)
    nfa = SymbolicNfa(
        states=tuple(sorted(states)),
        arcs=frozenset(arcs),
        initials=(start,),
        finals=finals,
        alphabet=tuple(sorted(alphabet)),
    )
    return order_states(nfa)


def determinize(a: SymbolicNfa) -> Dfa:
    """Subset construction over concretized arcs; only reachable subsets
    are materialized and the dead state is left implicit (partial map).
    States are renamed to discovery-order integers, so the result is
    deterministic."""
    by_src = {}
    for s, pred, t in a.arcs:
        for tok in pred.concrete(a.alphabet):
            by_src.setdefault(s, {}).setdefault(tok, set()).add(t)

    start = frozenset(a.initials)
    names = {start: 0}
    order = [start]
    queue = [start]
    delta = {}
    while queue:
        subset = queue.pop(0)
        moves = {}
        for s in subset:
            for tok, targets in by_src.get(s, {}).items():
                moves.setdefault(tok, set()).update(targets)
        for tok in sorted(moves):
            target = frozenset(moves[tok])
            if target not in names:
                names[target] = len(order)
                order.append(target)
                queue.append(target)
            delta[(names[subset], tok)] = names[target]
    finals = frozenset(names[sub] for sub in order if sub & a.finals)
    return Dfa(states=tuple(range(len(order))), delta=delta, initial=0, finals=finals)


def reverse(a: SymbolicNfa) -> SymbolicNfa:
    """Mirror-language NFA: arcs flipped, finals become initials."""
    return SymbolicNfa(
        states=tuple(reversed(a.states)),
        arcs=frozenset((t, p, s) for s, p, t in a.arcs),
        initials=tuple(sorted(a.finals, key=a.position().get)),
        finals=frozenset(a.initials),
        alphabet=a.alphabet,
    )


def dfa_to_nfa(d: Dfa, alphabet=None) -> SymbolicNfa:
    if alphabet is None:
        alphabet = sorted({tok for _, tok in d.delta})
    arcs = frozenset((s, eq(tok), t) for (s, tok), t in d.delta.items())
    return SymbolicNfa(
        states=d.states,
        arcs=arcs,
        initials=(d.initial,),
        finals=d.finals,
        alphabet=tuple(alphabet),
    )


def minimize(a: SymbolicNfa) -> Dfa:
    """Unique minimal DFA via Brzozowski's algorithm:
    determinize(reverse(determinize(reverse(a))))."""
    half = determinize(reverse(a))
    return determinize(reverse(dfa_to_nfa(half, a.alphabet)))


def count_words(d: Dfa) -> int:
    """Transfer-matrix word count: sum over path lengths i of
    A^i[initial, final], where A[q,q'] is the number of tokens moving
    q to q'.  Exact integers throughout; raises on cyclic input."""
    n = len(d.states)
    pos = {q: i for i, q in enumerate(d.states)}
    a = [[0] * n for _ in range(n)]
    for (q, _tok), q2 in d.delta.items():
        a[pos[q]][pos[q2]] += 1

    vec = [0] * n
    vec[pos[d.initial]] = 1
    final_idx = [pos[f] for f in d.finals]
    total = sum(vec[f] for f in final_idx)
    for _ in range(n - 1):
        vec = [sum(vec[i] * a[i][j] for i in range(n) if vec[i]) for j in range(n)]
        total += sum(vec[f] for f in final_idx)
    if any(sum(vec[i] * a[i][j] for i in range(n) if vec[i]) for j in range(n)):
        raise ValueError("cycle detected: the language is not finite")
    return total


def volume(g: CnfGrammar, sigma, d: int) -> int:
    """Exact number of distinct valid strings within edit distance d of
    sigma; 0 when the intersection is empty."""
    if not sigma:
        raise ValueError("empty input string")
    ball = lev_build(sigma, d, g.terminals)
    chart = cfl_fixpt(g, ball)
    if not nonempty(chart, ball, g):
        return 0
    e = reg_build(chart, g, ball)
    return count_words(minimize(gre_to_nfa(e)))


def canonical(d: Dfa) -> tuple:
    """Canonical form under state renaming: breadth-first relabeling
    from the initial state with tokens visited in sorted order.  Two
    DFAs with all states reachable are isomorphic iff their canonical
    forms are equal."""
    tokens_of = {}
    for (q, tok), _ in d.delta.items():
        tokens_of.setdefault(q, []).append(tok)
    names = {d.initial: 0}
    queue = [d.initial]
    edges = []
    while queue:
        q = queue.pop(0)
        for tok in sorted(tokens_of.get(q, ())):
            t = d.delta[(q, tok)]
            if t not in names:
                names[t] = len(names)
                queue.append(t)
            edges.append((names[q], tok, names[t]))
    finals = tuple(sorted(names[f] for f in d.finals if f in names))
    return (len(names), tuple(edges), finals)


def isomorphic(d1: Dfa, d2: Dfa) -> bool:
    return canonical(d1) == canonical(d2)
