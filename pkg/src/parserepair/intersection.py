"""Finite intersection of a CNF grammar with an acyclic symbolic NFA.

The decision pass fills a boolean chart indexed by state pair and
nonterminal.  Each outer round closes the chart under binary-rule
compositions in which at least one operand comes from the previous
round's chart (an inner loop run to stability on snapshots).  By the
heavy-path decomposition of derivation trees, every entry whose
derivation spans at most 2^t arc steps is present after round t: the
spine's light subtrees span at most half and sit in the previous chart,
and the inner loop walks the spine itself.  Spans cannot exceed |Q|-1
on an acyclic automaton, so the round counter stays within
ceil(log2(|Q||V|)).  A second pass rebuilds, only over set chart
entries, the generalized regular expression denoting every string of
the intersection.

A direct product-grammar construction (Salomaa's triple-nonterminal
form) is included as an independent oracle for differential testing; it
is exponentially more wasteful and only meant for small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gre
from .automata import SymbolicNfa, adjacency, concretize, lev_build, reachability, template_nfa
from .grammar import Cfg, CnfGrammar, cyk_accepts


@dataclass
class ParseChart:
    bits: np.ndarray  # bool, |Q| x |Q| x |V|
    reach: np.ndarray  # bool, |Q| x |Q| transitive closure
    rounds: int  # outer closure rounds used to converge


def _check_inputs(g: CnfGrammar, a: SymbolicNfa):
    if not a.is_ordered():
        raise ValueError("automaton must be topologically ordered (run order_states)")
    unknown = set(g.terminals) - set(a.alphabet)
    # the automaton alphabet may be a superset; predicates are evaluated
    # over the automaton's own alphabet


def _initial_chart(g: CnfGrammar, a: SymbolicNfa) -> np.ndarray:
    nq, nv = len(a.states), len(g.nonterminals)
    pos = a.position()
    m = np.zeros((nq, nq, nv), dtype=bool)
    for s, pred, t in a.arcs:
        si, ti = pos[s], pos[t]
        for tok in pred.concrete(a.alphabet):
            for w in g.by_token.get(tok, ()):
                m[si, ti, w] = True
    return m


def _round_parallel(m: np.ndarray, g: CnfGrammar) -> np.ndarray:
    """One outer round: compose the evolving chart with the round's
    input chart (either side) until no inner step adds an entry.  Every
    inner step reads snapshots only; all rules are batched into one
    stacked matrix product."""
    rules = sorted(g.binary_rules)
    if not rules:
        return m
    ws = np.array([w for w, _, _ in rules])
    xs = np.array([x for _, x, _ in rules])
    zs = np.array([z for _, _, z in rules])
    # ws is nondecreasing (rules are sorted), so reduceat groups lhs runs
    starts = np.flatnonzero(np.r_[True, ws[1:] != ws[:-1]])
    lhs = ws[starts]
    # work in (|V|, |Q|, |Q|) layout; the round's fixed-side operands
    # are gathered once up front
    mt = np.ascontiguousarray(m.transpose(2, 0, 1))
    mf = mt.astype(np.float32)
    mxs, mzs = mf[xs], mf[zs]
    nt = mt
    while True:
        nf = nt.astype(np.float32)
        # n@m + m@n fused into one stacked product via block stacking
        left = np.concatenate((nf[xs], mxs), axis=2)
        right = np.concatenate((mzs, nf[zs]), axis=1)
        prod = (left @ right) > 0
        grouped = np.logical_or.reduceat(prod, starts, axis=0)
        new = nt.copy()
        new[lhs] |= grouped
        if np.array_equal(new, nt):
            return np.ascontiguousarray(new.transpose(1, 2, 0))
        nt = new


def _round_sequential(m: np.ndarray, g: CnfGrammar, reach: np.ndarray) -> np.ndarray:
    nq = m.shape[0]
    rules = sorted(g.binary_rules)
    n = m
    while True:
        new = n.copy()
        for p in range(nq):
            for r in range(p + 1, nq):
                if not reach[p, r]:
                    continue
                mids = [q for q in range(p + 1, r + 1) if reach[p, q] and reach[q, r]]
                for w, x, z in rules:
                    if new[p, r, w]:
                        continue
                    for q in mids:
                        if (n[p, q, x] and m[q, r, z]) or (m[p, q, x] and n[q, r, z]):
                            new[p, r, w] = True
                            break
        if np.array_equal(new, n):
            return new
        n = new


def cfl_fixpt(g: CnfGrammar, a: SymbolicNfa, parallel: bool = True) -> ParseChart:
    """Complete parse chart for L(g) over paths of `a`.

    Entry (q, q', v) is set iff nonterminal v derives some token path
    from q to q'.  Both execution modes take identical snapshot-based
    steps and therefore produce bit-identical results.
    """
    _check_inputs(g, a)
    reach = reachability(adjacency(a))
    m = _initial_chart(g, a)
    bound = max(1, math.ceil(math.log2(len(a.states) * len(g.nonterminals))))
    rounds = 0
    while True:
        new = _round_parallel(m, g) if parallel else _round_sequential(m, g, reach)
        if np.array_equal(new, m):
            break
        m = new
        rounds += 1
        if rounds > bound:
            raise AssertionError("fixpoint exceeded the logarithmic round bound")
    return ParseChart(bits=m, reach=reach, rounds=rounds)


def nonempty(chart: ParseChart, a: SymbolicNfa, g: CnfGrammar) -> bool:
    pos = a.position()
    start = pos[a.initial]
    return any(bool(chart.bits[start, pos[f], g.start]) for f in a.finals)


def decide_early(g: CnfGrammar, a: SymbolicNfa) -> bool:
    """Same verdict as nonempty(cfl_fixpt(g, a)), but checks the accept
    entry after every squaring round and escapes as soon as it lights up."""
    _check_inputs(g, a)
    pos = a.position()
    start = pos[a.initial]
    final_idx = [pos[f] for f in a.finals]
    m = _initial_chart(g, a)

    def accepted(mm):
        return any(bool(mm[start, f, g.start]) for f in final_idx)

    if accepted(m):
        return True
    bound = max(1, math.ceil(math.log2(len(a.states) * len(g.nonterminals))))
    for _ in range(bound + 1):
        new = _round_parallel(m, g)
        if accepted(new):
            return True
        if np.array_equal(new, m):
            return False
        m = new
    raise AssertionError("fixpoint exceeded the logarithmic round bound")


def reg_build(chart: ParseChart, g: CnfGrammar, a: SymbolicNfa) -> gre.Gre:
    """Generalized regular expression denoting L(g) ∩ L(a).

    Visits only chart entries whose boolean bit is set, restricting
    split points to two-hop parseable states.  Every parse tree of the
    intersection appears exactly once in the result (root splits are
    disjoint), so tree counting over the result measures intersection
    ambiguity.
    """
    bits = chart.bits
    pos = a.position()
    start_idx = pos[a.initial]
    nq = len(a.states)

    # tokens contributing to unit-rule leaves per (q, q', v)
    leaf = {}
    for s, pred, t in a.arcs:
        si, ti = pos[s], pos[t]
        for tok in pred.concrete(a.alphabet):
            for w in g.by_token.get(tok, ()):
                leaf.setdefault((si, ti, w), set()).add(tok)

    parseable = bits.any(axis=2)
    rules_of = {}
    for w, x, z in sorted(g.binary_rules):
        rules_of.setdefault(w, []).append((x, z))

    memo = {}

    def build(p: int, r: int, w: int) -> gre.Gre:
        key = (p, r, w)
        found = memo.get(key)
        if found is not None:
            return found
        if not bits[p, r, w]:
            memo[key] = gre.EMPTY
            return gre.EMPTY
        toks = leaf.get(key)
        term = gre.atoms(toks) if toks else gre.EMPTY
        mids = np.nonzero(parseable[p, :] & parseable[:, r])[0]
        for x, z in rules_of.get(w, ()):
            for q in mids:
                if bits[p, q, x] and bits[q, r, z]:
                    term = gre.alt(term, gre.cat(build(p, q, x), build(q, r, z)))
        memo[key] = term
        return term

    parts = []
    for f in sorted(pos[f] for f in a.finals):
        if bits[start_idx, f, g.start]:
            parts.append(build(start_idx, f, g.start))
    root = gre.alt_all(parts)
    if root is gre.EMPTY:
        raise ValueError("empty intersection: nothing to build")
    return root


def salomaa_intersect(g: CnfGrammar, a: SymbolicNfa) -> Cfg | None:
    """Direct product grammar with one nonterminal per (state, v, state)
    triple, trimmed of non-generating and unreachable symbols.

    Returns None when the intersection is empty (an epsilon-free Cfg
    cannot represent the empty language).  Testing oracle only: the
    untrimmed grammar is cubic in |Q|.
    """
    ac = concretize(a)
    pos = ac.position()
    names = g.nonterminals

    def nt(p, w, r):
        return f"{pos[p]}|{names[w]}|{pos[r]}"

    start = "S∩"
    productions = []
    for f in sorted(ac.finals, key=pos.get):
        productions.append((start, (nt(ac.initial, g.start, f),)))
    by_endpoint_token = {}
    for s, pred, t in ac.arcs:
        tok = pred.token
        for w in g.by_token.get(tok, ()):
            productions.append((nt(s, w, t), (tok,)))
    states = list(ac.states)
    for w, x, z in sorted(g.binary_rules):
        for p in states:
            for q in states:
                for r in states:
                    productions.append((nt(p, w, r), (nt(p, x, q), nt(q, z, r))))

    terminals = set(g.terminals)

    # drop non-generating symbols
    generating = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in productions:
            if lhs not in generating and all(s in terminals or s in generating for s in rhs):
                generating.add(lhs)
                changed = True
    if start not in generating:
        return None
    kept = [
        (lhs, rhs)
        for lhs, rhs in productions
        if lhs in generating and all(s in terminals or s in generating for s in rhs)
    ]

    # drop symbols unreachable from the start
    reachable = {start}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in kept:
            if lhs in reachable:
                for s in rhs:
                    if s not in terminals and s not in reachable:
                        reachable.add(s)
                        changed = True
    kept = [(lhs, rhs) for lhs, rhs in kept if lhs in reachable]

    nonterminals = [start]
    used_terminals = []
    for lhs, rhs in kept:
        if lhs not in nonterminals:
            nonterminals.append(lhs)
        for s in rhs:
            if s in terminals and s not in used_terminals:
                used_terminals.append(s)
    kept.sort(key=lambda p: (p[0] != start,))
    return Cfg(
        terminals=tuple(used_terminals),
        nonterminals=tuple(nonterminals),
        productions=tuple(kept),
        start=start,
    )


def led(g: CnfGrammar, sigma, d_limit: int) -> int | None:
    """Language edit distance: least d <= d_limit whose edit ball around
    sigma meets L(g); None when the budget is exhausted."""
    if not sigma:
        raise ValueError("empty input string")
    if cyk_accepts(g, sigma):
        return 0
    for d in range(1, d_limit + 1):
        ball = lev_build(sigma, d, g.terminals)
        if decide_early(g, ball):
            return d
    return None


def complete(g: CnfGrammar, porous) -> gre.Gre:
    """Intersection of a hole template with L(g); EMPTY when no
    completion parses."""
    if not porous:
        raise ValueError("empty template")
    tpl = template_nfa(porous, g.terminals)
    chart = cfl_fixpt(g, tpl)
    if not nonempty(chart, tpl, g):
        return gre.EMPTY
    return reg_build(chart, g, tpl)


def chart_text(chart: ParseChart, g: CnfGrammar) -> str:
    """Debug grid: one block per nonterminal, filled/empty squares."""
    nq = chart.bits.shape[0]
    blocks = []
    for v, name in enumerate(g.nonterminals):
        rows = ["".join("■" if chart.bits[p, r, v] else "□" for r in range(nq)) for p in range(nq)]
        blocks.append(name + "\n" + "\n".join(rows))
    return "\n\n".join(blocks) + "\n"
