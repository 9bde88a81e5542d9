"""Context-free grammars: parsing, Chomsky Normal Form, CYK membership.

Grammars are epsilon-free by fiat: empty alternatives are rejected at
parse time and never reintroduced.  CNF conversion is deterministic so
that golden tests over the produced rule sets are stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gre


@dataclass(frozen=True)
class Cfg:
    terminals: tuple
    nonterminals: tuple
    productions: tuple  # of (lhs, rhs-tuple)
    start: str

    def __post_init__(self):
        declared = set(self.terminals) | set(self.nonterminals)
        for lhs, rhs in self.productions:
            if lhs not in self.nonterminals:
                raise ValueError(f"undeclared lhs {lhs!r}")
            if not rhs:
                raise ValueError(f"empty right-hand side for {lhs!r}")
            for sym in rhs:
                if sym not in declared:
                    raise ValueError(f"undeclared symbol {sym!r} in rule for {lhs!r}")
        if not any(lhs == self.start for lhs, _ in self.productions):
            raise ValueError(f"start symbol {self.start!r} has no production")


class GrammarError(ValueError):
    pass


def parse_grammar(text: str) -> Cfg:
    """Parse a grammar description.

    One rule per line, `LHS -> alt1 | alt2`, symbols separated by
    whitespace.  Symbols appearing on any left-hand side are
    nonterminals, everything else is a terminal.  The first LHS is the
    start symbol.  Lines starting with `#` and blank lines are ignored.
    """
    rules = []  # (lhs, [rhs alternatives])
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "->" not in line:
            raise GrammarError(f"line {lineno}: missing '->'")
        lhs_part, rhs_part = line.split("->", 1)
        lhs = lhs_part.strip()
        if not lhs or len(lhs.split()) != 1:
            raise GrammarError(f"line {lineno}: bad left-hand side {lhs!r}")
        for alt in rhs_part.split("|"):
            rhs = tuple(alt.split())
            if not rhs:
                raise GrammarError(f"line {lineno}: empty alternative (epsilon rules are not supported)")
            rules.append((lhs, rhs))
    if not rules:
        raise GrammarError("empty grammar")

    nonterminals, terminals = [], []
    lhs_set = {lhs for lhs, _ in rules}
    for lhs, rhs in rules:
        if lhs not in nonterminals:
            nonterminals.append(lhs)
        for sym in rhs:
            if sym not in lhs_set and sym not in terminals:
                terminals.append(sym)
    return Cfg(
        terminals=tuple(terminals),
        nonterminals=tuple(nonterminals),
        productions=tuple(rules),
        start=rules[0][0],
    )


@dataclass(frozen=True)
class CnfGrammar:
    """Binarized grammar: every rule is w -> x z or w -> t.

    Nonterminals are indexed [0, |V|); rule sets use indices for
    nonterminals and labels for terminals.
    """

    terminals: tuple
    nonterminals: tuple
    binary_rules: frozenset  # of (w, x, z) index triples
    unit_rules: frozenset  # of (w, token) pairs
    start: int
    by_pair: dict = field(compare=False, hash=False, repr=False, default=None)
    by_token: dict = field(compare=False, hash=False, repr=False, default=None)

    def __post_init__(self):
        if not self.nonterminals:
            raise ValueError("grammar has no nonterminals")
        if not self.unit_rules:
            raise ValueError("no terminal rules: the language is empty")
        by_pair, by_token = {}, {}
        for w, x, z in sorted(self.binary_rules):
            by_pair.setdefault((x, z), []).append(w)
        for w, t in sorted(self.unit_rules):
            by_token.setdefault(t, []).append(w)
        object.__setattr__(self, "by_pair", by_pair)
        object.__setattr__(self, "by_token", by_token)

    def index_of(self, name: str) -> int:
        return self.nonterminals.index(name)

    def rule_names(self) -> set:
        nt = self.nonterminals
        names = {(nt[w], nt[x], nt[z]) for w, x, z in self.binary_rules}
        names |= {(nt[w], t) for w, t in self.unit_rules}
        return names


def _fresh(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def to_cnf(g: Cfg) -> CnfGrammar:
    """Language-preserving conversion to Chomsky Normal Form.

    Order: wrap the start symbol if it occurs on any right-hand side,
    eliminate nonterminal unit chains by transitive closure, extract
    terminals from long rules, then binarize.  Fresh names are derived
    from the parent rule and position, so the output is reproducible.
    """
    taken = set(g.nonterminals) | set(g.terminals)
    productions = list(g.productions)
    start = g.start
    if any(start in rhs for _, rhs in productions):
        wrapped = _fresh(start + "0", taken)
        productions.insert(0, (wrapped, (start,)))
        start = wrapped

    nonterminal_set = {lhs for lhs, _ in productions}

    # Transitive closure over unit chains A -> B, then copy each target's
    # non-unit productions up to every chain source.
    unit_targets = {lhs: set() for lhs in nonterminal_set}
    for lhs, rhs in productions:
        if len(rhs) == 1 and rhs[0] in nonterminal_set:
            unit_targets[lhs].add(rhs[0])
    changed = True
    while changed:
        changed = False
        for lhs, targets in unit_targets.items():
            extra = set()
            for t in targets:
                extra |= unit_targets.get(t, set())
            extra -= targets
            extra.discard(lhs)
            if extra:
                targets |= extra
                changed = True

    expanded = []
    for lhs, rhs in productions:
        if len(rhs) == 1 and rhs[0] in nonterminal_set:
            continue
        expanded.append((lhs, rhs))
    for lhs in sorted(unit_targets):
        for target in sorted(unit_targets[lhs]):
            for plhs, prhs in productions:
                if plhs == target and not (len(prhs) == 1 and prhs[0] in nonterminal_set):
                    if (lhs, prhs) not in expanded:
                        expanded.append((lhs, prhs))

    # Terminal extraction: terminals inside rules of length >= 2 get a
    # dedicated nonterminal.
    term_nt = {}
    extracted = []
    for lhs, rhs in expanded:
        if len(rhs) == 1:
            extracted.append((lhs, rhs))
            continue
        new_rhs = []
        for sym in rhs:
            if sym in nonterminal_set:
                new_rhs.append(sym)
            else:
                if sym not in term_nt:
                    term_nt[sym] = _fresh(f"t.{sym}", taken)
                new_rhs.append(term_nt[sym])
        extracted.append((lhs, tuple(new_rhs)))
    for sym in sorted(term_nt):
        extracted.append((term_nt[sym], (sym,)))
        nonterminal_set.add(term_nt[sym])

    # Binarization: split long rules left to right.
    final_rules = []
    per_lhs_counter = {}
    for lhs, rhs in extracted:
        if len(rhs) <= 2:
            final_rules.append((lhs, rhs))
            continue
        idx = per_lhs_counter.get(lhs, 0)
        per_lhs_counter[lhs] = idx + 1
        prev = lhs
        for pos in range(len(rhs) - 2):
            helper = _fresh(f"{lhs}.{idx}.{pos}", taken)
            nonterminal_set.add(helper)
            final_rules.append((prev, (rhs[pos], helper)))
            prev = helper
        final_rules.append((prev, (rhs[-2], rhs[-1])))

    order = []
    if start not in order:
        order.append(start)
    for lhs, rhs in final_rules:
        for sym in (lhs,) + rhs:
            if sym in nonterminal_set and sym not in order:
                order.append(sym)
    index = {name: i for i, name in enumerate(order)}

    binary, units = set(), set()
    for lhs, rhs in final_rules:
        if len(rhs) == 2:
            binary.add((index[lhs], index[rhs[0]], index[rhs[1]]))
        elif rhs[0] in nonterminal_set:
            raise AssertionError("unit nonterminal rule survived normalization")
        else:
            units.add((index[lhs], rhs[0]))

    return CnfGrammar(
        terminals=tuple(g.terminals),
        nonterminals=tuple(order),
        binary_rules=frozenset(binary),
        unit_rules=frozenset(units),
        start=index[start],
    )


def regex_to_cfg(e: gre.Gre) -> Cfg:
    """Equivalent grammar for an (epsilon, conjunction)-free term: one
    nonterminal per distinct subterm, atom/concatenation/disjunction
    rules only."""
    if e is gre.EMPTY or e is gre.EPSILON:
        raise ValueError("term must be nonempty and epsilon-free")

    names = {}
    order = []
    stack = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            if id(node) not in names:
                names[id(node)] = f"N{len(order)}"
                order.append(node)
            continue
        if id(node) in names:
            continue
        if node.kind in (gre.EMPTY_KIND, gre.EPSILON_KIND, gre.AND_KIND):
            raise ValueError(f"unsupported subterm kind {node.kind!r}")
        stack.append((node, True))
        if node.right is not None:
            stack.append((node.right, False))
        if node.left is not None:
            stack.append((node.left, False))

    productions = []
    terminals = []
    for node in order:
        lhs = names[id(node)]
        if node.kind == gre.ATOMS_KIND:
            for t in sorted(node.tokens):
                productions.append((lhs, (t,)))
                if t not in terminals:
                    terminals.append(t)
        elif node.kind == gre.CAT_KIND:
            productions.append((lhs, (names[id(node.left)], names[id(node.right)])))
        else:  # or
            productions.append((lhs, (names[id(node.left)],)))
            productions.append((lhs, (names[id(node.right)],)))

    start = names[id(e)]
    nonterminals = tuple(names[id(n)] for n in order)
    # Start-first ordering keeps Cfg conventions (start has a production).
    productions.sort(key=lambda p: (p[0] != start,))
    return Cfg(
        terminals=tuple(terminals),
        nonterminals=nonterminals,
        productions=tuple(productions),
        start=start,
    )


def cyk_accepts(g: CnfGrammar, sigma: Sequence[str]) -> bool:
    """CYK membership for a nonempty token sequence."""
    n = len(sigma)
    if n == 0:
        raise ValueError("empty input: epsilon-free grammars cannot accept it")
    for t in sigma:
        if t not in g.by_token and t not in g.terminals:
            raise KeyError(f"unknown token {t!r}")

    # chart[i][j] is a nonterminal bitmask for the span sigma[i:j].
    chart = [[0] * (n + 1) for _ in range(n + 1)]
    for i, t in enumerate(sigma):
        mask = 0
        for w in g.by_token.get(t, ()):
            mask |= 1 << w
        chart[i][i + 1] = mask

    pair_rules = [(x, z, ws) for (x, z), ws in g.by_pair.items()]
    for span in range(2, n + 1):
        for i in range(n - span + 1):
            j = i + span
            mask = 0
            row_i = chart[i]
            for k in range(i + 1, j):
                left = row_i[k]
                if not left:
                    continue
                right = chart[k][j]
                if not right:
                    continue
                for x, z, ws in pair_rules:
                    if left >> x & 1 and right >> z & 1:
                        for w in ws:
                            mask |= 1 << w
            chart[i][j] = mask
    return bool(chart[0][n] >> g.start & 1)
