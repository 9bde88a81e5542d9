"""Star-free generalized regular expressions over lexical tokens.

Terms are hash-consed into a process-wide arena: structurally equal
subterms are represented by a single node, so identity comparison (`is`)
doubles as structural equality and per-node memo tables (nullability,
tree counts, derivatives) are shared between everything built in the
same process.

The algebra is deliberately small: empty language, empty word, finite
token sets (a disjunction of single tokens), concatenation, disjunction
and conjunction.  There is no Kleene star; every term denotes a finite
language.  Conjunction exists only for membership-style queries and is
rejected by the generation-oriented operations (follow/choose/count/enum).
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Iterator, Sequence

EMPTY_KIND = "empty"
EPSILON_KIND = "eps"
ATOMS_KIND = "atoms"
CAT_KIND = "cat"
OR_KIND = "or"
AND_KIND = "and"

_MISSING = object()


class Gre:
    """One interned term node. Do not instantiate directly; use the
    constructor functions (`atoms`, `cat`, `alt`, `both`)."""

    __slots__ = (
        "kind",
        "left",
        "right",
        "tokens",
        "_nullable",
        "_count",
        "_follow",
        "_derivs",
    )

    def __init__(self, kind, left=None, right=None, tokens=None):
        self.kind = kind
        self.left = left
        self.right = right
        self.tokens = tokens
        self._nullable = None
        self._count = None
        self._follow = None
        self._derivs = {}

    def __repr__(self):
        return f"Gre({render(self)})"


_arena: dict = {}


def _node(kind, left=None, right=None, tokens=None) -> Gre:
    key = (kind, left, right, tokens)
    found = _arena.get(key)
    if found is None:
        found = _arena.setdefault(key, Gre(kind, left, right, tokens))
    return found


EMPTY = _node(EMPTY_KIND)
EPSILON = _node(EPSILON_KIND)


def atoms(tokens: Iterable[str]) -> Gre:
    """Disjunction of single tokens; the token set must be nonempty."""
    ts = frozenset(tokens)
    if not ts:
        raise ValueError("empty atom set")
    return _node(ATOMS_KIND, tokens=ts)


def cat(x: Gre, z: Gre) -> Gre:
    if x is EMPTY or z is EMPTY:
        return EMPTY
    if x is EPSILON:
        return z
    if z is EPSILON:
        return x
    return _node(CAT_KIND, x, z)


def alt(x: Gre, z: Gre) -> Gre:
    if x is EMPTY:
        return z
    if z is EMPTY:
        return x
    return _node(OR_KIND, x, z)


def both(x: Gre, z: Gre) -> Gre:
    return _node(AND_KIND, x, z)


def alt_all(terms: Sequence[Gre]) -> Gre:
    """Left fold of `alt` over a sequence (empty sequence gives EMPTY)."""
    acc = EMPTY
    for t in terms:
        acc = alt(acc, t)
    return acc


def cat_all(terms: Sequence[Gre]) -> Gre:
    acc = EPSILON
    for t in terms:
        acc = cat(acc, t)
    return acc


def word(tokens: Sequence[str]) -> Gre:
    """Term denoting exactly one token sequence."""
    return cat_all([atoms([t]) for t in tokens])


def _postorder_pending(root: Gre, computed: Callable[[Gre], bool]) -> Iterator[Gre]:
    """Children-first traversal over the term DAG, skipping any subterm
    for which `computed` already holds."""
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            yield node
            continue
        if id(node) in seen or computed(node):
            continue
        seen.add(id(node))
        stack.append((node, True))
        if node.left is not None:
            stack.append((node.left, False))
        if node.right is not None:
            stack.append((node.right, False))


def nullable(e: Gre) -> bool:
    """True iff the empty word belongs to L(e)."""
    if e._nullable is None:
        for n in _postorder_pending(e, lambda m: m._nullable is not None):
            if n.kind == EPSILON_KIND:
                n._nullable = True
            elif n.kind in (EMPTY_KIND, ATOMS_KIND):
                n._nullable = False
            elif n.kind == OR_KIND:
                n._nullable = n.left._nullable or n.right._nullable
            else:  # cat, and
                n._nullable = n.left._nullable and n.right._nullable
    return e._nullable


def derivative(e: Gre, a: str) -> Gre:
    """Quotient of L(e) by the prefix token `a`: {b : a.b in L(e)}."""
    stack = [e]
    while stack:
        node = stack[-1]
        if a in node._derivs:
            stack.pop()
            continue
        kind = node.kind
        if kind in (EMPTY_KIND, EPSILON_KIND):
            node._derivs[a] = EMPTY
            stack.pop()
        elif kind == ATOMS_KIND:
            node._derivs[a] = EPSILON if a in node.tokens else EMPTY
            stack.pop()
        elif kind == CAT_KIND:
            dx = node.left._derivs.get(a, _MISSING)
            if dx is _MISSING:
                stack.append(node.left)
                continue
            if nullable(node.left):
                dz = node.right._derivs.get(a, _MISSING)
                if dz is _MISSING:
                    stack.append(node.right)
                    continue
                node._derivs[a] = alt(cat(dx, node.right), dz)
            else:
                node._derivs[a] = cat(dx, node.right)
            stack.pop()
        else:  # or, and
            dx = node.left._derivs.get(a, _MISSING)
            dz = node.right._derivs.get(a, _MISSING)
            if dx is _MISSING:
                stack.append(node.left)
                continue
            if dz is _MISSING:
                stack.append(node.right)
                continue
            combine = alt if kind == OR_KIND else both
            node._derivs[a] = combine(dx, dz)
            stack.pop()
    return e._derivs[a]


def matches(e: Gre, sigma: Sequence[str]) -> bool:
    cur = e
    for a in sigma:
        cur = derivative(cur, a)
        if cur is EMPTY:
            return False
    return nullable(cur)


def follow(e: Gre) -> frozenset:
    """Tokens `a` for which the derivative of e by `a` is nonempty."""
    if e is EMPTY:
        raise ValueError("follow of the empty language")
    if e._follow is None:
        for n in _postorder_pending(e, lambda m: m._follow is not None):
            if n.kind == EPSILON_KIND:
                n._follow = frozenset()
            elif n.kind == ATOMS_KIND:
                n._follow = n.tokens
            elif n.kind == OR_KIND:
                n._follow = n.left._follow | n.right._follow
            elif n.kind == CAT_KIND:
                f = n.left._follow
                if nullable(n.left):
                    f = f | n.right._follow
                n._follow = f
            elif n.kind == EMPTY_KIND:
                raise ValueError("follow over a term containing the empty language")
            else:
                raise ValueError("follow is undefined for conjunction")
    return e._follow


def tree_count(e: Gre) -> int:
    """Number of distinct parse trees of e (an upper bound on its word
    count). Empty counts 0 and the empty word counts 1, so the smart
    constructor simplifications are count-preserving."""
    if e._count is None:
        for n in _postorder_pending(e, lambda m: m._count is not None):
            if n.kind == EMPTY_KIND:
                n._count = 0
            elif n.kind == EPSILON_KIND:
                n._count = 1
            elif n.kind == ATOMS_KIND:
                n._count = len(n.tokens)
            elif n.kind == CAT_KIND:
                n._count = n.left._count * n.right._count
            elif n.kind == OR_KIND:
                n._count = n.left._count + n.right._count
            else:
                raise ValueError("tree counting is undefined for conjunction")
    return e._count


def enum(e: Gre, n: int) -> tuple:
    """Yield of the n-th tree under the mixed-radix tree/integer bijection.

    Indices range over [0, tree_count(e)); distinct indices can yield the
    same word when the term is ambiguous.
    """
    total = tree_count(e)
    if not 0 <= n < total:
        raise IndexError(f"tree index {n} out of range [0, {total})")
    out = []
    stack = [(e, n)]
    while stack:
        node, i = stack.pop()
        kind = node.kind
        if kind == EPSILON_KIND:
            continue
        if kind == ATOMS_KIND:
            out.append(sorted(node.tokens)[i])
        elif kind == CAT_KIND:
            cz = tree_count(node.right)
            stack.append((node.right, i % cz))
            stack.append((node.left, i // cz))
        else:  # or
            cx = tree_count(node.left)
            if i < cx:
                stack.append((node.left, i))
            else:
                stack.append((node.right, i - cx))
    return tuple(out)


def choose(e: Gre, pick: Callable | None = None) -> tuple:
    """Return one member of L(e). `pick` selects among sorted candidate
    tokens (or the end-of-word marker None when the residual is nullable);
    default picks the first candidate, random.Random instances also work."""
    if e is EMPTY:
        raise ValueError("cannot choose from the empty language")
    if pick is None:
        selector = lambda options: options[0]
    elif isinstance(pick, random.Random):
        selector = pick.choice
    else:
        selector = pick
    out = []
    cur = e
    while True:
        options = []
        if nullable(cur):
            options.append(None)
        options.extend(sorted(follow(cur)))
        chosen = selector(options)
        if chosen is None:
            return tuple(out)
        out.append(chosen)
        cur = derivative(cur, chosen)


def language(e: Gre, limit: int | None = None) -> set:
    """Distinct-word set of e by exhausting the tree/integer bijection."""
    total = tree_count(e)
    if limit is not None and total > limit:
        raise ValueError(f"tree count {total} exceeds limit {limit}")
    return {enum(e, i) for i in range(total)}


def render(e: Gre) -> str:
    """Parenthesized debug form; `parse` round-trips it."""
    parts = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            parts.append(node)
            continue
        kind = node.kind
        if kind == EMPTY_KIND:
            parts.append("∅")
        elif kind == EPSILON_KIND:
            parts.append("ε")
        elif kind == ATOMS_KIND:
            parts.append("{" + ",".join(sorted(node.tokens)) + "}")
        else:
            op = {CAT_KIND: "·", OR_KIND: "∨", AND_KIND: "∧"}[kind]
            stack.extend([")", node.right, op, node.left, "("])
    return "".join(parts)


def parse(text: str) -> Gre:
    """Parse the `render` format back into a term (test fixtures only)."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def term() -> Gre:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise ValueError("unexpected end of input")
        ch = text[pos]
        if ch == "∅":
            pos += 1
            return EMPTY
        if ch == "ε":
            pos += 1
            return EPSILON
        if ch == "{":
            end = text.index("}", pos)
            toks = [t.strip() for t in text[pos + 1 : end].split(",")]
            pos = end + 1
            return atoms(toks)
        if ch == "(":
            pos += 1
            left = term()
            skip_ws()
            op = text[pos]
            pos += 1
            right = term()
            skip_ws()
            if text[pos] != ")":
                raise ValueError(f"expected ')' at {pos}")
            pos += 1
            if op == "·":
                return cat(left, right)
            if op == "∨":
                return alt(left, right)
            if op == "∧":
                return both(left, right)
            raise ValueError(f"unknown operator {op!r}")
        raise ValueError(f"unexpected character {ch!r} at {pos}")

    result = term()
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input at {pos}")
    return result
