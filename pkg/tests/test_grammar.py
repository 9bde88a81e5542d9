import random

import pytest

from parserepair import gre
from parserepair.grammar import (
    Cfg,
    CnfGrammar,
    GrammarError,
    cyk_accepts,
    parse_grammar,
    regex_to_cfg,
    to_cnf,
)

from oracles import all_strings, cnf_language, random_cnf, random_gre

DYCK = "S -> S S | ( S ) | ( )"


def cfg_language(g: Cfg, max_len):
    """Direct derivation closure over an arbitrary (not necessarily CNF)
    grammar, used to check conversions."""
    lang = {v: set() for v in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            pieces = []
            ok = True
            for sym in rhs:
                if sym in g.nonterminals:
                    if not lang[sym]:
                        ok = False
                        break
                    pieces.append(lang[sym])
                else:
                    pieces.append({(sym,)})
            if not ok:
                continue
            agg = {()}
            for piece in pieces:
                agg = {x + y for x in agg for y in piece if len(x + y) <= max_len}
            for w in agg:
                if w and w not in lang[lhs]:
                    lang[lhs].add(w)
                    changed = True
    return lang[g.start]


def test_parse_grammar_basic():
    g = parse_grammar(DYCK)
    assert g.start == "S"
    assert g.nonterminals == ("S",)
    assert set(g.terminals) == {"(", ")"}
    assert len(g.productions) == 3


def test_parse_grammar_errors():
    with pytest.raises(GrammarError):
        parse_grammar("")
    with pytest.raises(GrammarError):
        parse_grammar("S = a")
    with pytest.raises(GrammarError):
        parse_grammar("S -> a | ")  # epsilon alternative
    with pytest.raises(GrammarError):
        parse_grammar("S T -> a")


def test_parse_grammar_comments_and_blanks():
    g = parse_grammar("# heading\n\nS -> a\n")
    assert g.productions == (("S", ("a",)),)


def test_to_cnf_shapes():
    g = to_cnf(parse_grammar(DYCK))
    for w, x, z in g.binary_rules:
        assert 0 <= w < len(g.nonterminals)
    for w, t in g.unit_rules:
        assert t in g.terminals
    # start wrapper added because S appears on a right-hand side
    assert g.nonterminals[g.start] == "S0"


def test_to_cnf_language_equality():
    cases = [
        DYCK,
        "S -> N O N\nO -> + | ×\nN -> 0 | 1",
        "S -> a S b | a b",
        "S -> A\nA -> B\nB -> a | a B",
        "S -> a b c d",
    ]
    for text in cases:
        g = parse_grammar(text)
        cnf = to_cnf(g)
        want = cfg_language(g, 8)
        got = {w for w in cnf_language(cnf, 8)[cnf.start]}
        assert got == want, text


def test_to_cnf_deterministic():
    a = to_cnf(parse_grammar(DYCK))
    b = to_cnf(parse_grammar(DYCK))
    assert a == b


def test_cnf_requires_unit_rules():
    with pytest.raises(ValueError):
        CnfGrammar(
            terminals=("a",),
            nonterminals=("S",),
            binary_rules=frozenset({(0, 0, 0)}),
            unit_rules=frozenset(),
            start=0,
        )


def test_cyk_against_derivation_closure():
    rng = random.Random(2)
    for _ in range(30):
        g = random_cnf(rng)
        lang = cnf_language(g, 4)[g.start]
        for w in all_strings(g.terminals, 4):
            assert cyk_accepts(g, w) == (w in lang), (g, w)


def test_cyk_errors():
    g = to_cnf(parse_grammar(DYCK))
    with pytest.raises(ValueError):
        cyk_accepts(g, ())
    with pytest.raises(KeyError):
        cyk_accepts(g, ("(", "?"))


def test_regex_to_cfg_language():
    rng = random.Random(8)
    for _ in range(25):
        e = random_gre(rng, ("a", "b"))
        g = to_cnf(regex_to_cfg(e))
        lang = cnf_language(g, 7)[g.start]
        for w in all_strings(("a", "b"), 7):
            assert (w in lang) == gre.matches(e, w)


def test_regex_to_cfg_rejects_epsilon_and_conjunction():
    with pytest.raises(ValueError):
        regex_to_cfg(gre.EPSILON)
    with pytest.raises(ValueError):
        regex_to_cfg(gre.both(gre.atoms("a"), gre.atoms("a")))


def test_cfg_validation():
    with pytest.raises(ValueError):
        Cfg(terminals=("a",), nonterminals=("S",), productions=(("S", ()),), start="S")
    with pytest.raises(ValueError):
        Cfg(terminals=("a",), nonterminals=("S",), productions=(("T", ("a",)),), start="S")
    with pytest.raises(ValueError):
        Cfg(terminals=("a",), nonterminals=("S", "T"), productions=(("T", ("a",)),), start="S")
