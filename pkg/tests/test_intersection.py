import itertools
import math
import random

import numpy as np
import pytest

from parserepair import gre
from parserepair.automata import lev_build, singleton_nfa, template_nfa
from parserepair.grammar import cyk_accepts, parse_grammar, to_cnf
from parserepair.intersection import (
    cfl_fixpt,
    chart_text,
    complete,
    decide_early,
    led,
    nonempty,
    reg_build,
    salomaa_intersect,
)

from oracles import all_strings, random_cnf, random_sigma, repair_set

DYCK = to_cnf(parse_grammar("S -> S S | ( S ) | ( )"))
ARITH = to_cnf(parse_grammar("S -> N O N\nO -> + | ×\nN -> 0 | 1"))


def gre_words(e):
    return {gre.enum(e, i) for i in range(gre.tree_count(e))}


def test_chart_on_singleton_is_cyk():
    rng = random.Random(21)
    for _ in range(30):
        g = random_cnf(rng)
        sigma = random_sigma(rng, g, max_len=5)
        a = singleton_nfa(sigma, g.terminals)
        chart = cfl_fixpt(g, a)
        assert nonempty(chart, a, g) == cyk_accepts(g, sigma)


def test_chart_invariants():
    a = lev_build(("(", ")", "("), 1, DYCK.terminals)
    chart = cfl_fixpt(DYCK, a)
    # chart entries imply reachability, upper triangle only
    set_entries = np.argwhere(chart.bits)
    for p, r, _ in set_entries:
        assert p < r
        assert chart.reach[p, r]
    assert nonempty(chart, a, DYCK)


def test_round_bound():
    rng = random.Random(22)
    for _ in range(40):
        g = random_cnf(rng)
        sigma = random_sigma(rng, g, max_len=6)
        a = lev_build(sigma, rng.randint(0, 2), g.terminals)
        chart = cfl_fixpt(g, a)
        bound = math.ceil(math.log2(len(a.states) * len(g.nonterminals)))
        assert chart.rounds <= bound


def test_parallel_sequential_bit_identical():
    rng = random.Random(23)
    for _ in range(30):
        g = random_cnf(rng)
        sigma = random_sigma(rng, g, max_len=5)
        a = lev_build(sigma, rng.randint(0, 2), g.terminals)
        c1 = cfl_fixpt(g, a, parallel=True)
        c2 = cfl_fixpt(g, a, parallel=False)
        assert np.array_equal(c1.bits, c2.bits)
        assert c1.rounds == c2.rounds


def test_decide_early_agreement():
    rng = random.Random(24)
    for _ in range(60):
        g = random_cnf(rng)
        sigma = random_sigma(rng, g, max_len=5)
        a = lev_build(sigma, rng.randint(0, 2), g.terminals)
        chart = cfl_fixpt(g, a)
        assert decide_early(g, a) == nonempty(chart, a, g)


def test_nonempty_examples():
    a1 = lev_build(("(", ")", "("), 1, DYCK.terminals)
    assert nonempty(cfl_fixpt(DYCK, a1), a1, DYCK)
    a0 = lev_build(("(", "(", "("), 0, DYCK.terminals)
    assert not nonempty(cfl_fixpt(DYCK, a0), a0, DYCK)


def test_reg_build_matches_oracle():
    rng = random.Random(25)
    done = 0
    while done < 40:
        g = random_cnf(rng)
        sigma = random_sigma(rng, g, max_len=5)
        d = rng.randint(0, 2)
        a = lev_build(sigma, d, g.terminals)
        chart = cfl_fixpt(g, a)
        want = repair_set(g, sigma, d)
        if not nonempty(chart, a, g):
            assert not want, (g, sigma, d)
            continue
        e = reg_build(chart, g, a)
        assert gre_words(e) == want, (sigma, d)
        done += 1


def test_reg_build_on_empty_raises():
    a = lev_build(("(", "(", "("), 0, DYCK.terminals)
    chart = cfl_fixpt(DYCK, a)
    with pytest.raises(ValueError):
        reg_build(chart, DYCK, a)


def test_reg_build_singleton_recognition():
    sigma = ("(", "(", ")", ")")
    a = singleton_nfa(sigma, DYCK.terminals)
    chart = cfl_fixpt(DYCK, a)
    e = reg_build(chart, DYCK, a)
    assert gre_words(e) == {sigma}


def test_salomaa_singleton():
    a = singleton_nfa(("(", ")"), DYCK.terminals)
    gi = salomaa_intersect(DYCK, a)
    gic = to_cnf(gi)
    assert cyk_accepts(gic, ("(", ")"))
    for w in all_strings(DYCK.terminals, 4):
        assert cyk_accepts(gic, w) == (w == ("(", ")"))


def test_salomaa_lev_example():
    a = lev_build(("(", ")", "("), 1, DYCK.terminals)
    gi = to_cnf(salomaa_intersect(DYCK, a))
    words = {w for w in all_strings(DYCK.terminals, 4) if cyk_accepts(gi, w)}
    assert words == {("(", ")"), ("(", ")", "(", ")")}


def test_salomaa_nonemptiness_agreement():
    rng = random.Random(26)
    for _ in range(40):
        g = random_cnf(rng, max_nts=4)
        sigma = random_sigma(rng, g, max_len=4)
        a = lev_build(sigma, rng.randint(0, 1), g.terminals)
        gi = salomaa_intersect(g, a)
        assert (gi is not None) == decide_early(g, a)


def test_led():
    assert led(DYCK, ("(", ")"), 3) == 0
    assert led(DYCK, ("(", ")", "("), 3) == 1
    assert led(DYCK, ("(", "(", "("), 0) is None
    assert led(DYCK, ("(", "(", "("), 3) == 2  # e.g. ( ( ) ) via one sub + one insert
    with pytest.raises(ValueError):
        led(DYCK, (), 1)


def test_led_agrees_with_oracle():
    rng = random.Random(27)
    for _ in range(30):
        g = random_cnf(rng, max_nts=4)
        sigma = random_sigma(rng, g, max_len=4)
        want = None
        for d in range(0, 3):
            if repair_set(g, sigma, d):
                want = d
                break
        assert led(g, sigma, 2) == want, (g, sigma)


def test_complete_arith():
    e = complete(ARITH, ("1", "_", "_"))
    assert gre_words(e) == {
        ("1", "+", "0"),
        ("1", "+", "1"),
        ("1", "×", "0"),
        ("1", "×", "1"),
    }


def test_complete_no_holes_and_all_holes():
    e = complete(DYCK, ("(", ")"))
    assert gre_words(e) == {("(", ")")}
    e = complete(DYCK, ("_", "_"))
    assert gre_words(e) == {("(", ")")}
    assert complete(DYCK, (")", "_")) is gre.EMPTY
    with pytest.raises(ValueError):
        complete(DYCK, ())


def test_chart_text_rendering():
    a = singleton_nfa(("(", ")"), DYCK.terminals)
    text = chart_text(cfl_fixpt(DYCK, a), DYCK)
    assert "■" in text and "□" in text
    assert text.count("\n\n") == len(DYCK.nonterminals) - 1
