import random

import pytest

from parserepair import gre, ngram
from parserepair.grammar import cyk_accepts, parse_grammar, to_cnf
from parserepair.pipeline import (
    RadiusExhausted,
    RepairConfig,
    RepairInstance,
    brute_force_repairs,
    build_intersection,
    evaluate,
    load_grammar,
    parse_dataset,
    pick_radius,
    precision_at_k,
    repair,
)

from oracles import random_cnf, random_sigma, repair_set

DYCK = to_cnf(parse_grammar("S -> S S | ( S ) | ( )"))


def test_repair_auto_radius_example():
    result = repair(DYCK, ("(", ")", "("))
    assert result.exhausted
    words = {r.tokens for r in result.repairs}
    assert words == {("(", ")"), ("(", ")", "(", ")")}
    assert all(r.distance == 1 for r in result.repairs)


def test_repair_valid_input_self():
    result = repair(DYCK, ("(", ")"))
    assert result.exhausted
    assert len(result.repairs) == 1
    assert result.repairs[0].tokens == ("(", ")")
    assert result.repairs[0].distance == 0


def test_repair_explicit_radius():
    result = repair(DYCK, ("(", "("), RepairConfig(radius=1))
    assert {r.tokens for r in result.repairs} == {("(", ")")}


def test_repair_slack_widens_ball():
    tight = repair(DYCK, ("(", ")", "("), RepairConfig(slack=0))
    loose = repair(DYCK, ("(", ")", "("), RepairConfig(slack=1, k=100))
    assert {r.tokens for r in tight.repairs} < {r.tokens for r in loose.repairs}
    assert max(r.distance for r in loose.repairs) == 2


def test_repair_radius_exhausted():
    with pytest.raises(RadiusExhausted):
        repair(DYCK, ("(",) * 12, RepairConfig(radius_limit=2))
    with pytest.raises(RadiusExhausted) as exc:
        repair(DYCK, ("(", "(", "("), RepairConfig(radius=1))
    assert exc.value.largest == 1


def test_repair_input_validation():
    with pytest.raises(ValueError):
        repair(DYCK, ())
    with pytest.raises(KeyError):
        repair(DYCK, ("(", "zzz"))


def test_pick_radius():
    assert pick_radius(DYCK, ("(", ")", "("), RepairConfig()) == 1
    assert pick_radius(DYCK, ("(", ")", "("), RepairConfig(slack=2)) == 3
    assert pick_radius(DYCK, ("(", ")", "("), RepairConfig(radius=4)) == 4


def test_repairs_always_valid_and_in_radius():
    rng = random.Random(61)
    done = 0
    while done < 20:
        g = random_cnf(rng, max_nts=4)
        sigma = random_sigma(rng, g, max_len=5)
        if cyk_accepts(g, sigma):
            continue
        d = rng.randint(1, 2)
        try:
            result = repair(g, sigma, RepairConfig(radius=d, k=50))
        except RadiusExhausted:
            continue
        for r in result.repairs:
            assert cyk_accepts(g, r.tokens)
            assert r.distance <= d
        done += 1


def test_build_intersection_empty():
    assert build_intersection(DYCK, ("(", "(", "("), 1) is gre.EMPTY


def test_brute_force_matches_oracle():
    rng = random.Random(62)
    for _ in range(25):
        g = random_cnf(rng, max_nts=4)
        sigma = random_sigma(rng, g, max_len=4)
        d = rng.randint(0, 2)
        assert brute_force_repairs(g, sigma, d) == repair_set(g, sigma, d)


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_repairs(DYCK, ("(",) * 8, 3, guard=100)


def test_precision_at_k():
    dataset = [
        RepairInstance(("x",), ("a",)),
        RepairInstance(("x",), ("b",)),
        RepairInstance(("x",), ("c",)),
        RepairInstance(("x",), ("d",)),
    ]
    ranked = [
        [("a",), ("z",)],  # hit at rank 1
        [("z",), ("b",)],  # hit at rank 2
        [("z",), ("y",)],  # miss
        [],  # miss
    ]
    assert precision_at_k(ranked, dataset) == 0.5
    assert precision_at_k(ranked, dataset, k=1) == 0.25
    assert precision_at_k(ranked, dataset, k=2) == 0.5
    with pytest.raises(ValueError):
        precision_at_k(ranked[:2], dataset)
    with pytest.raises(ValueError):
        precision_at_k([], [])


def test_evaluate_outcome_categories():
    dataset = [
        RepairInstance(("(", ")"), ("(", ")")),  # already valid
        RepairInstance(("(", ")", "("), ("(", ")", "(", ")")),  # ranked
        RepairInstance(("(", ")", "("), ("(", "(", ")", ")", "(", ")")),  # outside radius
        RepairInstance(("(",) * 10, ("(", ")")),  # radius exhausted
    ]
    outcomes = evaluate(DYCK, dataset, RepairConfig(radius_limit=2))
    cats = [o.category for o in outcomes]
    assert cats == ["already-valid", "ranked", "fix-outside-radius", "radius-exhausted"]
    assert outcomes[0].rank == 1 and outcomes[0].distance == 0
    assert outcomes[1].rank is not None and outcomes[1].radius == 1
    assert outcomes[3].rank is None


def test_evaluate_jobs_order_stable():
    dataset = [
        RepairInstance(("(", ")", "("), ("(", ")")),
        RepairInstance(("(", "("), ("(", ")")),
        RepairInstance(("(", ")"), ("(", ")")),
    ]
    seq = evaluate(DYCK, dataset)
    par = evaluate(DYCK, dataset, jobs=3)
    assert seq == par
    with pytest.raises(ValueError):
        evaluate(DYCK, [])


def test_parse_dataset():
    text = "# comment\n( ) (\t( )\n\n( (\t( )\n"
    data = parse_dataset(text)
    assert data == [
        RepairInstance(("(", ")", "("), ("(", ")")),
        RepairInstance(("(", "("), ("(", ")")),
    ]
    with pytest.raises(ValueError):
        parse_dataset("a b c\n")
    with pytest.raises(ValueError):
        parse_dataset("a\tb\tc\n")


def test_load_grammar_bundled_and_path(tmp_path):
    g = load_grammar("dyck")
    assert cyk_accepts(g, ("(", ")"))
    for name in ("arith", "mini"):
        load_grammar(name)
    p = tmp_path / "tiny.cfg"
    p.write_text("S -> a\n")
    g2 = load_grammar(str(p))
    assert cyk_accepts(g2, ("a",))
    with pytest.raises(KeyError):
        load_grammar("no-such-grammar")
