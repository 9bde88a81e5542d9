"""End-to-end repair orchestration, the brute-force oracle, and the
Precision@k evaluation harness.

A repair run chains the stages: build the edit-ball automaton (optionally
pruned), run the chart fixpoint, enlarge the radius if the intersection
is empty (auto mode), materialize the term, and decode ranked candidates.
Every emitted repair parses under the grammar and sits within the edit
radius by construction.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field, replace
from importlib import resources

from . import automata, decoder, gre, intersection, ngram
from .decoder import Repair, RepairResult, edit_distance
from .grammar import CnfGrammar, cyk_accepts, parse_grammar, to_cnf


@dataclass(frozen=True)
class RepairInstance:
    broken: tuple
    fixed: tuple

    def __post_init__(self):
        if not self.broken or not self.fixed:
            raise ValueError("instance sides must be nonempty")


@dataclass(frozen=True)
class RepairConfig:
    radius: int | None = None  # explicit edit radius; None selects auto mode
    slack: int = 0  # auto mode: radius = LED + slack
    radius_limit: int = 4  # auto mode gives up past this radius
    k: int = 10
    max_expansions: int | None = None
    max_seconds: float | None = None
    queue_cap: int = 10**6
    model: ngram.NGramModel | None = None  # None falls back to uniform
    prune: bool = True

    def __post_init__(self):
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.radius is not None and self.radius < 1:
            raise ValueError("explicit radius must be positive")


class RadiusExhausted(Exception):
    def __init__(self, largest: int):
        super().__init__(f"no valid string within edit distance {largest}")
        self.largest = largest


def _model_for(g: CnfGrammar, cfg: RepairConfig) -> ngram.NGramModel:
    if cfg.model is None:
        return ngram.uniform(g.terminals)
    return ngram.widen(cfg.model, g.terminals)


def _self_repair(g, sigma, cfg):
    m = _model_for(g, cfg)
    return RepairResult(
        repairs=(Repair(tokens=tuple(sigma), logscore=ngram.score(m, sigma), distance=0),),
        exhausted=True,
    )


def pick_radius(g: CnfGrammar, sigma, cfg: RepairConfig) -> int:
    """Edit radius for a known-invalid input: the explicit setting, or
    the language edit distance plus slack in auto mode."""
    if cfg.radius is not None:
        return cfg.radius
    d = intersection.led(g, sigma, cfg.radius_limit)
    if d is None:
        raise RadiusExhausted(cfg.radius_limit)
    return d + cfg.slack


def build_intersection(g: CnfGrammar, sigma, d: int, use_prune: bool = True) -> gre.Gre:
    """Term denoting every valid string within edit distance d of sigma,
    or EMPTY when there is none."""
    ball = automata.lev_build(sigma, d, g.terminals)
    if use_prune and not cyk_accepts(g, sigma):
        ball = automata.prune(ball, g, sigma)
    chart = intersection.cfl_fixpt(g, ball)
    if not intersection.nonempty(chart, ball, g):
        return gre.EMPTY
    return intersection.reg_build(chart, g, ball)


def repair(g: CnfGrammar, sigma, cfg: RepairConfig | None = None) -> RepairResult:
    """Ranked valid strings near sigma; a valid input returns itself at
    rank 1 with distance 0."""
    cfg = cfg or RepairConfig()
    sigma = tuple(sigma)
    if not sigma:
        raise ValueError("empty input string")
    for t in sigma:
        if t not in g.terminals:
            raise KeyError(f"unknown token {t!r}")
    if cyk_accepts(g, sigma):
        return _self_repair(g, sigma, cfg)

    d = pick_radius(g, sigma, cfg)
    e = build_intersection(g, sigma, d, use_prune=cfg.prune)
    if e is gre.EMPTY:
        raise RadiusExhausted(d)
    m = _model_for(g, cfg)
    return decoder.reg_dcode(
        e,
        m,
        cfg.k,
        max_expansions=cfg.max_expansions,
        max_seconds=cfg.max_seconds,
        queue_cap=cfg.queue_cap,
        sigma=sigma,
    )


def brute_force_repairs(g: CnfGrammar, sigma, d: int, guard: int = 10**7) -> set:
    """All valid strings within edit distance d of sigma, by prefix
    enumeration with Levenshtein row pruning.  Refuses instances that
    would visit more than `guard` prefixes."""
    sigma = tuple(sigma)
    if not sigma:
        raise ValueError("empty input string")
    alphabet = sorted(g.terminals)
    n = len(sigma)
    out = set()
    visited = 0

    # depth-first over prefixes; row[i] = edit distance between the
    # current prefix and sigma[:i]
    stack = [((), list(range(n + 1)))]
    while stack:
        prefix, row = stack.pop()
        visited += 1
        if visited > guard:
            raise ValueError(f"candidate guard of {guard} prefixes exceeded")
        if prefix and row[n] <= d and cyk_accepts(g, prefix):
            out.add(prefix)
        if len(prefix) >= n + d:
            continue
        for tok in alphabet:
            new = [row[0] + 1]
            for i in range(1, n + 1):
                new.append(
                    min(row[i] + 1, new[i - 1] + 1, row[i - 1] + (sigma[i - 1] != tok))
                )
            if min(new) <= d:
                stack.append((prefix + (tok,), new))
    return out


def precision_at_k(results, dataset, k=None) -> float:
    """Fraction of instances whose ground-truth fix appears in the top-k
    of the corresponding ranked list (token-sequence equality).  k=None
    means no rank cutoff."""
    dataset = list(dataset)
    results = list(results)
    if not dataset:
        raise ValueError("empty dataset")
    if len(results) != len(dataset):
        raise ValueError("one ranked list per instance is required")
    hits = 0
    for ranked, inst in zip(results, dataset):
        top = list(ranked) if k is None else list(ranked)[:k]
        if tuple(inst.fixed) in {tuple(w) for w in top}:
            hits += 1
    return hits / len(dataset)


@dataclass(frozen=True)
class EvalOutcome:
    """Per-instance record mirroring the pipeline's outcome funnel."""

    instance: RepairInstance
    category: str  # already-valid | radius-exhausted | fix-outside-radius
    #               | fix-not-decoded | ranked
    rank: int | None  # 1-based rank of the true fix when ranked
    radius: int | None
    distance: int  # edit distance between broken and fixed
    exhausted: bool
    repairs: tuple = field(default=(), compare=False)


def _evaluate_one(g, inst, cfg):
    distance = edit_distance(inst.broken, inst.fixed)
    if cyk_accepts(g, inst.broken):
        rank = 1 if tuple(inst.broken) == tuple(inst.fixed) else None
        cat = "already-valid"
        return EvalOutcome(inst, cat, rank, 0, distance, True, (tuple(inst.broken),))
    try:
        d = pick_radius(g, inst.broken, cfg)
        result = repair(g, inst.broken, replace(cfg, radius=d))
    except RadiusExhausted as exc:
        return EvalOutcome(inst, "radius-exhausted", None, exc.largest, distance, False)
    words = tuple(r.tokens for r in result.repairs)
    if distance > d:
        cat, rank = "fix-outside-radius", None
    elif tuple(inst.fixed) in words:
        cat, rank = "ranked", words.index(tuple(inst.fixed)) + 1
    else:
        cat, rank = "fix-not-decoded", None
    return EvalOutcome(inst, cat, rank, d, distance, result.exhausted, words)


def evaluate(g: CnfGrammar, dataset, cfg: RepairConfig | None = None, jobs: int = 1) -> list:
    """Run the repair pipeline over a dataset; one outcome per instance,
    in input order."""
    cfg = cfg or RepairConfig()
    dataset = list(dataset)
    if not dataset:
        raise ValueError("empty dataset")
    if jobs <= 1:
        return [_evaluate_one(g, inst, cfg) for inst in dataset]
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda inst: _evaluate_one(g, inst, cfg), dataset))


def parse_dataset(text: str) -> list:
    """One instance per line: broken TAB fixed, space-separated tokens."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected exactly one TAB separator")
        broken, fixed = (tuple(p.split()) for p in parts)
        out.append(RepairInstance(broken=broken, fixed=fixed))
    return out


def bundled_grammar_text(name: str) -> str:
    path = resources.files("parserepair") / "grammars" / f"{name}.cfg"
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no bundled grammar named {name!r}")


def load_grammar(spec: str) -> CnfGrammar:
    """Load a grammar from a file path or a bundled name (dyck, arith,
    mini) and convert it to CNF."""
    import os

    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = bundled_grammar_text(spec)
    return to_cnf(parse_grammar(text))
