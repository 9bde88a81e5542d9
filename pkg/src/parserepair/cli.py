"""Command-line surface for the repair library.

Exit codes: 0 success (valid / results complete), 1 invalid membership
verdict, 2 usage or input error, 3 radius exhausted, 4 budget or guard
exceeded with partial results printed.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import decoder, gre, intersection, ngram
from .counting import volume
from .grammar import cyk_accepts
from .pipeline import (
    RadiusExhausted,
    RepairConfig,
    build_intersection,
    evaluate,
    load_grammar,
    parse_dataset,
    repair,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_RADIUS = 3
EXIT_BUDGET = 4

# --budget-ms maps to an expansion count so results are reproducible
# across machines; --wall-clock switches to real elapsed time.
EXPANSIONS_PER_MS = 200


def _add_grammar(p):
    p.add_argument("--grammar", "-g", required=True, help="grammar file or bundled name (dyck, arith, mini)")


def _add_tokens(p):
    p.add_argument("tokens", nargs="+", help="input token sequence")


def _add_radius(p):
    group = p.add_mutually_exclusive_group()
    group.add_argument("--max-dist", type=int, help="explicit edit radius")
    group.add_argument("--auto", action="store_true", help="radius = language edit distance + slack")
    p.add_argument("--slack", type=int, default=0)
    p.add_argument("--radius-limit", type=int, default=4, help="auto mode search limit")


def _add_budget(p):
    default_ms = os.environ.get("PARSEREPAIR_BUDGET_MS")
    p.add_argument("--budget-ms", type=int, default=int(default_ms) if default_ms else None)
    p.add_argument("--wall-clock", action="store_true", help="interpret the budget as elapsed time")
    p.add_argument("--queue-cap", type=int, default=10**6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parserepair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="grammar membership verdict")
    _add_grammar(p)
    _add_tokens(p)

    p = sub.add_parser("repair", help="ranked repairs of an invalid input")
    _add_grammar(p)
    _add_radius(p)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--ngram", help="trained model file")
    p.add_argument("--no-prune", action="store_true")
    _add_budget(p)
    _add_tokens(p)

    p = sub.add_parser("complete", help="fill holes written as _")
    _add_grammar(p)
    p.add_argument("--limit", type=int, default=10**4)
    _add_tokens(p)

    p = sub.add_parser("count", help="exact repair volume at a radius")
    _add_grammar(p)
    p.add_argument("--max-dist", type=int, required=True)
    _add_tokens(p)

    p = sub.add_parser("enumerate", help="all distinct valid strings within a radius")
    _add_grammar(p)
    p.add_argument("--max-dist", type=int, required=True)
    p.add_argument("--limit", type=int, default=10**4)
    p.add_argument("--no-prune", action="store_true")
    _add_tokens(p)

    p = sub.add_parser("led", help="language edit distance")
    _add_grammar(p)
    p.add_argument("--limit", type=int, default=4)
    _add_tokens(p)

    p = sub.add_parser("train-ngram", help="train and save a model")
    p.add_argument("--corpus", required=True, help="one token sequence per line")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--out", required=True)
    p.add_argument("--grammar", help="widen the vocabulary to a grammar's terminals")

    p = sub.add_parser("eval", help="Precision@k harness over a dataset")
    _add_grammar(p)
    p.add_argument("--dataset", required=True)
    _add_radius(p)
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--ngram", help="trained model file")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--out-dir", default="parserepair-report", help="where to write report.tsv and figures")
    p.add_argument("--jobs", type=int, default=1)
    _add_budget(p)

    return parser


def _config(args) -> RepairConfig:
    model = None
    if getattr(args, "ngram", None):
        with open(args.ngram, encoding="utf-8") as fh:
            model = ngram.from_text(fh.read())
    max_expansions = max_seconds = None
    if args.budget_ms is not None:
        if args.wall_clock:
            max_seconds = args.budget_ms / 1000.0
        else:
            max_expansions = args.budget_ms * EXPANSIONS_PER_MS
    return RepairConfig(
        radius=args.max_dist,
        slack=args.slack,
        radius_limit=args.radius_limit,
        k=args.top_k,
        max_expansions=max_expansions,
        max_seconds=max_seconds,
        queue_cap=args.queue_cap,
        model=model,
        prune=not args.no_prune,
    )


def _cmd_check(args, out):
    g = load_grammar(args.grammar)
    ok = cyk_accepts(g, args.tokens)
    print("valid" if ok else "invalid", file=out)
    return EXIT_OK if ok else EXIT_INVALID


def _cmd_repair(args, out):
    g = load_grammar(args.grammar)
    result = repair(g, args.tokens, _config(args))
    for rank, r in enumerate(result.repairs, 1):
        print(f"{rank}\t{r.logscore:.6f}\t{r.distance}\t{' '.join(r.tokens)}", file=out)
    print(f"exhausted\t{'true' if result.exhausted else 'false'}", file=out)
    return EXIT_OK if result.exhausted else EXIT_BUDGET


def _cmd_complete(args, out):
    g = load_grammar(args.grammar)
    e = intersection.complete(g, args.tokens)
    if e is gre.EMPTY:
        print("no completions", file=sys.stderr)
        return EXIT_OK
    for word in decoder.enumerate_all(e, args.limit):
        print(" ".join(word), file=out)
    return EXIT_OK


def _cmd_count(args, out):
    g = load_grammar(args.grammar)
    print(volume(g, args.tokens, args.max_dist), file=out)
    return EXIT_OK


def _cmd_enumerate(args, out):
    g = load_grammar(args.grammar)
    e = build_intersection(g, args.tokens, args.max_dist, use_prune=not args.no_prune)
    if e is gre.EMPTY:
        return EXIT_OK
    for word in decoder.enumerate_all(e, args.limit):
        print(" ".join(word), file=out)
    return EXIT_OK


def _cmd_led(args, out):
    g = load_grammar(args.grammar)
    d = intersection.led(g, args.tokens, args.limit)
    print("none" if d is None else d, file=out)
    return EXIT_OK


def _cmd_train_ngram(args, out):
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = [line.split() for line in fh if line.strip()]
    alphabet = None
    if args.grammar:
        alphabet = load_grammar(args.grammar).terminals
    model = ngram.train(corpus, c=args.order, alphabet=alphabet)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(ngram.to_text(model))
    print(f"wrote {args.out} ({len(model.counts)} windows)", file=out)
    return EXIT_OK


def _cmd_eval(args, out):
    from . import report

    g = load_grammar(args.grammar)
    with open(args.dataset, encoding="utf-8") as fh:
        dataset = parse_dataset(fh.read())
    outcomes = evaluate(g, dataset, _config(args), jobs=args.jobs)
    table = report.render_table(outcomes)
    out.write(table)
    paths = report.write_report(outcomes, args.out_dir)
    print(f"report written to {paths['table']}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "repair": _cmd_repair,
    "complete": _cmd_complete,
    "count": _cmd_count,
    "enumerate": _cmd_enumerate,
    "led": _cmd_led,
    "train-ngram": _cmd_train_ngram,
    "eval": _cmd_eval,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except RadiusExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RADIUS
    except (KeyError, ValueError, OSError) as exc:
        message = exc.args[0] if exc.args else exc
        if isinstance(exc, ValueError) and "exceed" in str(exc):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
