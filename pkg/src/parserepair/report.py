"""Evaluation report rendering: binned Precision@k tables and figures.

Instances are binned by broken-input length decile and by edit distance
between the broken and fixed sides; each bin reports Precision@k for a
few cutoffs.  The figure path renders the same aggregates with
matplotlib next to the tab-separated table.
"""

from __future__ import annotations

import os
from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

DEFAULT_KS = (1, 5, 10)


def _length_decile(length: int, sorted_lengths: list) -> int:
    below = sum(1 for x in sorted_lengths if x < length)
    return min(9, below * 10 // len(sorted_lengths))


def _precision(outcomes, k) -> float:
    hits = sum(1 for o in outcomes if o.rank is not None and o.rank <= k)
    return hits / len(outcomes)


def binned_rows(outcomes, ks=DEFAULT_KS) -> list:
    """Aggregate rows: one per (length decile, edit distance) bin plus a
    trailing overall row.  Each row is (bin label, n, P@k...)."""
    if not outcomes:
        raise ValueError("no outcomes to report")
    lengths = sorted(len(o.instance.broken) for o in outcomes)
    bins = {}
    for o in outcomes:
        key = (_length_decile(len(o.instance.broken), lengths), o.distance)
        bins.setdefault(key, []).append(o)
    rows = []
    for (dec, dist) in sorted(bins):
        group = bins[(dec, dist)]
        rows.append(
            (f"len-decile={dec} dist={dist}", len(group))
            + tuple(_precision(group, k) for k in ks)
        )
    rows.append(("overall", len(outcomes)) + tuple(_precision(outcomes, k) for k in ks))
    return rows


def outcome_breakdown(outcomes) -> list:
    counts = Counter(o.category for o in outcomes)
    return [(cat, counts[cat]) for cat in sorted(counts)]


def render_table(outcomes, ks=DEFAULT_KS) -> str:
    """Tab-separated report: the binned Precision@k table followed by
    the outcome breakdown."""
    lines = ["bin\tn\t" + "\t".join(f"P@{k}" for k in ks)]
    for row in binned_rows(outcomes, ks):
        label, n, *precisions = row
        lines.append(label + "\t" + str(n) + "\t" + "\t".join(f"{p:.4f}" for p in precisions))
    lines.append("")
    lines.append("outcome\tcount")
    for cat, count in outcome_breakdown(outcomes):
        lines.append(f"{cat}\t{count}")
    return "\n".join(lines) + "\n"


def _figure_precision(outcomes, ks, path):
    by_dist = {}
    for o in outcomes:
        by_dist.setdefault(o.distance, []).append(o)
    dists = sorted(by_dist)
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / len(ks)
    for i, k in enumerate(ks):
        xs = [d + (i - (len(ks) - 1) / 2) * width for d in dists]
        ys = [_precision(by_dist[d], k) for d in dists]
        ax.bar(xs, ys, width=width, label=f"P@{k}")
    ax.set_xlabel("edit distance of the true fix")
    ax.set_ylabel("precision")
    ax.set_xticks(dists)
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _figure_outcomes(outcomes, path):
    breakdown = outcome_breakdown(outcomes)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([c for c, _ in breakdown], [n for _, n in breakdown])
    ax.set_ylabel("instances")
    ax.set_title("repair pipeline outcomes")
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(outcomes, out_dir: str, ks=DEFAULT_KS) -> dict:
    """Write report.tsv plus the two PNG figures into out_dir; returns
    the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "table": os.path.join(out_dir, "report.tsv"),
        "precision": os.path.join(out_dir, "precision_by_distance.png"),
        "outcomes": os.path.join(out_dir, "outcomes.png"),
    }
    with open(paths["table"], "w", encoding="utf-8") as fh:
        fh.write(render_table(outcomes, ks))
    _figure_precision(outcomes, ks, paths["precision"])
    _figure_outcomes(outcomes, paths["outcomes"])
    return paths
