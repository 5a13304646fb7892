"""Report figures and their tab-separated companions."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .patterns import PATTERN_CODES  # noqa: E402


def write_tsv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def pattern_counts(counts: Mapping[str, int], unique: Mapping[str, int], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    codes = list(PATTERN_CODES)
    tsv = write_tsv(out_dir / "pattern_counts.tsv", ["pattern", "eventualities", "unique"],
                    [(c, counts.get(c, 0), unique.get(c, 0)) for c in codes])
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = range(len(codes))
    ax.bar([x - 0.2 for x in xs], [counts.get(c, 0) for c in codes], width=0.4, label="total")
    ax.bar([x + 0.2 for x in xs], [unique.get(c, 0) for c in codes], width=0.4, label="unique")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(codes, rotation=60, ha="right")
    ax.set_ylabel("eventualities")
    ax.legend(frameon=False)
    return [tsv, _finish(fig, out_dir / "pattern_counts.png")]


def frequency_distribution(freqs: Sequence[int], out_dir) -> list[Path]:
    """Rank/frequency plot on log-log axes."""
    out_dir = Path(out_dir)
    ranked = sorted((f for f in freqs if f > 0), reverse=True)
    tsv = write_tsv(out_dir / "frequency_distribution.tsv", ["rank", "frequency"],
                    [(i, f) for i, f in enumerate(ranked, start=1)])
    fig, ax = plt.subplots(figsize=(5, 4))
    if ranked:
        ax.loglog(range(1, len(ranked) + 1), ranked, marker=".", linestyle="none")
    ax.set_xlabel("rank")
    ax.set_ylabel("frequency")
    return [tsv, _finish(fig, out_dir / "frequency_distribution.png")]


def bootstrap_progress(telemetry: Sequence[Mapping], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    iters = [r["iter"] for r in telemetry]
    tsv = write_tsv(out_dir / "bootstrap.tsv", ["iter", "tau", "labeled"],
                    [(r["iter"], f"{r['tau']:.6f}", r["labeled"]) for r in telemetry])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(iters, [r["labeled"] for r in telemetry], marker="o", color="C0")
    ax.set_xlabel("iteration")
    ax.set_ylabel("labelled instances", color="C0")
    ax2 = ax.twinx()
    ax2.plot(iters, [r["tau"] for r in telemetry], marker="s", color="C1")
    ax2.set_ylabel("threshold", color="C1")
    ax2.set_ylim(0, 1)
    return [tsv, _finish(fig, out_dir / "bootstrap.png")]


def relation_distribution(totals: Mapping[str, float], out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    names = sorted(totals, key=lambda n: -totals[n])
    tsv = write_tsv(out_dir / "relations.tsv", ["relation", "weight"], [(n, totals[n]) for n in names])
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(names)), [totals[n] for n in names])
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=60, ha="right")
    ax.set_ylabel("total weight")
    return [tsv, _finish(fig, out_dir / "relations.png")]
