"""Figure rendering for experiment records.

The report path reads trial records, writes the delimited summary next to
them, and renders a small set of matplotlib figures to files.  Figures are
rendered with the Agg backend at fixed size and dpi so identical records
produce identical images.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiments import DEFAULT_EPSILONS, SummaryStats, persist, summarize

_SAVEFIG = dict(dpi=120, metadata={"Software": "zerolab"})


def _grouped_rows(stats: SummaryStats):
    regions = sorted({row.region for row in stats.rows})
    for region in regions:
        rows = sorted((r for r in stats.rows if r.region == region), key=lambda r: r.degree)
        yield region, rows


def deviation_figure(stats: SummaryStats, path) -> None:
    """Mean |stat - ref| against degree, one line per region, with s.e. bars."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for region, rows in _grouped_rows(stats):
        ns = [r.degree for r in rows]
        devs = [r.mean_abs_dev for r in rows]
        errs = [r.se for r in rows]
        ax.errorbar(ns, devs, yerr=errs, marker="o", capsize=3, label=region)
    ax.set_xlabel("degree n")
    ax.set_ylabel("mean |stat - ref|")
    if all(row.mean_abs_dev > 0 for row in stats.rows):
        ax.set_yscale("log")
        ax.set_xscale("log")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def exceedance_figure(stats: SummaryStats, path) -> None:
    """Exceedance frequency against degree for every (region, epsilon)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for region, rows in _grouped_rows(stats):
        ns = [r.degree for r in rows]
        for i, eps in enumerate(stats.epsilons):
            freqs = [r.exceedance[i] for r in rows]
            ax.plot(ns, freqs, marker="s", label=f"{region} eps={eps:g}")
    ax.set_xlabel("degree n")
    ax.set_ylabel("P[|stat - ref| >= eps]")
    ax.set_ylim(-0.03, 1.03)
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def deviation_histogram(records, path) -> None:
    """Histogram of stat - ref at the largest degree present."""
    if not records:
        return
    n_max = max(r.n for r in records)
    devs = [r.stat - r.ref for r in records if r.n == n_max]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    bins = max(8, min(40, int(math.sqrt(len(devs)) * 2)))
    ax.hist(devs, bins=bins, color="C0", alpha=0.8)
    ax.set_xlabel(f"stat - ref at n = {n_max}")
    ax.set_ylabel("trials")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def write_report(records, out_dir, epsilons=DEFAULT_EPSILONS) -> list:
    """Summary CSV plus figures; returns the list of files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats = summarize(records, epsilons)
    written = []
    summary_path = out / "summary.csv"
    persist(stats, summary_path)
    written.append(summary_path)
    if stats.rows:
        for name, fn in (
            ("deviation_vs_degree.png", lambda p: deviation_figure(stats, p)),
            ("exceedance_decay.png", lambda p: exceedance_figure(stats, p)),
            ("deviation_histogram.png", lambda p: deviation_histogram(records, p)),
        ):
            path = out / name
            fn(path)
            written.append(path)
    return written
