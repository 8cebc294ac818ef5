"""File outputs for batch experiments: the trials CSV, the JSON summary,
per-ratio plot-data tables, and rendered figures of the diagnostic
ratios against N."""

import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiments import RATIO_NAMES, records_to_csv

RATIO_LABELS = {
    "R1_K": "second moment of K about the vertex mean / log(2N/n)",
    "R1_T": "second moment of T about 0 / log(2N/n)",
    "R2": "vol(T)^(1/n) * sqrt(n / log(2N/n))",
    "R3": "inradius of T / sqrt(log(2N/n))",
    "R4": "max facet second moment / log(2N/n)",
}


def write_trials_csv(records, path):
    with open(path, "w") as fh:
        fh.write(records_to_csv(records))
    return path


def write_summary_json(summary, path):
    with open(path, "w") as fh:
        json.dump(summary.to_dict(), fh, indent=2)
        fh.write("\n")
    return path


def _series(summary, ratio, n):
    cells = sorted((c for c in summary.cells if c.n == n), key=lambda c: c.N)
    rows = [
        (c.N, c.ratios[ratio]["median"], c.ratios[ratio]["q10"], c.ratios[ratio]["q90"])
        for c in cells
        if c.ratios[ratio]["median"] is not None
    ]
    return rows


def write_plot_data(summary, outdir):
    """One CSV per (ratio, n) with columns N, median, q10, q90."""
    paths = []
    dims = sorted({c.n for c in summary.cells})
    for ratio in RATIO_NAMES:
        for n in dims:
            rows = _series(summary, ratio, n)
            if not rows:
                continue
            path = os.path.join(outdir, f"plotdata_{ratio}_n{n}.csv")
            with open(path, "w") as fh:
                fh.write("N,median,q10,q90\n")
                for N, med, q10, q90 in rows:
                    fh.write(f"{N},{med!r},{q10!r},{q90!r}\n")
            paths.append(path)
    return paths


def render_figures(summary, outdir, fmt="png"):
    """One figure per diagnostic ratio: median vs N with a 10%-90% band,
    one line per dimension."""
    paths = []
    dims = sorted({c.n for c in summary.cells})
    for ratio in RATIO_NAMES:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        drew = False
        for n in dims:
            rows = _series(summary, ratio, n)
            if not rows:
                continue
            drew = True
            ns = [r[0] for r in rows]
            ax.plot(ns, [r[1] for r in rows], "o-", label=f"n = {n}")
            ax.fill_between(ns, [r[2] for r in rows], [r[3] for r in rows], alpha=0.2)
        if not drew:
            plt.close(fig)
            continue
        ax.set_xscale("log", base=2)
        ax.set_xlabel("N")
        ax.set_ylabel(ratio)
        ax.set_title(f"{RATIO_LABELS[ratio]} ({summary.distribution})")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(outdir, f"fig_{ratio}.{fmt}")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def write_experiment_outputs(records, summary, outdir, figures=True):
    """Write every experiment artifact into `outdir`; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = [
        write_trials_csv(records, os.path.join(outdir, "trials.csv")),
        write_summary_json(summary, os.path.join(outdir, "summary.json")),
    ]
    paths += write_plot_data(summary, outdir)
    if figures:
        paths += render_figures(summary, outdir)
    return paths
