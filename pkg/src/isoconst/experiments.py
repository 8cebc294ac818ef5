"""Seeded batch experiments over random polytopes.

Each trial draws G_0..G_N, builds the hull of all N+1 points and the
symmetric hull of {+/- G_1..G_N}, and records volumes, second moments,
isotropic constants, the inradius of the symmetric body, and the worst
per-facet second moment.  Every statistic is a pure function of
(master_seed, n, N, trial_index), so reruns -- with any worker count --
produce identical records.

Diagnostic ratios (lr = log(2N/n)):
    R1_K = msq_K / lr          R1_T = msq_T / lr
    R2   = vol_T^(1/n) * sqrt(n / lr)
    R3   = inradius_T / sqrt(lr)
    R4   = max_facet_msq / lr
"""

import csv
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import hull as _hull
from . import isotropic as _iso
from . import polytope_moments as _pm
from .distributions import DistributionSpec, sample_matrix
from .errors import DegenerateInput, MissingSamples
from .thresholds import DEFAULT_THRESHOLDS, PILOT, THRESHOLDS_VERSION

CSV_VERSION = "isoconst-trials-v1"
CSV_COLUMNS = [
    "n",
    "N",
    "distribution",
    "trial_index",
    "derived_seed",
    "degenerate_K",
    "degenerate_T",
    "facet_count_K",
    "facet_count_T",
    "vol_K_nthroot",
    "vol_T_nthroot",
    "msq_K",
    "msq_T",
    "L_K",
    "L_T",
    "inradius_T",
    "max_facet_msq",
]

RATIO_NAMES = ["R1_K", "R1_T", "R2", "R3", "R4"]
STAT_NAMES = [
    "facet_count_K",
    "facet_count_T",
    "vol_K_nthroot",
    "vol_T_nthroot",
    "msq_K",
    "msq_T",
    "L_K",
    "L_T",
    "inradius_T",
    "max_facet_msq",
]

_COUNT_RULE = re.compile(r"^\s*(?:(\d+)\s*n|n\s*\+\s*(\d+)|n\s*(?:\^|\*\*)\s*2|n\s*\*\s*n)\s*$")


def log_ratio(n, N):
    """log(2N/n), the scale of every concentration bound here."""
    return math.log(2.0 * N / n)


def resolve_point_counts(rules, n):
    """Expand point-count rules ('n+1', '2n', '4n', 'n^2' or plain ints)
    for dimension n; results are deduplicated, sorted, and must be >= n."""
    out = set()
    for rule in rules:
        if isinstance(rule, (int, np.integer)):
            value = int(rule)
        else:
            text = str(rule)
            m = _COUNT_RULE.match(text)
            if m is None:
                try:
                    value = int(text)
                except ValueError:
                    raise ValueError(f"unsupported point-count rule {rule!r}") from None
            elif m.group(1) is not None:
                value = int(m.group(1)) * n
            elif m.group(2) is not None:
                value = n + int(m.group(2))
            else:
                value = n * n
        if value < n:
            raise ValueError(f"rule {rule!r} gives N={value} < n={n}")
        out.add(value)
    return sorted(out)


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple
    point_counts: tuple
    distribution: DistributionSpec
    trials: int
    master_seed: int
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    facet_budget: int = _hull.DEFAULT_FACET_BUDGET
    apex_policy: str = "auto"
    keep_points: bool = False
    coplanar: str = "triangulate"

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "point_counts", tuple(self.point_counts))
        if self.apex_policy not in ("auto", "chebyshev"):
            raise ValueError(f"unknown apex policy {self.apex_policy!r}")
        for n in self.dims:
            if not 1 <= n <= _hull.MAX_DIM:
                raise ValueError(f"dimension {n} out of range 1..{_hull.MAX_DIM}")

    def cells(self):
        return [(n, N) for n in self.dims for N in resolve_point_counts(self.point_counts, n)]

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["distribution"] = DistributionSpec.from_name(d.get("distribution", "gaussian"))
        thresholds = dict(DEFAULT_THRESHOLDS)
        thresholds.update(d.get("thresholds", {}))
        d["thresholds"] = thresholds
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        return {
            "dims": list(self.dims),
            "point_counts": [str(r) for r in self.point_counts],
            "distribution": self.distribution.value,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "thresholds": dict(self.thresholds),
            "facet_budget": self.facet_budget,
            "apex_policy": self.apex_policy,
            "keep_points": self.keep_points,
            "coplanar": self.coplanar,
        }


@dataclass(frozen=True)
class TrialRecord:
    n: int
    N: int
    distribution: str
    trial_index: int
    derived_seed: int
    degenerate_K: bool
    degenerate_T: bool
    facet_count_K: int = None
    facet_count_T: int = None
    vol_K_nthroot: float = None
    vol_T_nthroot: float = None
    msq_K: float = None
    msq_T: float = None
    L_K: float = None
    L_T: float = None
    inradius_T: float = None
    max_facet_msq: float = None
    wall_time: float = 0.0
    points: np.ndarray = None

    @property
    def degenerate(self):
        return self.degenerate_K or self.degenerate_T

    def ratios(self):
        lr = log_ratio(self.n, self.N)
        if self.degenerate:
            return dict.fromkeys(RATIO_NAMES)
        return {
            "R1_K": self.msq_K / lr,
            "R1_T": self.msq_T / lr,
            "R2": self.vol_T_nthroot * math.sqrt(self.n / lr),
            "R3": self.inradius_T / math.sqrt(lr),
            "R4": self.max_facet_msq / lr,
        }


def derive_seed(master_seed, n, N, trial_index):
    """Per-trial 64-bit seed; the trial is reproducible from it alone."""
    ss = np.random.SeedSequence(
        [int(master_seed) & (2**64 - 1), int(n), int(N), int(trial_index)]
    )
    return int(ss.generate_state(1, np.uint64)[0])


def run_trial(cfg, n, N, trial_index):
    """One seeded trial: sample, hull both bodies, record all statistics."""
    seed = derive_seed(cfg.master_seed, n, N, trial_index)
    mat = sample_matrix(cfg.distribution, N + 1, n, seed)
    pts = mat.data
    t0 = time.perf_counter()

    fields = {}
    degenerate_k = degenerate_t = False
    body_k = body_t = None
    try:
        body_k = _hull.convex_hull(pts, facet_budget=cfg.facet_budget, coplanar=cfg.coplanar)
    except DegenerateInput:
        degenerate_k = True
    try:
        body_t = _hull.symmetric_hull(
            pts[1:], facet_budget=cfg.facet_budget, coplanar=cfg.coplanar
        )
    except DegenerateInput:
        degenerate_t = True

    if not (degenerate_k or degenerate_t):
        z = pts.mean(axis=0)
        apex_k = z if cfg.apex_policy == "auto" else _hull.chebyshev_center(body_k)
        if (body_k.offsets - body_k.normals @ apex_k).min() <= 1e-12 * body_k.scale():
            apex_k = _hull.chebyshev_center(body_k)
        s_k = _pm.summarize(body_k, apex=apex_k)
        s_t = _pm.summarize(
            body_t,
            apex=np.zeros(n) if cfg.apex_policy == "auto" else _hull.chebyshev_center(body_t),
        )
        fields = {
            "facet_count_K": body_k.n_facets,
            "facet_count_T": body_t.n_facets,
            "vol_K_nthroot": s_k.volume ** (1.0 / n),
            "vol_T_nthroot": s_t.volume ** (1.0 / n),
            "msq_K": s_k.second_moment_about(z),
            "msq_T": s_t.second_moment_about(np.zeros(n)),
            "L_K": _iso.isotropic_constant(body_k, s_k).l_constant,
            "L_T": _iso.isotropic_constant(body_t, s_t).l_constant,
            "inradius_T": _hull.inradius(body_t, np.zeros(n)),
            "max_facet_msq": float(_pm.facet_second_moments(body_k, z).max()),
        }

    return TrialRecord(
        n=n,
        N=N,
        distribution=cfg.distribution.value,
        trial_index=trial_index,
        derived_seed=seed,
        degenerate_K=degenerate_k,
        degenerate_T=degenerate_t,
        wall_time=time.perf_counter() - t0,
        points=pts if cfg.keep_points else None,
        **fields,
    )


def _run_trial_packed(args):
    return run_trial(*args)


def run_experiment(cfg, threads=1):
    """All cells and trials; returns (records, SummaryStats).

    Records are canonically ordered by (n, N, trial_index) whatever the
    worker count, so the CSV output is byte-identical across runs.
    """
    tasks = [(cfg, n, N, i) for (n, N) in cfg.cells() for i in range(cfg.trials)]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_trial_packed, tasks, chunksize=8))
    else:
        records = [run_trial(*t) for t in tasks]
    records.sort(key=lambda r: (r.n, r.N, r.trial_index))
    return records, summarize_records(cfg, records)


def _quantiles(values):
    if not values:
        return {"median": None, "q10": None, "q90": None, "min": None, "max": None}
    arr = np.asarray(values, dtype=float)
    return {
        "median": float(np.median(arr)),
        "q10": float(np.quantile(arr, 0.10)),
        "q90": float(np.quantile(arr, 0.90)),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


@dataclass(frozen=True)
class CellSummary:
    n: int
    N: int
    trials: int
    degenerate_K: int
    degenerate_T: int
    degenerate: int
    regime_2n_to_2pown: bool
    stats: dict
    ratios: dict
    exceedance: dict
    wall_time: float

    def to_dict(self):
        return {
            "n": self.n,
            "N": self.N,
            "trials": self.trials,
            "degenerate_K": self.degenerate_K,
            "degenerate_T": self.degenerate_T,
            "degenerate": self.degenerate,
            "regime_2n_to_2pown": self.regime_2n_to_2pown,
            "stats": self.stats,
            "ratios": self.ratios,
            "exceedance": self.exceedance,
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True)
class SummaryStats:
    distribution: str
    master_seed: int
    trials: int
    thresholds: dict
    cells: list

    def cell(self, n, N):
        for c in self.cells:
            if c.n == n and c.N == N:
                return c
        raise KeyError((n, N))

    def to_dict(self):
        return {
            "version": THRESHOLDS_VERSION,
            "distribution": self.distribution,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "thresholds": dict(self.thresholds),
            "cells": [c.to_dict() for c in self.cells],
        }


def summarize_records(cfg, records):
    th = cfg.thresholds
    cells = []
    for (n, N) in cfg.cells():
        cell_recs = [r for r in records if r.n == n and r.N == N]
        good = [r for r in cell_recs if not r.degenerate]
        stats = {
            name: _quantiles([getattr(r, name) for r in good]) for name in STAT_NAMES
        }
        ratio_rows = [r.ratios() for r in good]
        ratios = {
            name: _quantiles([row[name] for row in ratio_rows]) for name in RATIO_NAMES
        }
        k = max(len(good), 1)
        exceedance = {
            "L_K_above_cap": sum(r.L_K > th["l_k_cap"] for r in good) / k,
            "L_T_above_cap": sum(r.L_T > th["l_t_cap"] for r in good) / k,
            "R2_below_floor": sum(row["R2"] < th["r2_floor"] for row in ratio_rows) / k,
            "R3_below_floor": sum(row["R3"] < th["r3_floor"] for row in ratio_rows) / k,
            "R4_above_cap": sum(row["R4"] > th["r4_cap"] for row in ratio_rows) / k,
        }
        cells.append(
            CellSummary(
                n=n,
                N=N,
                trials=len(cell_recs),
                degenerate_K=sum(r.degenerate_K for r in cell_recs),
                degenerate_T=sum(r.degenerate_T for r in cell_recs),
                degenerate=sum(r.degenerate for r in cell_recs),
                regime_2n_to_2pown=2 * n <= N <= 2**n,
                stats=stats,
                ratios=ratios,
                exceedance=exceedance,
                wall_time=math.fsum(r.wall_time for r in cell_recs),
            )
        )
    return SummaryStats(
        distribution=cfg.distribution.value,
        master_seed=cfg.master_seed,
        trials=cfg.trials,
        thresholds=dict(th),
        cells=cells,
    )


def _format_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records):
    """Render records as the frozen v1 CSV (floats round-trip exactly)."""
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} columns: {','.join(CSV_COLUMNS)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_format_value(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def bernstein_tail_check(spec, m, t_grid, trials, seed, scale=1.0):
    """Empirical tail of |mean of m centered draws| against the bound
    2 exp(-c m min(t/L, t^2/L^2)); returns the largest c for which the
    bound dominates the whole grid."""
    from .distributions import _draw, _rng  # centered unit-variance draws

    t_grid = [float(t) for t in t_grid]
    means = _draw(spec, _rng(seed, 0xBE57), (int(trials), int(m))).mean(axis=1)
    amax = np.abs(means)
    empirical = [float((amax > t).mean()) for t in t_grid]

    def rate(t):
        return m * min(t / scale, (t / scale) ** 2)

    limits = [
        math.log(2.0 / e) / rate(t)
        for t, e in zip(t_grid, empirical)
        if t > 0 and e > 0
    ]
    c_star = min(limits) if limits else math.inf
    bound = [
        2.0 * math.exp(-c_star * rate(t)) if math.isfinite(c_star) or rate(t) == 0 else 0.0
        for t in t_grid
    ]
    return TailCheckResult(
        distribution=spec.value,
        m=int(m),
        scale=float(scale),
        trials=int(trials),
        t_grid=t_grid,
        empirical=empirical,
        bound=bound,
        c_star=c_star,
    )


@dataclass(frozen=True)
class TailCheckResult:
    distribution: str
    m: int
    scale: float
    trials: int
    t_grid: list
    empirical: list
    bound: list
    c_star: float

    def to_dict(self):
        return {
            "distribution": self.distribution,
            "m": self.m,
            "scale": self.scale,
            "trials": self.trials,
            "t_grid": self.t_grid,
            "empirical": self.empirical,
            "bound": self.bound,
            "c_star": self.c_star,
        }


def _lemma_statistics(record, subset_draws=100):
    pts = record.points
    n, N = record.n, record.N
    lr = log_ratio(n, N)
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence([record.derived_seed, 0x1E44A]))
    )
    best_mean = 0.0
    best_quad = 0.0
    for _ in range(subset_draws):
        rows = pts[rng.choice(N + 1, size=n, replace=False)]
        best_mean = max(best_mean, float(np.linalg.norm(rows.mean(axis=0))))
        rowsums = rows.sum(axis=1)
        quad = float((rowsums @ rowsums + (rows * rows).sum()) / n**2)
        best_quad = max(best_quad, quad)
    return {
        "subset_mean": best_mean / math.sqrt(lr),
        "global_mean": float(np.linalg.norm(pts.mean(axis=0))) / math.sqrt(lr),
        "quadratic": best_quad / lr,
    }


@dataclass(frozen=True)
class LemmaRatioReport:
    cells: list  # dicts with n, N, per-statistic quantiles and exceedance
    trend_non_increasing: dict  # n -> bool for the quadratic statistic

    def to_dict(self):
        return {
            "cells": self.cells,
            "trend_non_increasing": {str(k): v for k, v in self.trend_non_increasing.items()},
        }


def lemma_ratio_report(records, thresholds=None, subset_draws=100):
    """Concentration statistics recomputed from retained point samples.

    Per trial: the worst |mean| over `subset_draws` random n-subsets of
    the points, the global mean, and the worst subset quadratic form,
    each divided by its sqrt(log(2N/n)) or log(2N/n) scaling.
    """
    thresholds = dict(DEFAULT_THRESHOLDS) if thresholds is None else thresholds
    if any(r.points is None for r in records):
        raise MissingSamples("records were produced without keep_points")

    by_cell = {}
    for r in records:
        by_cell.setdefault((r.n, r.N), []).append(r)

    caps = {
        "subset_mean": thresholds["lemma_subset_mean_cap"],
        "global_mean": thresholds["lemma_global_mean_cap"],
        "quadratic": thresholds["lemma_quadratic_cap"],
    }
    cells = []
    for (n, N) in sorted(by_cell):
        stats = [_lemma_statistics(r, subset_draws) for r in by_cell[(n, N)]]
        entry = {"n": n, "N": N, "trials": len(stats)}
        for name in ("subset_mean", "global_mean", "quadratic"):
            vals = [s[name] for s in stats]
            entry[name] = _quantiles(vals)
            entry[name]["exceed_fraction"] = float(
                np.mean([v > caps[name] for v in vals])
            )
        cells.append(entry)

    trend = {}
    for n in sorted({c["n"] for c in cells}):
        meds = [c["quadratic"]["median"] for c in cells if c["n"] == n]
        trend[n] = all(b <= a * (1.0 + 1e-9) for a, b in zip(meds, meds[1:]))
    return LemmaRatioReport(cells=cells, trend_non_increasing=trend)


def run_pilot_calibration(trials=None, master_seed=None, subset_draws=None):
    """Reproduce the frozen thresholds: one gaussian pilot cell, caps at
    1.5x its 99th percentile and floors at its 1st percentile over 1.5."""
    trials = PILOT["trials"] if trials is None else trials
    master_seed = PILOT["master_seed"] if master_seed is None else master_seed
    subset_draws = PILOT["subset_draws"] if subset_draws is None else subset_draws
    cfg = ExperimentConfig(
        dims=(PILOT["n"],),
        point_counts=(PILOT["N"],),
        distribution=DistributionSpec.from_name(PILOT["distribution"]),
        trials=trials,
        master_seed=master_seed,
        keep_points=True,
    )
    records = [run_trial(cfg, PILOT["n"], PILOT["N"], i) for i in range(trials)]
    good = [r for r in records if not r.degenerate]
    ratio_rows = [r.ratios() for r in good]
    lemma = [_lemma_statistics(r, subset_draws) for r in good]

    def q(vals, p):
        return float(np.quantile(np.asarray(vals, dtype=float), p))

    def sig4(x):
        return float(f"{x:.4g}")

    return {
        "l_k_cap": sig4(1.5 * q([r.L_K for r in good], 0.99)),
        "l_t_cap": sig4(1.5 * q([r.L_T for r in good], 0.99)),
        "r2_floor": sig4(q([row["R2"] for row in ratio_rows], 0.01) / 1.5),
        "r3_floor": sig4(q([row["R3"] for row in ratio_rows], 0.01) / 1.5),
        "r4_cap": sig4(1.5 * q([row["R4"] for row in ratio_rows], 0.99)),
        "lemma_subset_mean_cap": sig4(1.5 * q([s["subset_mean"] for s in lemma], 0.99)),
        "lemma_global_mean_cap": sig4(1.5 * q([s["global_mean"] for s in lemma], 0.99)),
        "lemma_quadratic_cap": sig4(1.5 * q([s["quadratic"] for s in lemma], 0.99)),
    }
