"""Command-line front end.

Subcommands: sample, hull, moments, lk, experiment, tailcheck, validate.
Every run prints the resolved seed on stderr; numeric output uses
shortest round-trip formatting, so values re-read from files are
bit-identical.  Exit codes: 0 success, 1 usage error, 2 numerical or
degeneracy abort.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bodies, hull, isotropic, oracle, polytope_moments, report
from .distributions import DistributionSpec, sample_matrix, validate_star_conditions
from .errors import IsoconstError
from .experiments import ExperimentConfig, bernstein_tail_check, run_experiment

ENV_SEED = "ISOCONST_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_seed(explicit):
    if explicit is not None:
        seed = int(explicit)
    elif os.environ.get(ENV_SEED):
        seed = int(os.environ[ENV_SEED])
    else:
        seed = 0
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _write_text(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(obj, out):
    _write_text(json.dumps(obj, indent=2) + "\n", out)


def _add_source_args(p, body=True):
    p.add_argument("--dist", default="gaussian", help="distribution name (gaussian, rademacher, uniform)")
    p.add_argument("--n", type=int, help="ambient dimension")
    p.add_argument("--N", type=int, help="point count N (the sampler draws G_0..G_N)")
    p.add_argument("--seed", type=int, help=f"RNG seed (falls back to ${ENV_SEED}, then 0)")
    p.add_argument("--symmetric", action="store_true", help="build conv{+/-G_1..G_N} instead of conv{G_0..G_N}")
    p.add_argument("--facet-budget", type=int, default=hull.DEFAULT_FACET_BUDGET, help="abort if the hull exceeds this many facets")
    if body:
        p.add_argument("--body", choices=sorted(bodies.REFERENCE_BODIES), help="use a built-in reference body")
        p.add_argument("--dim", type=int, help="dimension of the reference body")
        p.add_argument("--poly", help="read the polytope from a JSON file")


def _polytope_from_args(args, parser):
    if getattr(args, "poly", None):
        with open(args.poly) as fh:
            poly = hull.Polytope.from_json(fh.read())
        _resolve_seed(args.seed)
        return poly, None
    if getattr(args, "body", None):
        if args.dim is None:
            parser.error("--body requires --dim")
        _resolve_seed(args.seed)
        return bodies.reference_body(args.body, args.dim), None
    if args.n is None or args.N is None:
        parser.error("need --n and --N (or --body/--poly)")
    seed = _resolve_seed(args.seed)
    spec = DistributionSpec.from_name(args.dist)
    mat = sample_matrix(spec, args.N + 1, args.n, seed)
    if args.symmetric:
        poly = hull.symmetric_hull(mat.data[1:], facet_budget=args.facet_budget)
    else:
        poly = hull.convex_hull(mat.data, facet_budget=args.facet_budget)
    return poly, mat


def _cmd_sample(args, parser):
    seed = _resolve_seed(args.seed)
    spec = DistributionSpec.from_name(args.dist)
    mat = sample_matrix(spec, args.N + 1, args.n, seed)
    if args.format == "json":
        _write_json(
            {"distribution": spec.value, "rows": mat.rows, "cols": mat.cols,
             "seed": mat.seed, "data": mat.data.tolist()},
            args.out,
        )
    else:
        lines = [f"# isoconst-sample dist={spec.value} rows={mat.rows} cols={mat.cols} seed={seed}"]
        lines += [",".join(repr(v) for v in row) for row in mat.data.tolist()]
        _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_hull(args, parser):
    poly, _ = _polytope_from_args(args, parser)
    _write_text(json.dumps(poly.to_dict()) + "\n", args.emit)
    print(f"facets: {poly.n_facets}", file=sys.stderr)
    return 0


def _cmd_moments(args, parser):
    poly, _ = _polytope_from_args(args, parser)
    summary = polytope_moments.summarize(poly)
    payload = {"dim": poly.dim, "facets": poly.n_facets, "summary": summary.to_dict()}
    estimates = []
    if args.oracle:
        if poly.dim <= oracle.REJECTION_MAX_DIM:
            estimates.append(
                oracle.rejection_mc(poly, args.proposals, seed=args.seed or 0, ref=summary.apex)
            )
        estimates.append(
            oracle.cone_mc(poly, summary.apex, args.samples, seed=args.seed or 0, ref=summary.apex)
        )
        payload["oracles"] = [e.to_dict() for e in estimates]
    if args.format == "json":
        _write_json(payload, args.out)
        return 0
    lines = ["quantity,value"]
    lines.append(f"volume,{summary.volume!r}")
    for i, v in enumerate(summary.barycenter):
        lines.append(f"barycenter[{i}],{float(v)!r}")
    lines.append(f"second_moment_scalar,{summary.second_moment_scalar!r}")
    for i in range(poly.dim):
        for j in range(poly.dim):
            lines.append(f"covariance[{i}][{j}],{float(summary.covariance[i, j])!r}")
    for est in estimates:
        lines.append(f"{est.method}_volume,{est.volume_est!r}")
        lines.append(f"{est.method}_volume_se,{est.volume_se!r}")
        for i, v in enumerate(est.mean_est):
            lines.append(f"{est.method}_mean[{i}],{float(v)!r}")
            lines.append(f"{est.method}_mean_se[{i}],{float(est.mean_se[i])!r}")
        lines.append(f"{est.method}_second_moment,{est.second_moment_est!r}")
        lines.append(f"{est.method}_second_moment_se,{est.second_moment_se!r}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_lk(args, parser):
    poly, _ = _polytope_from_args(args, parser)
    summary = polytope_moments.summarize(poly)
    res = isotropic.isotropic_constant(poly, summary)
    print(f"L = {res.l_constant!r}")
    print(f"volume = {summary.volume!r}")
    print(f"log_det_cov = {res.log_det_cov!r}")
    return 0


def _cmd_experiment(args, parser):
    with open(args.config) as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["master_seed"] = args.seed
    elif "master_seed" not in raw:
        raw["master_seed"] = int(os.environ.get(ENV_SEED, 0))
    if args.facet_budget is not None:
        raw["facet_budget"] = args.facet_budget
    cfg = ExperimentConfig.from_dict(raw)
    print(f"seed: {cfg.master_seed}", file=sys.stderr)
    records, summary = run_experiment(cfg, threads=args.threads)
    paths = report.write_experiment_outputs(
        records, summary, args.out, figures=not args.no_figures
    )
    degenerate = sum(c.degenerate for c in summary.cells)
    print(
        f"{len(records)} trials over {len(summary.cells)} cells "
        f"({degenerate} degenerate); wrote {len(paths)} files to {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_tailcheck(args, parser):
    seed = _resolve_seed(args.seed)
    spec = DistributionSpec.from_name(args.dist)
    grid = [float(t) for t in args.t_grid.split(",")]
    res = bernstein_tail_check(spec, args.m, grid, args.trials, seed, scale=args.scale)
    if args.format == "json":
        _write_json(res.to_dict(), args.out)
        return 0
    lines = ["t,empirical,bound"]
    for t, e, b in zip(res.t_grid, res.empirical, res.bound):
        lines.append(f"{t!r},{e!r},{b!r}")
    lines.append(f"# c_star = {res.c_star!r}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_validate(args, parser):
    if args.poly:
        with open(args.poly) as fh:
            poly = hull.Polytope.from_json(fh.read())
        _resolve_seed(args.seed)
        diag = hull.validate_polytope(poly)
        _write_json(diag.to_dict(), args.out)
        return 0
    seed = _resolve_seed(args.seed)
    spec = DistributionSpec.from_name(args.dist)
    rep = validate_star_conditions(spec, args.m, seed)
    _write_json(rep.to_dict(), args.out)
    return 0


def build_parser():
    parser = _Parser(prog="isoconst", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command", parser_class=_Parser)

    p = sub.add_parser("sample", help="draw a coordinate matrix G_0..G_N")
    p.add_argument("--dist", default="gaussian")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("hull", help="build a hull and write it as JSON")
    _add_source_args(p)
    p.add_argument("--emit", help="output path for the polytope JSON (default: stdout)")
    p.set_defaults(func=_cmd_hull)

    p = sub.add_parser("moments", help="exact volume, barycenter, moments")
    _add_source_args(p)
    p.add_argument("--oracle", action="store_true", help="add Monte Carlo cross-check estimates")
    p.add_argument("--proposals", type=int, default=10**6, help="rejection-sampler proposals")
    p.add_argument("--samples", type=int, default=10**6, help="cone-sampler draws")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("lk", help="isotropic constant of a body")
    _add_source_args(p)
    p.set_defaults(func=_cmd_lk)

    p = sub.add_parser("experiment", help="run a seeded batch experiment")
    p.add_argument("--config", required=True, help="JSON config file (ExperimentConfig fields)")
    p.add_argument("--out", default="experiment_out", help="output directory")
    p.add_argument("--seed", type=int, help="override the config master_seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--facet-budget", type=int, default=None)
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("tailcheck", help="empirical Bernstein tail table")
    p.add_argument("--dist", default="rademacher")
    p.add_argument("--m", type=int, required=True, help="draws per mean")
    p.add_argument("--trials", type=int, default=10**5)
    p.add_argument("--seed", type=int)
    p.add_argument("--scale", type=float, default=1.0, help="the L scale in min(t/L, t^2/L^2)")
    p.add_argument("--t-grid", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_tailcheck)

    p = sub.add_parser("validate", help="check a distribution or a polytope file")
    p.add_argument("--dist", default="gaussian")
    p.add_argument("--m", type=int, default=10**5, help="sample count for the distribution report")
    p.add_argument("--seed", type=int)
    p.add_argument("--poly", help="validate this polytope JSON instead")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else exc.code
    try:
        return args.func(args, parser) or 0
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else exc.code
    except IsoconstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
