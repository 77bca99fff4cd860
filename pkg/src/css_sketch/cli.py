"""Command-line entry point: ``css-sketch <subcommand> ...``.

Exit codes: 0 success, 2 invalid input or config, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .datagen import SyntheticSpec, generate_matrix
from .errors import InvalidInput, NumericalFailure
from .leverage import (
    column_leverage_scores,
    epsilon_bound,
    format_scores,
    read_scores,
    row_leverage_scores,
)
from .linalg import format_matrix, read_matrix, thin_svd
from .optimizer import gamma_of, optimize_scores

EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_gen_data(args):
    A = generate_matrix(SyntheticSpec(args.family, args.m, args.n, args.seed))
    _emit(format_matrix(A), args.output)


def cmd_leverage(args):
    svd = thin_svd(read_matrix(args.matrix))
    if args.rows:
        scores = row_leverage_scores(svd)
    else:
        if args.k is None:
            raise InvalidInput("--k is required for column leverage scores")
        scores = column_leverage_scores(svd, args.k)
    _emit(format_scores(scores), args.output)


def cmd_optimize_scores(args):
    s_star = read_scores(args.scores)
    if args.gamma is not None:
        gamma = args.gamma
    elif args.ell is not None:
        gamma = gamma_of(round(s_star.mass), args.ell, args.delta)
    else:
        raise InvalidInput("give either --gamma or --ell (with --delta)")
    result = optimize_scores(s_star, gamma, tol=args.tol)
    _emit(format_scores(result.scores), args.output)
    meta = _dump_json(result.metadata())
    if args.meta:
        Path(args.meta).write_text(meta)
    else:
        sys.stderr.write(meta)


def cmd_certify(args):
    A = read_matrix(args.matrix)
    scores = read_scores(args.scores)
    if len(scores) != A.shape[1]:
        raise InvalidInput(
            f"{args.scores}: {len(scores)} scores for a matrix with {A.shape[1]} columns"
        )
    svd = thin_svd(A)
    s_star = column_leverage_scores(svd, args.k)
    report = epsilon_bound(
        scores, s_star, args.k, args.ell, svd.rank, args.delta, svd.sigma(args.k + 1)
    )
    out = report.to_dict()
    out.update(k=args.k, ell=args.ell, delta=args.delta, rho=svd.rank,
               sigma_next=svd.sigma(args.k + 1))
    _emit(_dump_json(out), args.output)


def _load_config(args, cls):
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{args.config}:{exc.lineno}: {exc.msg}") from None
    overrides = {
        "k": getattr(args, "k", None),
        "ell_grid": args.ell,
        "schemes": args.schemes,
        "trials": args.trials,
        "delta": getattr(args, "delta", None),
        "base_seed": args.seed,
        "gamma_grid": getattr(args, "gamma", None),
        "output_path": args.output,
    }
    raw.update({key: val for key, val in overrides.items() if val is not None})
    if getattr(args, "matrix", None):
        raw["data"] = {"path": args.matrix}
    elif getattr(args, "family", None):
        data = {"family": args.family, "seed": args.data_seed}
        if cls is bench.ExperimentConfig:
            data.update(m=args.m, n=args.n)
        raw["data"] = data
    if getattr(args, "record_timing", False):
        raw["record_timing"] = True
    if getattr(args, "no_replace", False):
        raw["replace"] = False
    raw.setdefault("output_path", "-")
    return cls.from_dict(raw)


def cmd_css_experiment(args):
    cfg = _load_config(args, bench.ExperimentConfig)
    _emit(bench.rows_to_csv(bench.run_css_experiment(cfg)), cfg.output_path)


def cmd_gamma_sweep(args):
    cfg = _load_config(args, bench.ExperimentConfig)
    _emit(bench.rows_to_csv(bench.run_gamma_sweep(cfg)), cfg.output_path)


def cmd_lsq_experiment(args):
    cfg = _load_config(args, bench.LsqConfig)
    _emit(bench.lsq_to_csv(bench.run_lsq_experiment(cfg)), cfg.output_path)


def _experiment_flags(p, css=True):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--family", choices=["GA", "T3", "T1"])
    p.add_argument("--data-seed", type=int, default=0)
    if css:
        p.add_argument("--m", type=int, default=300)
        p.add_argument("--n", type=int, default=300)
        p.add_argument("--matrix", help="matrix file instead of synthetic data")
        p.add_argument("--k", type=int)
        p.add_argument("--delta", type=float)
        p.add_argument("--record-timing", action="store_true")
    else:
        p.add_argument("--no-replace", action="store_true",
                       help="sample rows without replacement (test hook)")
    p.add_argument("--ell", type=int, nargs="+")
    p.add_argument("--schemes", nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="overrides base_seed")
    p.add_argument("--output", "-o")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="css-sketch", description="Randomized column subset selection toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic GA/T3/T1 matrix")
    p.add_argument("--family", choices=["GA", "T3", "T1"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("leverage", help="statistical leverage scores of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--rows", action="store_true", help="row scores from left singular vectors")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_leverage)

    p = sub.add_parser("optimize-scores", help="bisection-optimised sampling scores")
    p.add_argument("--scores", required=True, help="leverage scores file")
    p.add_argument("--gamma", type=float)
    p.add_argument("--ell", type=int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--output", "-o")
    p.add_argument("--meta", help="write the JSON metadata here instead of stderr")
    p.set_defaults(func=cmd_optimize_scores)

    p = sub.add_parser("certify", help="evaluate the spectral error bound for given scores")
    p.add_argument("--matrix", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("css-experiment", help="column sampling error per scheme and ell")
    _experiment_flags(p)
    p.set_defaults(func=cmd_css_experiment)

    p = sub.add_parser("gamma-sweep", help="optimised scores over a grid of gamma")
    _experiment_flags(p)
    p.add_argument("--gamma", type=float, nargs="+")
    p.set_defaults(func=cmd_gamma_sweep)

    p = sub.add_parser("lsq-experiment", help="variance and bias of sampled least squares")
    _experiment_flags(p, css=False)
    p.set_defaults(func=cmd_lsq_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (InvalidInput, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
