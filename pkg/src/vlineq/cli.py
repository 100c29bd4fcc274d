"""Command line entry point: ``vlineq verify`` and ``vlineq generate``.

Exit codes:
    0  every check passed
    1  at least one check failed
    2  usage error (bad arguments, unknown suite, invalid dims)
    3  instance file unreadable or not well-formed JSON
    4  instance file violates a load-time invariant
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import DomainError, InstanceParseError, InstanceValidationError
from .instances import KINDS, generate_instance, load_instance, parse_dims, save_instance
from .lattice import DEFAULT_GRID
from .suites import SUITES, config_with, run_instance, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVALID = 4

SEED_ENV = "VLINEQ_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"vlineq: {SEED_ENV} must be an integer, got {raw!r}") from None


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlineq", description="Verify lattice inequalities on finite coordinatewise models.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks from an instance file or seeded property suites")
    v.add_argument("--instance", type=Path, help="instance JSON; without it, random suites are run")
    v.add_argument("--suite", choices=SUITES + ("all",), help="suite to run (default: all)")
    v.add_argument("--tol", type=float, help=f"absolute tolerance (default {DEFAULT_GRID.abs_tol})")
    v.add_argument("--grid-theta", type=int, help=f"theta grid intervals (default {DEFAULT_GRID.theta_points})")
    v.add_argument("--grid-lambda", type=int, help="lambda grid points for the complex field (default 1024)")
    v.add_argument("--refine", type=int, help=f"refinement iterations (default {DEFAULT_GRID.refine_iters})")
    v.add_argument("--trials", type=int, help="trials per suite (default: per-suite sizes)")
    v.add_argument("--seed", type=_u64, help=f"random seed (default ${SEED_ENV} or 0)")
    v.add_argument("--format", choices=("json", "text"), default="json")
    v.add_argument("--report", type=Path, help="write the report here instead of stdout")

    g = sub.add_parser("generate", help="write a seeded random instance file")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--dims", required=True, help="m,n")
    g.add_argument("--seed", type=_u64, help=f"random seed (default ${SEED_ENV} or 0)")
    g.add_argument("--field", choices=("real", "complex"), help="scalar field (default depends on kind)")
    g.add_argument("--out", type=Path, required=True)
    return parser


def _verify(args, parser) -> int:
    try:
        cfg = config_with(
            DEFAULT_GRID,
            abs_tol=args.tol,
            theta_points=args.grid_theta,
            lambda_points=args.grid_lambda,
            refine_iters=args.refine,
        )
    except DomainError as exc:
        parser.error(str(exc))
    if args.trials is not None and args.trials < 0:
        parser.error("--trials must be >= 0")
    seed = args.seed if args.seed is not None else default_seed()

    if args.instance is not None:
        try:
            inst = load_instance(args.instance)
        except InstanceParseError as exc:
            print(f"vlineq: parse error: {exc}", file=sys.stderr)
            return EXIT_PARSE
        except InstanceValidationError as exc:
            print(f"vlineq: invalid instance: {exc}", file=sys.stderr)
            return EXIT_INVALID
        report = run_instance(inst, cfg, args.suite)
        report.seed = seed
    else:
        report = run_suite(args.suite or "all", cfg, args.trials, seed)

    out = report.to_json() if args.format == "json" else report.to_text()
    if args.report is not None:
        args.report.write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK if report.passed else EXIT_FAILED


def _generate(args, parser) -> int:
    try:
        dims = parse_dims(args.dims)
        seed = args.seed if args.seed is not None else default_seed()
        inst = generate_instance(args.kind, dims, seed, args.field)
    except (ValueError, DomainError) as exc:
        parser.error(str(exc))
    save_instance(inst, args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return _verify(args, parser)
    return _generate(args, parser)


if __name__ == "__main__":
    sys.exit(main())
