"""``measure-norms`` command line: compute, gen, verify, demo-density.

All output is JSON on standard output, including errors, which are emitted as
``{"error": {"code", "message", "detail"}}``. Exit codes: 0 success, 1 failed
verification, 2 invalid input, 3 precondition failure, 4 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import approx
from .errors import InvalidInput, MeasureNormError, PreconditionFailure, SolverFailure
from .io import dumps, measure_from_json, read_json, space_from_json
from .measure import SignedMeasure
from .metric import random_space_from
from .norms import KINDS, METHODS, GAP_TOL, norm
from .rng import SplitMix64
from .verify import WEIGHT_RANGE, run_verification

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_PRECONDITION, EXIT_SOLVER = 0, 1, 2, 3, 4
LOG_LEVELS = {"off": logging.CRITICAL + 1, "info": logging.INFO, "debug": logging.DEBUG}
GEN_MODES = {"euclidean": "euclidean-square", "closure": "shortest-path-closure"}


class _JsonArgParser(argparse.ArgumentParser):
    def error(self, message):
        _emit({"error": {"code": "UsageError", "message": message, "detail": {}}})
        sys.exit(EXIT_INPUT)


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")
    sys.stdout.flush()


def _configure_logging() -> None:
    level = os.environ.get("MEASURE_NORMS_LOG", "off").strip().lower()
    logging.basicConfig(
        level=LOG_LEVELS.get(level, LOG_LEVELS["off"]),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def cmd_compute(args) -> int:
    space = space_from_json(read_json(args.space))
    mu = measure_from_json(read_json(args.measure), space)
    tol = GAP_TOL if args.tol is None else args.tol
    cert = norm(mu, args.norm, args.method, base=args.base, tol=tol)
    if args.debug_lp:
        for st in cert.lp_stats:
            sys.stderr.write(dumps({"debug_lp": _lp_debug(st)}) + "\n")
    _emit(cert.to_json())
    return EXIT_OK


def _lp_debug(st: dict) -> dict:
    keys = ("route", "rows", "cols", "artificials", "pivots", "phase1_pivots", "redundant_rows",
            "backend", "solver", "augmentations")
    return {k: st[k] for k in keys if k in st}


def cmd_gen(args) -> int:
    if args.n < 1:
        raise InvalidInput(f"--n must be >= 1, got {args.n}")
    rng = SplitMix64(args.seed)
    space = random_space_from(rng, args.n, GEN_MODES[args.mode])
    mu = SignedMeasure(space, rng.uniforms(args.n, *WEIGHT_RANGE))
    _emit({"seed": args.seed, "mode": args.mode, "space": space.to_json(), "measure": mu.to_json()})
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise InvalidInput("--trials must be >= 1")
    if args.max_n < 2:
        raise InvalidInput("--max-n must be >= 2")
    report = run_verification(args.seed, args.trials, args.max_n, sabotage=args.sabotage, jobs=args.jobs)
    _emit(report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_demo_density(args) -> int:
    _emit(approx.density_series(args.density, args.max_resolution))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _JsonArgParser(prog="measure-norms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_JsonArgParser)

    p = sub.add_parser("compute", help="norm of a measure, with certificate")
    p.add_argument("--space", required=True, help="space JSON file ('-' for stdin)")
    p.add_argument("--measure", required=True, help="measure JSON file ('-' for stdin)")
    p.add_argument("--norm", required=True, choices=KINDS)
    p.add_argument("--method", default="both", choices=METHODS)
    p.add_argument("--base", type=int, default=0, help="base point for the KR dual")
    p.add_argument("--tol", type=float, default=None, help=f"primal/dual gap tolerance (default {GAP_TOL})")
    p.add_argument("--debug-lp", action="store_true", help="print LP dimensions and pivots to stderr")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("gen", help="random space and measure")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=sorted(GEN_MODES), default="euclidean")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="randomized property suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--sabotage", type=float, nargs="?", const=0.4, default=None, metavar="FACTOR",
                   help="scale every Hanin value by FACTOR (default 0.4) to check the harness can fail")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-density", help="refinement distances of a grid density")
    p.add_argument("--density", required=True, choices=sorted(approx.DENSITIES))
    p.add_argument("--max-resolution", type=int, default=32)
    p.set_defaults(func=cmd_demo_density)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        code = EXIT_INPUT
        err = exc
    except PreconditionFailure as exc:
        code = EXIT_PRECONDITION
        err = exc
    except SolverFailure as exc:
        code = EXIT_SOLVER
        err = exc
    except MeasureNormError as exc:  # pragma: no cover - every family is listed above
        code = EXIT_SOLVER
        err = exc
    _emit({"error": err.to_json()})
    return code


if __name__ == "__main__":
    sys.exit(main())
