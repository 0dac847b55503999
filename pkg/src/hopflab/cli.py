"""Command line: ``hopflab run <config>``, ``hopflab list``, ``hopflab version``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .polynomial import PolynomialFormatError
from .scenarios import ScenarioError, find_scenario, list_scenarios, load_scenario, run_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hopflab", description="Hopf hypersurface scenarios in CP^n and CH^n.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario file or canned scenario name")
    run.add_argument("config", help="path to a .cfg file, or the name of a canned scenario")
    run.add_argument("--out", type=Path, default=None, help="output directory (default: ./hopflab-out/<name>)")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--fd-step", type=float, default=None, help="finite-difference step h")
    run.add_argument("--tol", type=float, default=None, help="override the spectral comparison tolerances")
    run.add_argument("--quiet", action="store_true", help="do not echo the text report")

    ls = sub.add_parser("list", help="list canned scenarios")
    ls.add_argument("--dir", type=Path, default=None, help="also list scenarios found in this directory")

    sub.add_parser("version", help="print the version")
    return p


def _cmd_run(args) -> int:
    if args.fd_step is not None and args.fd_step <= 0:
        print("hopflab: error: --fd-step must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.tol is not None and args.tol <= 0:
        print("hopflab: error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        sc = load_scenario(find_scenario(args.config))
        t0 = time.perf_counter()
        report = run_scenario(sc, seed=args.seed, fd_step=args.fd_step, tol=args.tol)
        elapsed = time.perf_counter() - t0
    except (ScenarioError, PolynomialFormatError) as exc:
        print(f"hopflab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or Path("hopflab-out") / sc.name
    report.write(out)
    # wall time is kept apart so report.json stays byte-identical across reruns
    (out / "runtime.json").write_text(json.dumps({"seconds": round(elapsed, 3)}) + "\n")
    if not args.quiet:
        sys.stdout.write(report.to_text())
        print(f"runtime: {elapsed:.2f} s; reports in {out}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_list(args) -> int:
    if args.dir is not None and not args.dir.is_dir():
        print(f"hopflab: error: not a directory: {args.dir}", file=sys.stderr)
        return EXIT_USAGE
    for name, desc, _ in list_scenarios(args.dir):
        print(f"{name:<24} {desc}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list":
        return _cmd_list(args)
    print(__version__)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
