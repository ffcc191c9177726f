#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
opcalc command line
-------------------
Checks and computations on the endomorphism operad of a finite-dimensional
algebra given as a JSON file:

1. check-operad / check-module: structural axioms
2. identities: the calculus identity battery
3. homology: Hochschild and cyclic homology dimensions
4. bracket: Gerstenhaber, BV and cyclic brackets
5. report-all: everything above on one or more algebras

Exit codes: 0 when every requested check passes, 1 when an identity fails
or a structure is refused, 2 on an input or configuration error.
"""

import argparse
import os
import sys
import logging
import time

from opcalc.config import Config
from opcalc.exceptions import InputError, OpcalcError
from opcalc.report import default_report_path
from opcalc.runner import BRACKETS, HOMOLOGY_VARIANTS, SIDES, SUITE_CHOICES, JobConfig, run

EXIT_FAILED = 1
EXIT_INPUT = 2


def setup_logging(log_level, log_file="opcalc.log"):
    """Set up logging configuration"""
    numeric_level = getattr(logging, log_level.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Invalid log level: {log_level}")

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True
    )
    return logging.getLogger("opcalc")


def _common(parser, many=False):
    parser.add_argument(
        "algebra",
        nargs="+" if many else None,
        help="Algebra specification file(s) (JSON)" if many else "Algebra specification file (JSON)"
    )
    parser.add_argument(
        "--nmax",
        help="Truncation bound on arities and chain degrees (default: from config, 5)",
        type=int,
        default=None
    )
    parser.add_argument(
        "--field",
        help="Ground field: Q, F101, Fp:101 (default: the field named in the file, else [engine] field)",
        default=None
    )
    parser.add_argument(
        "--stability",
        help="Rerun at nmax + stability_offset and fail if a trusted verdict changes",
        action="store_true"
    )
    parser.add_argument(
        "--field-check",
        help="Rerun over F101 and fail if a verdict differs",
        action="store_true"
    )
    parser.add_argument(
        "-o", "--out",
        help="Report path (default: <output_dir>/<command>_<algebra>.json)",
        default=None
    )


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description="Exact homological algebra of operads with multiplication")

    parser.add_argument(
        "-c", "--config",
        help="Path to configuration file",
        default="config.ini"
    )
    parser.add_argument(
        "--log-level",
        help="Logging level (default: from config)",
        choices=["debug", "info", "warning", "error", "critical"],
        default=None
    )
    parser.add_argument(
        "--no-progress",
        help="Hide progress bars",
        action="store_true"
    )

    commands = parser.add_subparsers(dest="command", required=True)

    _common(commands.add_parser("check-operad", help="Operad, cosimplicial and cyclic axioms"))
    _common(commands.add_parser("check-module", help="Opposite-module and simplicial axioms of the chains"))

    identities = commands.add_parser("identities", help="Calculus identity battery")
    _common(identities)
    identities.add_argument("--suite", choices=SUITE_CHOICES, default="all", help="Identity suite (default: all)")

    homology = commands.add_parser("homology", help="Hochschild and cyclic homology")
    _common(homology)
    homology.add_argument("--variant", choices=HOMOLOGY_VARIANTS, default="cyclic",
                          help="Cyclic variant (default: cyclic)")

    bracket = commands.add_parser("bracket", help="Brackets on (cyclic) cohomology")
    _common(bracket)
    bracket.add_argument("--which", choices=BRACKETS, required=True, help="Bracket to compute")
    bracket.add_argument("--side", choices=SIDES, default="chains",
                         help="Duality instance: Hochschild chains or the operad as a module (default: chains)")

    _common(commands.add_parser("report-all", help="Every check and computation"), many=True)

    return parser.parse_args(argv)


def job_from_arguments(args, config):
    inputs = args.algebra if isinstance(args.algebra, list) else [args.algebra]
    max_degree = config.getint("engine", "bracket_max_degree")
    return JobConfig(
        command=args.command,
        inputs=inputs,
        field=args.field,
        n_max=args.nmax if args.nmax is not None else config.getint("engine", "n_max"),
        suite=getattr(args, "suite", "all"),
        which=getattr(args, "which", "thmA"),
        variant=getattr(args, "variant", "cyclic"),
        side=getattr(args, "side", "chains"),
        stability=args.stability,
        field_check=args.field_check,
        out=args.out,
        margin=config.getint("engine", "window_margin"),
        stability_offset=config.getint("engine", "stability_offset"),
        include_tables=config.getboolean("report", "include_tables"),
        max_degree=max_degree if max_degree and max_degree > 0 else None,
        default_field=config.get("engine", "field"),
    )


def run_cli(argv=None):
    """Run one command; returns the process exit code."""
    args = parse_arguments(argv)

    try:
        config = Config(args.config, create=False)
    except InputError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_INPUT

    log_level = args.log_level or config.get("logging", "level").lower()
    try:
        logger = setup_logging(log_level, config.get("logging", "log_file"))
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_INPUT

    try:
        job = job_from_arguments(args, config).validate()
        logger.info(f"=== {job.command}: {', '.join(os.path.basename(p) for p in job.inputs)} ===")
        print(f"Running {job.command} at n_max = {job.n_max}...")

        start_time = time.time()
        report, exit_code = run(job, config, progress=not args.no_progress)
        elapsed = time.time() - start_time

        out = job.out or default_report_path(config, job.command, job.inputs)
        report.save(out)
    except InputError as e:
        logger.error(f"Input error: {e}")
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OpcalcError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED

    summary = report.state["summary"]
    print(f"\n--- {job.command} complete ---")
    print(f"Processing time: {elapsed:.2f} seconds")
    print(f"Sections: {summary['sections']}, passed: {summary['passed']}, "
          f"failed: {summary['failed']}, refused: {summary['refused']}")
    for name in summary["failing"]:
        print(f"  FAILED: {name}")
    print(f"Report: {out}")
    return exit_code


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
