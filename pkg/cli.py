#!/usr/bin/env python3
"""
Well-rounded lattices from monic integer polynomials

    python cli.py analyze 6,6
    python cli.py minvec 6,6,-6,-7
    python cli.py sweep --family f2r --a -12 12 --b -12 12 --out r.csv
    python cli.py verify

Exit codes: 0 success, 1 usage or parse error, 2 unsupported structure,
3 verification failure.
"""
import argparse
import os
import re
import sys
from pathlib import Path
from typing import List, Optional

import yaml
from loguru import logger
from pydantic import ValidationError

from src.constructions import build
from src.criteria import verdict_for
from src.errors import (InternalConsistencyError, InvalidFamilyError, LatticeError,
                        UnsupportedStructureError)
from src.models import ConstructionFamily, Settings, SweepSpec
from src.polynomials import parse_coefficients
from src.report_generator import TableReportGenerator
from src.svp_engine import center_density_sq, minimal_vector_embeddings, shortest_vectors
from src.utils import dumps_json, load_settings, save_to_csv, save_to_json, setup_logging
from src.verifier import (report_to_csv, report_to_dict, report_to_json, run_sweep,
                          run_verification)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSUPPORTED = 2
EXIT_FAILED = 3

# "-6,6" would otherwise be read as an option
_NEGATIVE_COEFFICIENTS = re.compile(r"^-\d+(,\s*-?\d+)+$")


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _range(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _gamma_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma^2 values must be integers: {text!r}") from None


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="wrlat", description="Well-rounded lattices from monic polynomials")
    parser.add_argument("--config", help="Path to config.yaml (default: WRLAT_CONFIG or ./config.yaml)")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    parser.add_argument("--log-dir", help="Also write wrlat.log into this directory")
    commands = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    commands.required = True

    for name, text in (("analyze", "Full report for one polynomial"),
                       ("minvec", "List the minimal vectors of one polynomial's lattice")):
        command = commands.add_parser(name, help=text)
        command.add_argument("coefficients", help="Monic tail a,b[,c[,d]]")
        command.add_argument("--json", action="store_true", help="Machine-readable output")
        command.add_argument("--out", help="Write the output to this file")

    sweep = commands.add_parser("sweep", help="Check the theorem over a coefficient grid")
    sweep.add_argument("--family", required=True, help="f2r, f2c, f3r or f4s")
    for name in ("a", "b", "c", "p"):
        sweep.add_argument(f"--{name}", nargs=2, type=_range, metavar=("LO", "HI"))
    sweep.add_argument("--gamma-sq", type=_gamma_list, help="Comma-separated gamma^2 values")
    sweep.add_argument("--box-margin", type=int)
    sweep.add_argument("--workers", type=int)
    formats = sweep.add_mutually_exclusive_group()
    formats.add_argument("--json", action="store_true")
    formats.add_argument("--csv", action="store_true")
    sweep.add_argument("--out", help="Write records to this file (.csv or .json)")
    sweep.add_argument("--save", action="store_true",
                       help="Write CSV and JSON into the configured output directory")

    verify = commands.add_parser("verify", help="Acceptance grids, identities and golden values")
    verify.add_argument("--json", action="store_true")
    verify.add_argument("--samples", type=int, help="Oracle cross-checks per family")
    verify.add_argument("--workers", type=int)
    return parser


def _normalise_argv(argv: List[str]) -> List[str]:
    """Move a negative coefficient list behind "--" so argparse keeps it positional"""
    if "--" in argv:
        return argv
    for i, token in enumerate(argv):
        if _NEGATIVE_COEFFICIENTS.match(token):
            return argv[:i] + argv[i + 1:] + ["--", token]
    return argv


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info(f"Output saved to {path}")


def cmd_analyze(args, settings: Settings) -> int:
    instance = build(parse_coefficients(args.coefficients))
    result = shortest_vectors(instance.gram)
    verdict = verdict_for(instance)
    density = center_density_sq(instance.gram, result)
    generator = TableReportGenerator()
    if args.json:
        text = dumps_json(generator.analysis_dict(instance, result, verdict, density))
    else:
        text = generator.analysis(instance, result, verdict, density)
    _emit(text, args.out)
    return EXIT_OK


def cmd_minvec(args, settings: Settings) -> int:
    instance = build(parse_coefficients(args.coefficients))
    result = shortest_vectors(instance.gram)
    embeddings = minimal_vector_embeddings(instance, result)
    generator = TableReportGenerator()
    if args.json:
        text = dumps_json(generator.minimal_vectors_list(result, embeddings))
    else:
        text = generator.minimal_vectors(instance, result, embeddings)
    _emit(text, args.out)
    return EXIT_OK


def _sweep_spec(args, settings: Settings) -> SweepSpec:
    family = ConstructionFamily.from_tag(args.family)
    spec = settings.sweep_spec(family)
    overrides = {
        "a_range": args.a, "b_range": args.b, "c_range": args.c, "p_range": args.p,
        "gamma_sq_values": args.gamma_sq, "box_margin": args.box_margin,
    }
    updates = {key: value for key, value in overrides.items() if value is not None}
    return SweepSpec.model_validate({**spec.model_dump(), **updates})


def cmd_sweep(args, settings: Settings) -> int:
    spec = _sweep_spec(args, settings)
    workers = settings.workers if args.workers is None else args.workers
    if workers < 1:
        raise UsageError("--workers must be at least 1")
    report = run_sweep(spec, workers=workers, gram_tolerance=settings.gram_tolerance)
    summary = TableReportGenerator().sweep_summary(report)

    use_json = args.json or (args.out is not None and not args.csv
                             and Path(args.out).suffix.lower() == ".json")
    if args.out is not None:
        _emit(report_to_json(report) if use_json else report_to_csv(report), args.out)
        sys.stdout.write(summary)
    elif args.json or args.csv:
        # stdout carries only the records; the summary goes to stderr
        sys.stdout.write(report_to_json(report) if args.json else report_to_csv(report))
        sys.stderr.write(summary)
    else:
        sys.stdout.write(summary)

    if args.save:
        stem = Path(settings.output.output_dir) / f"{settings.output.filename_prefix}_{spec.family.value}"
        saved = save_to_csv(report.records, stem.with_suffix(".csv"))
        saved = save_to_json(report_to_dict(report), stem.with_suffix(".json")) and saved
        if not saved:
            logger.error("Sweep results could not be saved")
            return EXIT_USAGE

    return EXIT_FAILED if report.mismatches else EXIT_OK


def cmd_verify(args, settings: Settings) -> int:
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        settings = settings.model_copy(update={"workers": args.workers})
    if args.samples is not None and args.samples < 0:
        raise UsageError("--samples must not be negative")
    summary = run_verification(settings, samples=args.samples)
    generator = TableReportGenerator()
    if args.json:
        sys.stdout.write(dumps_json(generator.verification_dict(summary)))
    else:
        sys.stdout.write(generator.verification(summary))
    for failure in summary.failures:
        logger.error(failure)
    return EXIT_OK if summary.passed else EXIT_FAILED


COMMANDS = {
    "analyze": cmd_analyze,
    "minvec": cmd_minvec,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_normalise_argv(argv))
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE

    # console level until the config file says otherwise
    setup_logging("DEBUG" if args.verbose else os.getenv("WRLAT_LOG_LEVEL", "WARNING"))
    try:
        settings = load_settings(args.config)
    except (OSError, ValidationError, ValueError, yaml.YAMLError) as e:
        sys.stderr.write(f"error: cannot load settings: {e}\n")
        return EXIT_USAGE

    level = "DEBUG" if args.verbose else os.getenv("WRLAT_LOG_LEVEL", settings.logging.console_level)
    setup_logging(level, args.log_dir, settings.logging.file_level)

    try:
        return COMMANDS[args.command](args, settings)
    except (InvalidFamilyError, UnsupportedStructureError) as e:
        logger.debug(f"Unsupported input: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_UNSUPPORTED
    except InternalConsistencyError as e:
        logger.error(f"Consistency check failed: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILED
    except (UsageError, LatticeError, ValidationError) as e:
        logger.debug(f"Invalid input: {e}")
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
