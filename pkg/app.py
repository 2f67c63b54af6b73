"""
Laplace Panels - command line front end.

Subcommands: eval (pairs from a file), validate (benchmark tables and
quadrature cross-checks), converge (offset sweeps toward touching pairs).
Record-level work runs through TaskQueue (queue_manager).
"""

import argparse
import logging
import sys

from crash_handler import install_crash_handler
from laplace_panels import ConfigError, InputError
from pair_runner import load_records, write_rows
from queue_manager import run_tasks
from settings import AppSettings
from validation_runner import (
    GOLDEN_TOLERANCE,
    ORACLE_TOLERANCE,
    format_report,
    golden_cases,
    parse_kind,
    run_sweep,
)
from version import APP_DESCRIPTION, APP_NAME, APP_VERSION

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2


def _add_common_flags(parser):
    parser.add_argument("--tol-touch", type=float, default=None, help="vertex match tolerance (relative)")
    parser.add_argument("--tol-parallel", type=float, default=None, help="parallel plane tolerance")
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")


def build_parser():
    parser = argparse.ArgumentParser(prog="laplace-panels", description=APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate L, M, L', M' for triangle pairs")
    p_eval.add_argument("input", help="JSON or CSV pair file")
    p_eval.add_argument("output", help="output file")
    p_eval.add_argument("--format", choices=("csv", "json"), default=None)
    mode = p_eval.add_mutually_exclusive_group()
    mode.add_argument("--fail-fast", dest="fail_fast", action="store_true", help="stop at the first failed record")
    mode.add_argument("--collect", dest="fail_fast", action="store_false", help="report every failed record (default)")
    p_eval.set_defaults(fail_fast=False)
    _add_common_flags(p_eval)

    p_val = sub.add_parser("validate", help="run the benchmark tables and quadrature cross-checks")
    p_val.add_argument("--tol", type=float, default=GOLDEN_TOLERANCE, help="absolute golden tolerance")
    p_val.add_argument("--no-oracle", action="store_true", help="skip quadrature cross-checks")
    p_val.add_argument("--oracle-pairs", type=int, default=5, help="random pairs to cross-check")
    p_val.add_argument("--oracle-tol", type=float, default=ORACLE_TOLERANCE)
    _add_common_flags(p_val)

    p_conv = sub.add_parser("converge", help="offset sweep toward a touching configuration")
    p_conv.add_argument("kind", help="one, two or three (shared vertices)")
    p_conv.add_argument("--eps-min", type=float, default=1e-6)
    p_conv.add_argument("--eps-max", type=float, default=1e-2)
    p_conv.add_argument("--points", type=int, default=9)
    p_conv.add_argument("--output", required=True)
    _add_common_flags(p_conv)
    return parser


def _load_settings(args, environ=None):
    settings = AppSettings(environ)
    settings.set("tol_touch", args.tol_touch)
    settings.set("tol_parallel", args.tol_parallel)
    settings.set("threads", args.threads)
    settings.set("log_level", args.log_level)
    settings.set("format", getattr(args, "format", None))
    return settings


def _configure_logging(level_name):
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise ConfigError(f"Unknown log level: {level_name}")
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


# -----------------------------------------------------------------------------
# Subcommands
# -----------------------------------------------------------------------------

def cmd_eval(args, settings):
    try:
        records = load_records(args.input)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    tolerances = settings.tolerances()
    logger.info("Evaluating %d pair(s) with %d thread(s)", len(records), settings.get("threads"))

    results = run_tasks(
        "evaluate",
        [{"record": r, "tolerances": tolerances} for r in records],
        workers=settings.get("threads"),
        fail_fast=args.fail_fast,
    )

    rows = []
    failures = 0
    for record, result in zip(records, results):
        if result is None or result["status"] == "skipped":
            continue
        if result["status"] == "success":
            rows.append(result["row"])
        else:
            failures += 1
            print(f"error: record {record.id!r}: {result['message']}", file=sys.stderr)

    written = write_rows(rows, args.output, settings.get("format"))
    if written["status"] != "success":
        print(f"error: {written['message']}", file=sys.stderr)
        return EXIT_INPUT
    logger.info(written["message"])
    return EXIT_OK if failures == 0 else EXIT_FAILURE


def cmd_validate(args, settings):
    tolerances = settings.tolerances()
    workers = settings.get("threads")
    results = run_tasks(
        "golden",
        [{"name": name, "tol": args.tol, "tolerances": tolerances} for name in golden_cases()],
        workers=workers,
    )
    if not args.no_oracle:
        results += run_tasks(
            "oracle",
            [{"seed": seed, "tol": args.oracle_tol, "tolerances": tolerances} for seed in range(args.oracle_pairs)],
            workers=workers,
        )
    print(format_report(results))
    passed = all(r is not None and r["status"] == "success" for r in results)
    print("all checks passed" if passed else "validation FAILED")
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_converge(args, settings):
    try:
        kind = parse_kind(args.kind)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    result = run_sweep(kind, args.eps_min, args.eps_max, args.points, args.output, settings.tolerances())
    if result["status"] != "success":
        print(f"error: {result['message']}", file=sys.stderr)
        return EXIT_INPUT
    for quantity, slope in result["slopes"].items():
        print(f"slope_{quantity}: {'n/a' if slope is None else f'{slope:.4f}'}")
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "validate": cmd_validate,
    "converge": cmd_converge,
}


def main(argv=None, environ=None):
    install_crash_handler()
    args = build_parser().parse_args(argv)
    try:
        settings = _load_settings(args, environ)
        _configure_logging(settings.get("log_level"))
        settings.tolerances()
        if settings.get("threads") < 1:
            raise ConfigError("threads must be >= 1")
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return COMMANDS[args.command](args, settings)


if __name__ == "__main__":
    sys.exit(main())
