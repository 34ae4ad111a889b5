#!/usr/bin/env python3
"""
Main entry point for debranges-lab.

Subcommands: factor, model, check, dilate, reproduce, question8. Every run
writes one report (JSON, or CSV for sampled-function tables) to --output or
stdout and exits with 0/1/2 for positive/negative/undecided verdicts, 3 for
an extreme input and 4 for any other error.
"""
import argparse
import os
import sys

from dotenv import load_dotenv

# Add project root to path for imports
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from config import validated_config
from core.exceptions import LabError
from data_modules.serialization import (
    dump_report,
    load_spec,
    save_csv_table,
    save_report,
    write_csv_table,
)
from services.report_service import (
    Report,
    handle_check,
    handle_dilate,
    handle_factor,
    handle_model,
)
from services.reproduction import example_4, question8, section_8
from utils.config import RunConfig
from utils.logging import get_logger, setup_logging

LOGGED_PACKAGES = ("debranges_lab", "core", "services", "data_modules")
UNEXPECTED_EXIT = 4
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

logger = get_logger("debranges_lab")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON spec file (function, pair or operator)")
    common.add_argument("--truncation", type=int, help="truncation order N (power of two)")
    common.add_argument("--grid", type=int, help="boundary grid size (power of two)")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VAL",
                        help="override a named tolerance; repeatable")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--threads", type=int,
                        help="worker threads for grid scans (env DEBRANGES_LAB_THREADS)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="report format")
    common.add_argument("--print-config", action="store_true",
                        help="print the effective run configuration and exit")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="override LOG_LEVEL")

    parser = argparse.ArgumentParser(
        prog="debranges-lab",
        description="debranges-lab - numerical de Branges-Rovnyak models and contraction diagnostics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  debranges-lab factor --input b.json                 # Pythagorean mate of b
  debranges-lab model --input b.json --tilde          # truncated model and its invariants
  debranges-lab check --input pair.json               # C1-C4 diagnostics, exit 0/1/2
  debranges-lab dilate --input b.json --xi 1,0        # T_xi over the model of b
  debranges-lab reproduce example-4                   # no outer combination for small a
  debranges-lab question8 --input b.json --grid-theta 45
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("factor", parents=[common], help="Pythagorean mate of b")
    model = sub.add_parser("model", parents=[common], help="truncated model of b")
    model.add_argument("--tilde", action="store_true", help="also build the larger model")
    model.add_argument("--tilde-modes", type=int, help="negative modes M of the larger model")
    sub.add_parser("check", parents=[common], help="C1-C4 diagnostics for a pair or an operator")
    dilate = sub.add_parser("dilate", parents=[common], help="one-step dilation T_xi")
    dilate.add_argument("--xi", help="unit vector as two complex numbers, e.g. 0.6,0.8j")
    dilate.add_argument("--chain", type=int, help="length m of the shift chain")
    dilate.add_argument("--save-operator", metavar="PATH", help="also write T_xi as an operator spec")
    reproduce = sub.add_parser("reproduce", parents=[common], help="worked examples")
    reproduce.add_argument("name", choices=["example-4", "section-8"])
    q8 = sub.add_parser("question8", parents=[common], help="exploratory outer-combination scan")
    q8.add_argument("--grid-theta", type=int, help="theta samples on [0, pi/2]")
    q8.add_argument("--grid-psi", type=int, help="psi samples on [0, 2pi)")
    return parser


def parse_xi(text):
    """Parse "x1,x2" into two complex numbers."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"--xi needs two comma separated components, got {text!r}")
    return [complex(p) for p in parts]


def run_config(args):
    config = RunConfig.from_config(validated_config())
    threads = args.threads
    if threads is None and os.getenv("DEBRANGES_LAB_THREADS"):
        threads = int(os.getenv("DEBRANGES_LAB_THREADS"))
    config = config.with_overrides(
        args.tol,
        truncation=args.truncation,
        grid_size=args.grid,
        seed=args.seed,
        threads=threads,
        output=args.output,
        format=args.format,
        theta_grid=getattr(args, "grid_theta", None),
        psi_grid=getattr(args, "grid_psi", None),
        tilde_modes=getattr(args, "tilde_modes", None),
    )
    return config.validate()


def _require_input(args):
    if not args.input:
        raise ValueError(f"{args.command} needs --input")
    return load_spec(args.input)


def dispatch(args, config):
    """Run one subcommand and return its Report."""
    if args.command == "factor":
        return handle_factor(_require_input(args), config)
    if args.command == "model":
        return handle_model(_require_input(args), config, with_tilde=args.tilde)
    if args.command == "check":
        return handle_check(_require_input(args), config)
    if args.command == "dilate":
        xi = parse_xi(args.xi) if args.xi else None
        return handle_dilate(_require_input(args), config, xi=xi, m=args.chain, operator_path=args.save_operator)
    if args.command == "reproduce":
        payload = example_4(config) if args.name == "example-4" else section_8(config)
        return Report(payload)
    if args.command == "question8":
        return Report(question8(_require_input(args), config, args.grid_theta, args.grid_psi))
    raise ValueError(f"unknown command {args.command!r}")


def emit(report, output=None, fmt="json"):
    """Write the report as JSON, or its table as CSV when one exists."""
    if fmt == "csv" and report.table is None:
        logger.warning("this report has no sampled table; writing JSON instead of CSV")
        fmt = "json"
    if fmt == "csv":
        header, rows = report.table
        if output:
            save_csv_table(header, rows, output)
        else:
            write_csv_table(header, rows, sys.stdout)
        return
    if output:
        save_report(report.payload, output)
    else:
        sys.stdout.write(dump_report(report.payload) + "\n")


def error_report(command, error):
    payload = {"command": command, "error": {"type": type(error).__name__, "message": str(error)}}
    if isinstance(error, LabError):
        payload["error"].update(error.to_dict())
    return payload


def main(argv=None):
    """Parse arguments, run the requested subcommand and return the exit code."""
    load_dotenv()

    parser = build_parser()
    args = parser.parse_args(argv)

    for name in LOGGED_PACKAGES:
        setup_logging(name, level=args.log_level)

    try:
        config = run_config(args)
    except ValueError as e:
        logger.error(f"Configuration error: {e}")
        emit(Report(error_report(args.command, e)), args.output)
        return UNEXPECTED_EXIT

    if args.print_config:
        emit(Report({"config": config.to_dict()}), config.output)
        return 0

    logger.info(f"Running {args.command} with N={config.truncation}, grid={config.grid_size}")
    try:
        report = dispatch(args, config)
    except LabError as e:
        logger.error(f"{args.command} failed: {e}")
        emit(Report(error_report(args.command, e)), config.output)
        return e.exit_code
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        emit(Report(error_report(args.command, e)), config.output)
        return UNEXPECTED_EXIT
    except Exception as e:
        logger.critical(f"Fatal error: {e}", exc_info=True)
        emit(Report(error_report(args.command, e)), config.output)
        return UNEXPECTED_EXIT

    emit(report, config.output, config.format)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
