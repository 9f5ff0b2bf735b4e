"""
core.py — Command-line entry point for rmhd-dg.

    rmhd-dg [-v] run <config> [--key=value ...]
    rmhd-dg [-v] sweep <config> --resolutions 10,20,40 [--key=value ...]
    rmhd-dg list-problems
    rmhd-dg init <path>

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 solver failure, 130 interrupted.
"""
from __future__ import annotations

import argparse
import logging
import sys
import traceback

from .console_utils import safe_print, set_verbose
from .dg.errors import ConfigError, NoExactSolutionError, RmhdError, UnknownProblemError
from .dg.problems import PROBLEMS
from .run_config import RunConfig

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INTERRUPTED = 130


def parse_overrides(items: list[str]) -> dict[str, str]:
    """``--key=value`` / ``key=value`` tokens to a dict. Raises ConfigError."""
    out: dict[str, str] = {}
    for item in items:
        token = item[2:] if item.startswith("--") else item
        if "=" not in token:
            raise ConfigError(f"override {item!r} is not of the form --key=value")
        key, value = token.split("=", 1)
        out[key.strip().replace("-", "_")] = value
    return out


def parse_resolutions(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"resolutions must be a comma-separated list of integers, got {text!r}") from None
    if not values:
        raise ConfigError("at least one resolution is required")
    return values


# ---------------------------------------------------------------------------
# Sub-commands
# ---------------------------------------------------------------------------

def run_command(args: argparse.Namespace) -> None:
    from .runner import run

    config = RunConfig.from_file(args.config, parse_overrides(args.overrides))
    result = run(config)
    safe_print(f"Outputs written to {result.output_dir}", "INFO")


def sweep_command(args: argparse.Namespace) -> None:
    from .runner import convergence_sweep

    config = RunConfig.from_file(args.config, parse_overrides(args.overrides))
    _, path = convergence_sweep(config, parse_resolutions(args.resolutions))
    safe_print(f"Convergence table written to {path}", "SUCCESS")


def list_problems_command(args: argparse.Namespace) -> None:
    for spec in PROBLEMS.values():
        cells = "x".join(str(n) for n in spec.cells)
        exact = " exact" if spec.has_exact else ""
        print(f"{spec.id:<12} {spec.dim}D  t_end={spec.t_end:<4g} cells={cells:<8} "
              f"M={spec.M:<5g} theta={spec.theta:<4g}{exact}  {spec.description}")


def init_command(args: argparse.Namespace) -> None:
    RunConfig.create_template(args.path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmhd-dg",
        allow_abbrev=False,
        epilog="run and sweep accept --key=value overrides of any config key.",
        description="Divergence-free RKDG solvers for 1D/2D special relativistic MHD.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Print step-level progress.")
    subparsers = parser.add_subparsers(dest="command", title="Available commands")

    p_run = subparsers.add_parser("run", allow_abbrev=False, help="Run one simulation from a config file.")
    p_run.add_argument("config", help="Config file (key=value text or .json).")
    p_run.set_defaults(func=run_command)

    p_sweep = subparsers.add_parser("sweep", allow_abbrev=False, help="Convergence sweep over resolutions.")
    p_sweep.add_argument("config", help="Config file (key=value text or .json).")
    p_sweep.add_argument("--resolutions", required=True, help="Comma-separated N values, e.g. 10,20,40,80.")
    p_sweep.set_defaults(func=sweep_command)

    p_list = subparsers.add_parser("list-problems", help="List the built-in problems and their defaults.")
    p_list.set_defaults(func=list_problems_command)

    p_init = subparsers.add_parser("init", help="Write a commented config template.")
    p_init.add_argument("path", help="Where to write the template.")
    p_init.set_defaults(func=init_command)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and dispatch; returns the exit code."""
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        if extras and getattr(args, "command", None) not in ("run", "sweep"):
            parser.error(f"unrecognized arguments: {' '.join(extras)}")
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    args.overrides = extras
    set_verbose(args.verbose)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_OK
    try:
        args.func(args)
    except (ConfigError, UnknownProblemError, NoExactSolutionError, FileNotFoundError, FileExistsError) as e:
        safe_print(str(e), "ERROR", file=sys.stderr)
        return EXIT_CONFIG
    except RmhdError as e:
        print(f"[SOLVER-FAILURE] {e.describe()}", file=sys.stderr)
        return EXIT_SOLVER
    except KeyboardInterrupt:
        print("\n[INFO] Run cancelled by user (KeyboardInterrupt).", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception as e:
        print(f"[UNEXPECTED ERROR] {e}", file=sys.stderr)
        traceback.print_exc()
        return EXIT_UNEXPECTED
    return EXIT_OK


def cli_invoke() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli_invoke()
