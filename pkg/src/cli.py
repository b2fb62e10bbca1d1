"""
symdyn command line.

This is the main entry point. Each subcommand reads a .sds spec file (or
plain arguments), runs one library operation and prints a deterministic
report on stdout. Diagnostics go to stderr.

Exit codes:
- 0: definite positive result or success
- 1: definite negative result
- 2: unknown, or a search bound was exhausted
- 3: input error

Architecture:
- Commands organized in the commands/ package, one module per concern
- Library code in services/ and lib/
- Search bounds come from config.json, overridden by flags
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from lib.config import Config
from lib.constants import EXIT_INPUT_ERROR
from lib.errors import StructuralError, SymdynError
from lib.logging_config import get_logger, set_level
from lib.models import SearchBounds

from commands import analysis, automata, products, shadowing, sofic, toeplitz, words

logger = get_logger("cli")

COMMAND_MODULES = (words, products, sofic, analysis, automata, shadowing, toeplitz)

# Flags that override keys of the config file
BOUND_FLAGS = ("radius", "window", "length", "depth", "cap", "margin", "sample_radius", "seed")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _bounds_parser() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    bounds = parent.add_argument_group("search bounds")
    bounds.add_argument("--radius", type=int, help="ball radius (default 3)")
    bounds.add_argument("--window", type=int, help="refutation search window (default 4)")
    bounds.add_argument("--length", type=int, help="word length (default 8)")
    bounds.add_argument("--depth", type=int, help="levels searched (default 4)")
    bounds.add_argument("--cap", type=int, help="recoding cap (default 6)")
    bounds.add_argument("--margin", type=int, help="extension margin (default 2)")
    bounds.add_argument("--sample-radius", type=int, help="run radius for sampling automata (default 4)")
    bounds.add_argument("--seed", type=int, help="seed for randomized choices (default 0)")
    parent.add_argument("--config", type=Path, help="JSON file with search bounds")
    parent.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symdyn", description="Computational symbolic dynamics over free products of groups.")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    parent = _bounds_parser()
    for module in COMMAND_MODULES:
        module.register(subparsers, parent)
    return parser


def resolve_bounds(args: argparse.Namespace) -> SearchBounds:
    """Config file values, then flag overrides, validated together."""
    if args.config is not None and not args.config.exists():
        raise StructuralError(f"config file {args.config} does not exist")
    config = Config(args.config)
    overrides = {key: getattr(args, key) for key in BOUND_FLAGS if getattr(args, key, None) is not None}
    try:
        return SearchBounds(**{**config.as_dict(), **overrides})
    except ValidationError as e:
        first = e.errors()[0]
        raise StructuralError(f"--{str(first['loc'][0]).replace('_', '-')}: {first['msg']}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    try:
        bounds = resolve_bounds(args)
        logger.debug(f"{args.command} with bounds {bounds.model_dump()}")
        report = args.handler(args, bounds)
    except SymdynError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    sys.stdout.write(report.text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
