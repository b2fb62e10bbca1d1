"""
Shared helpers for command handlers.

Handlers take the parsed arguments and the resolved search bounds and return
a Report; they never print or exit themselves.
"""

import argparse
from pathlib import Path
from typing import Iterable

from lib.errors import StructuralError
from lib.logging_config import get_logger
from lib.models import Report, Verdict

from services.specfile import SpecFile, parse_spec

logger = get_logger("commands.common")


def add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("spec", type=Path, help="path to a .sds spec file")
    parser.add_argument("--name", help="section to use when the file defines several")


def load_spec(path: Path) -> SpecFile:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise StructuralError(f"cannot read {path}: {e.strerror}")
    logger.debug(f"Parsing {path}")
    return parse_spec(text)


def write_text(path: Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise StructuralError(f"cannot write {path}: {e.strerror}")
    logger.info(f"Wrote {path}")


def verdict_report(verdict: Verdict, header: Iterable[str] = ()) -> Report:
    return Report(lines=list(header) + verdict.render(), exit_code=verdict.outcome.exit_code)
