"""
Sofic image and equality commands.
"""

import argparse
from pathlib import Path

from lib.constants import EXIT_NEGATIVE
from lib.errors import SpecSyntaxError
from lib.logging_config import get_logger
from lib.models import Report, SearchBounds
from lib.utils import format_word

from services.codes import AlphabetMap
from services.sofic import SoficPresentation, canonical_form, image_sofic, sofic_equal
from services.specfile import SpecFile

from commands.common import load_spec, write_text

logger = get_logger("commands.sofic")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("image", parents=[parent], help="sofic image of a Z-SFT under a letter map")
    p.add_argument("spec", type=Path, help="path to a .sds spec file")
    p.add_argument("sft", help="sft section")
    p.add_argument("map", help="map section, or 'identity'")
    p.add_argument("--gml", type=Path, help="write the canonical presentation as GML to this file")
    p.set_defaults(handler=image)

    p = subparsers.add_parser("sofic-eq", parents=[parent], help="compare two sofic shifts")
    p.add_argument("spec", type=Path, help="path to a .sds spec file")
    p.add_argument("first", help="presentation or sft section")
    p.add_argument("second", help="presentation or sft section")
    p.set_defaults(handler=sofic_eq)


def _presentation(spec: SpecFile, name: str) -> SoficPresentation:
    """A presentation section, or an sft section read through the identity."""
    if name in spec.names("presentation"):
        return spec.get("presentation", name)  # type: ignore[return-value]
    if name in spec.names("sft"):
        x = spec.sft(name)
        return image_sofic(x, AlphabetMap.identity(x.alphabet))
    raise SpecSyntaxError(f"no presentation or sft named {name!r}")


def image(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    x = spec.sft(args.sft)
    m = AlphabetMap.identity(x.alphabet) if args.map == "identity" else spec.alphabet_map(args.map)
    raw = image_sofic(x, m)
    canonical = canonical_form(raw)
    lines = [
        f"presentation vertices: {raw.vertex_count}",
        f"right-resolving: {'yes' if raw.is_right_resolving() else 'no'}",
        "canonical form:",
    ]
    lines.extend(f"  {line}" for line in canonical.describe())
    if args.gml:
        write_text(args.gml, canonical.to_gml())
    return Report(lines=lines)


def sofic_eq(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    spec = load_spec(args.spec)
    first, second = _presentation(spec, args.first), _presentation(spec, args.second)
    equal = sofic_equal(first, second)
    lines = [
        f"status: {'equal' if equal else 'different'}",
        f"canonical vertices: {canonical_form(first).vertex_count} / {canonical_form(second).vertex_count}",
    ]
    if not equal:
        for n in range(1, bounds.length + 1):
            diff = first.language(n) ^ second.language(n)
            if diff:
                word = min(diff)
                side = args.first if word in first.language(n) else args.second
                lines.append(f"distinguishing word: {format_word(first.labels, word)} (only in {side})")
                break
        return Report(lines=lines, exit_code=EXIT_NEGATIVE)
    return Report(lines=lines)
