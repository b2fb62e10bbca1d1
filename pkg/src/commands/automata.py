"""
Coloring automaton commands: runs, tracked SFTs and their checks.
"""

import argparse
from typing import List

from lib.constants import EXIT_NEGATIVE, EXIT_POSITIVE, EXIT_UNKNOWN
from lib.errors import StructuralError
from lib.logging_config import get_logger
from lib.models import Outcome, Report, SearchBounds, Verdict
from lib.utils import plural

from services.automaton import (
    LetteredAutomaton,
    dichotomy_check,
    isolation_certificate,
    projection_check,
    run,
    tilde_sft,
    tracked_name,
    verify_run,
)
from services.group import IDENTITY

from commands.common import add_spec_arguments, load_spec, verdict_report

logger = get_logger("commands.automata")


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    p = subparsers.add_parser("auto-run", parents=[parent], help="run an automaton on a ball")
    add_spec_arguments(p)
    p.add_argument("--color", help="color at the start position (default: the first color)")
    p.add_argument("--start", default="e", help="start element (default e)")
    p.set_defaults(handler=auto_run)

    p = subparsers.add_parser("auto-sft", parents=[parent], help="tracked SFT of an automaton")
    add_spec_arguments(p)
    p.set_defaults(handler=auto_sft)

    p = subparsers.add_parser("auto-verify", parents=[parent], help="check runs, dichotomy and projection")
    add_spec_arguments(p)
    p.set_defaults(handler=auto_verify)


def _automaton(args: argparse.Namespace) -> LetteredAutomaton:
    return load_spec(args.spec).pick("automaton", args.name)  # type: ignore[return-value]


def auto_run(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    a = _automaton(args).automaton
    group = a.group
    color = 0
    if args.color is not None:
        if args.color not in a.colors:
            raise StructuralError(f"{args.color!r} is not a color of the automaton")
        color = a.colors.index(args.color)
    cfg = run(a, group.parse_element(args.start), color, bounds.radius)
    lines = [f"positions: {len(cfg.domain)}"]
    lines.extend(f"  {group.format_element(g)} {tracked_name(a.colors, cfg.letter(g))}" for g in cfg.domain)
    problems = verify_run(cfg)
    lines.append(f"violations: {len(problems)}")
    lines.extend(f"  {group.format_element(g)}: {reason}" for g, reason in problems)
    return Report(lines=lines, exit_code=EXIT_NEGATIVE if problems else EXIT_POSITIVE)


def auto_sft(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    lettered = _automaton(args)
    t = tilde_sft(lettered.automaton, bounds.sample_radius)
    fmt = t.sft.group.format_element
    stable = f"radius {t.stabilized_at}" if t.stabilized_at is not None else f"not within radius {t.sample_radius}"
    lines = [
        f"group: {t.sft.group.describe()}",
        f"letters: {' '.join(t.sft.alphabet)}",
        f"window: {' '.join(fmt(w) for w in t.sft.window)}",
        f"allowed rows: {len(t.sft.allowed)}",
        f"patterns stabilized: {stable}",
        "letter map:",
    ]
    lines.extend(f"  {line}" for line in lettered.letters.describe())
    return verdict_report(isolation_certificate(t), lines)


def _combined(verdicts: List[Verdict]) -> int:
    outcomes = {v.outcome for v in verdicts}
    if Outcome.NEGATIVE in outcomes:
        return EXIT_NEGATIVE
    if Outcome.UNKNOWN in outcomes:
        return EXIT_UNKNOWN
    return EXIT_POSITIVE


def auto_verify(args: argparse.Namespace, bounds: SearchBounds) -> Report:
    a = _automaton(args).automaton
    group = a.group
    lines = ["runs:"]
    broken = 0
    for color, name in enumerate(a.colors):
        problems = verify_run(run(a, IDENTITY, color, bounds.radius))
        broken += bool(problems)
        detail = f"first at {group.format_element(problems[0][0])}: {problems[0][1]}" if problems else "ok"
        lines.append(f"  {name}: {plural(len(problems), 'violation')} ({detail})")
    t = tilde_sft(a, bounds.sample_radius)
    checks = [
        ("dichotomy", dichotomy_check(t.sft, bounds.radius, bounds.margin)),
        ("projection", projection_check(t, bounds.radius, bounds.margin)),
    ]
    for title, verdict in checks:
        lines.append(f"{title}:")
        lines.extend(f"  {line}" for line in verdict.render())
    exit_code = _combined([v for _, v in checks])
    if broken:
        exit_code = EXIT_NEGATIVE
    return Report(lines=lines, exit_code=exit_code)
