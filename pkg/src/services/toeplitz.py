"""
Toeplitz coding of a 1/2 sequence omega over Z.

Level k owns the positions i with i = -1 (mod 3^(k-1)) that the lower levels
left open. Among them, i = 3^(k-1) - 1 (mod 3^k) carries omega(k) and
i = 2*3^(k-1) - 1 (mod 3^k) carries the spacer 3; the third class passes to
level k+1. After K levels the positions i = -1 (mod 3^K) are still open. They
get the filler 3 and are marked uncovered.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from lib.constants import TOEPLITZ_FILLER, TOEPLITZ_SYMBOLS
from lib.errors import CorruptionError, StructuralError
from lib.logging_config import get_logger
from lib.models import Outcome, Verdict
from lib.utils import strip_comment

logger = get_logger("services.toeplitz")

OMEGA = "omega"
SPACER = "spacer"
UNCOVERED = "uncovered"
KINDS = (OMEGA, SPACER, UNCOVERED)


def classify(i: int, depth: int) -> Tuple[str, Optional[int]]:
    """(kind, level) of position i under a coding with ``depth`` levels."""
    for k in range(1, depth + 1):
        r = i % 3 ** k
        if r == 3 ** (k - 1) - 1:
            return OMEGA, k
        if r == 2 * 3 ** (k - 1) - 1:
            return SPACER, k
    return UNCOVERED, None


@dataclass(frozen=True)
class ToeplitzWindow:
    lo: int
    hi: int
    values: Tuple[int, ...]
    kinds: Tuple[str, ...]
    levels: Tuple[Optional[int], ...]

    def __post_init__(self):
        if self.lo > self.hi:
            raise StructuralError(f"empty interval [{self.lo}, {self.hi}]")
        size = self.hi - self.lo + 1
        if not len(self.values) == len(self.kinds) == len(self.levels) == size:
            raise StructuralError("window data does not cover the interval")
        allowed = set(TOEPLITZ_SYMBOLS) | {TOEPLITZ_FILLER}
        if any(v not in allowed for v in self.values):
            raise StructuralError("window values must be 1, 2 or 3")

    def positions(self) -> range:
        return range(self.lo, self.hi + 1)

    def value(self, i: int) -> int:
        return self.values[i - self.lo]

    def level(self, i: int) -> Optional[int]:
        return self.levels[i - self.lo]

    def with_value(self, i: int, v: int) -> "ToeplitzWindow":
        values = list(self.values)
        values[i - self.lo] = v
        return ToeplitzWindow(self.lo, self.hi, tuple(values), self.kinds, self.levels)


def generate(omega: Sequence[int], lo: int, hi: int) -> ToeplitzWindow:
    if not omega:
        raise StructuralError("omega must be nonempty")
    if any(a not in TOEPLITZ_SYMBOLS for a in omega):
        raise StructuralError("omega must be a sequence over {1, 2}")
    if lo > hi:
        raise StructuralError(f"empty interval [{lo}, {hi}]")
    values, kinds, levels = [], [], []
    for i in range(lo, hi + 1):
        kind, k = classify(i, len(omega))
        kinds.append(kind)
        levels.append(k)
        values.append(omega[k - 1] if kind == OMEGA and k is not None else TOEPLITZ_FILLER)
    return ToeplitzWindow(lo, hi, tuple(values), tuple(kinds), tuple(levels))


@dataclass(frozen=True)
class Recovered:
    omega: Tuple[int, ...]
    partial: bool


def _level_positions(w: ToeplitzWindow, k: int) -> List[int]:
    period, offset = 3 ** k, 3 ** (k - 1) - 1
    return [i for i in w.positions() if i % period == offset]


def recover(w: ToeplitzWindow, levels: Optional[int] = None) -> Recovered:
    """Read omega(k) off the level-k positions until they run out or hold only filler."""
    omega: List[int] = []
    k = 1
    while levels is None or k <= levels:
        spots = _level_positions(w, k)
        if not spots:
            logger.debug(f"no level-{k} position in [{w.lo}, {w.hi}]")
            return Recovered(tuple(omega), True)
        seen = {w.value(i) for i in spots}
        if seen == {TOEPLITZ_FILLER}:
            return Recovered(tuple(omega), levels is not None and len(omega) < levels)
        if len(seen) != 1:
            raise CorruptionError(f"level {k} positions disagree: values {sorted(seen)}")
        omega.append(seen.pop())
        k += 1
    return Recovered(tuple(omega), False)


def periodicity_check(w: ToeplitzWindow) -> Verdict:
    """Every covered position at level k repeats with period 3^k inside the window."""
    failures = []
    checked = 0
    for i in w.positions():
        k = w.level(i)
        if k is None:
            continue
        checked += 1
        period = 3 ** k
        v = w.value(i)
        j = i + period
        while j <= w.hi:
            if w.value(j) != v:
                failures.append(i)
                break
            j += period
    certificate: Dict[str, object] = {"covered positions": checked, "failures": len(failures)}
    if failures:
        certificate["first failure"] = failures[0]
        return Verdict(status="not-periodic", outcome=Outcome.NEGATIVE, certificate=certificate)
    return Verdict(status="periodic", outcome=Outcome.POSITIVE, certificate=certificate)


def level_counts(w: ToeplitzWindow) -> Dict[Tuple[Optional[int], str], int]:
    return dict(sorted(
        Counter(zip(w.levels, w.kinds)).items(),
        key=lambda item: (item[0][0] is None, item[0][0] or 0, KINDS.index(item[0][1])),
    ))


def format_window(w: ToeplitzWindow) -> List[str]:
    lines = [f"interval {w.lo} {w.hi}"]
    for v, kind, k in zip(w.values, w.kinds, w.levels):
        lines.append(f"{v} {kind}" + (f" {k}" if k is not None else ""))
    return lines


def parse_window(text: str) -> ToeplitzWindow:
    lines = [strip_comment(line) for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines or not lines[0].startswith("interval"):
        raise StructuralError("window must start with 'interval lo hi'")
    try:
        _, lo, hi = lines[0].split()
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise StructuralError(f"bad interval line {lines[0]!r}")
    values, kinds, levels = [], [], []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) not in (2, 3) or parts[1] not in KINDS:
            raise StructuralError(f"bad window line {line!r}")
        try:
            values.append(int(parts[0]))
            levels.append(int(parts[2]) if len(parts) == 3 else None)
        except ValueError:
            raise StructuralError(f"bad window line {line!r}")
        kinds.append(parts[1])
    return ToeplitzWindow(lo_i, hi_i, tuple(values), tuple(kinds), tuple(levels))
