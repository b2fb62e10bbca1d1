"""
Alphabet maps and sliding-block codes.

A sliding-block code reads the pattern on g.window and writes one letter at g.
Alphabet maps are the 1-block special case and double as the bonding maps of
inverse systems and the letter maps of coloring automata.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from lib.errors import StructuralError
from lib.logging_config import get_logger

from services.group import IDENTITY, Group, GroupElement, make_support
from services.patterns import Pattern, Row

logger = get_logger("services.codes")


@dataclass(frozen=True)
class AlphabetMap:
    """Total map source -> target, stored as one target index per source letter."""

    source: Tuple[str, ...]
    target: Tuple[str, ...]
    images: Tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise StructuralError("alphabet map must assign an image to every source letter")
        if any(not 0 <= b < len(self.target) for b in self.images):
            raise StructuralError("alphabet map image outside the target alphabet")

    @classmethod
    def from_names(
        cls, source: Sequence[str], target: Sequence[str], mapping: Mapping[str, str]
    ) -> "AlphabetMap":
        missing = [a for a in source if a not in mapping]
        if missing:
            raise StructuralError(f"alphabet map is not total: no image for {missing[0]!r}")
        index = {name: k for k, name in enumerate(target)}
        try:
            images = tuple(index[mapping[a]] for a in source)
        except KeyError as e:
            raise StructuralError(f"image {e.args[0]!r} is not in the target alphabet")
        return cls(tuple(source), tuple(target), images)

    @classmethod
    def identity(cls, alphabet: Sequence[str]) -> "AlphabetMap":
        return cls(tuple(alphabet), tuple(alphabet), tuple(range(len(alphabet))))

    @property
    def is_surjective(self) -> bool:
        return set(self.images) == set(range(len(self.target)))

    def __call__(self, a: int) -> int:
        return self.images[a]

    def then(self, after: "AlphabetMap") -> "AlphabetMap":
        """self followed by ``after``."""
        if after.source != self.target:
            raise StructuralError("alphabet maps do not compose: alphabets differ")
        return AlphabetMap(self.source, after.target, tuple(after.images[b] for b in self.images))

    def apply(self, word: Iterable[int]) -> Tuple[int, ...]:
        return tuple(self.images[a] for a in word)

    def preimages(self, b: int) -> List[int]:
        return [a for a, image in enumerate(self.images) if image == b]

    def describe(self) -> List[str]:
        return [f"{a} -> {self.target[b]}" for a, b in zip(self.source, self.images)]


@dataclass(frozen=True)
class SlidingBlockCode:
    """Local rule on a window; the rule is total on its declared source rows."""

    group: Group
    source: Tuple[str, ...]
    target: Tuple[str, ...]
    window: Tuple[GroupElement, ...]
    rule: Tuple[Tuple[Row, int], ...]

    def __post_init__(self):
        if tuple(make_support(self.window)) != tuple(self.window):
            raise StructuralError("code window must be duplicate-free and in canonical order")
        for row, b in self.rule:
            if len(row) != len(self.window) or any(not 0 <= a < len(self.source) for a in row):
                raise StructuralError(f"rule row {row} does not fit the window")
            if not 0 <= b < len(self.target):
                raise StructuralError("rule output outside the target alphabet")

    @classmethod
    def from_table(
        cls,
        group: Group,
        source: Sequence[str],
        target: Sequence[str],
        window: Sequence[GroupElement],
        table: Mapping[Row, int],
    ) -> "SlidingBlockCode":
        return cls(group, tuple(source), tuple(target), make_support(window), tuple(sorted(table.items())))

    @cached_property
    def table(self) -> Dict[Row, int]:
        return dict(self.rule)

    def local(self, row: Row) -> int:
        try:
            return self.table[row]
        except KeyError:
            raise StructuralError(f"local rule is undefined on {row}")


def one_block(group: Group, m: AlphabetMap) -> SlidingBlockCode:
    """The 1-block code of an alphabet map."""
    table = {(a,): b for a, b in enumerate(m.images)}
    return SlidingBlockCode.from_table(group, m.source, m.target, (IDENTITY,), table)


def apply_code(c: SlidingBlockCode, p: Pattern) -> Pattern:
    """Image of p on every g with g.window inside its support.

    An empty result means no window fits; callers treat it as degenerate.
    """
    values = p.as_dict()
    out = {}
    anchor_inv = c.group.inverse(c.window[0])
    for h in sorted(values):
        g = c.group.multiply(h, anchor_inv)
        cells = [c.group.multiply(g, w) for w in c.window]
        if all(cell in values for cell in cells):
            out[g] = c.local(tuple(values[cell] for cell in cells))
    if not out:
        logger.info("code window does not fit inside the pattern support")
    return Pattern.from_mapping(out)


def compose(first: SlidingBlockCode, second: SlidingBlockCode) -> SlidingBlockCode:
    """The code x -> second(first(x)).

    Its window is {w2 w1}; the rule is defined on every row whose sub-rows on
    each w2.window1 lie in the first rule's domain and whose intermediate row
    lies in the second rule's domain.
    """
    if first.group != second.group:
        raise StructuralError("codes over different groups do not compose")
    if first.target != second.source:
        raise StructuralError("codes do not compose: alphabets differ")
    group = first.group
    window = make_support(group.multiply(w2, w1) for w2 in second.window for w1 in first.window)
    position = {g: k for k, g in enumerate(window)}
    blocks = [[position[group.multiply(w2, w1)] for w1 in first.window] for w2 in second.window]
    table: Dict[Row, int] = {}
    chosen: List[Optional[int]] = [None] * len(window)

    def assign(depth: int, middle: List[int]) -> None:
        if depth == len(blocks):
            out = second.table.get(tuple(middle))
            if out is not None:
                table[tuple(a for a in chosen if a is not None)] = out
            return
        cells = blocks[depth]
        for row, b in first.rule:
            previous = [chosen[k] for k in cells]
            if all(old is None or old == a for old, a in zip(previous, row)):
                for k, a in zip(cells, row):
                    chosen[k] = a
                assign(depth + 1, middle + [b])
                for k, old in zip(cells, previous):
                    chosen[k] = old

    assign(0, [])
    return SlidingBlockCode.from_table(group, first.source, second.target, window, table)
