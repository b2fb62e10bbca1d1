"""
Patterns and subshifts of finite type over free products.

An ``Sft`` stores its allowed set as letter-index rows aligned with the window
(window order is the canonical element order). The forbidden set is the
complement and is never materialized.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from lib.errors import StructuralError
from lib.logging_config import get_logger

from services.group import IDENTITY, Group, GroupElement, make_support

logger = get_logger("services.patterns")

Row = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class Pattern:
    """Finite partial configuration: (element, letter index) pairs in element order."""

    cells: Tuple[Tuple[GroupElement, int], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[GroupElement, int]) -> "Pattern":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def from_row(cls, support: Sequence[GroupElement], row: Row) -> "Pattern":
        return cls(tuple(sorted(zip(support, row))))

    @property
    def support(self) -> Tuple[GroupElement, ...]:
        return tuple(g for g, _ in self.cells)

    @property
    def row(self) -> Row:
        return tuple(letter for _, letter in self.cells)

    def as_dict(self) -> Dict[GroupElement, int]:
        return dict(self.cells)

    def __getitem__(self, g: GroupElement) -> int:
        for h, letter in self.cells:
            if h == g:
                return letter
        raise KeyError(g)

    def __len__(self) -> int:
        return len(self.cells)


def translate(group: Group, g: GroupElement, p: Pattern) -> Pattern:
    """Left translate: (g.p)(g f) = p(f)."""
    if g.is_identity:
        return p
    return Pattern.from_mapping({group.multiply(g, f): a for f, a in p.cells})


def restrict(p: Pattern, support: Iterable[GroupElement]) -> Pattern:
    values = p.as_dict()
    try:
        return Pattern.from_mapping({g: values[g] for g in support})
    except KeyError as e:
        raise StructuralError(f"pattern is undefined at {e.args[0]}")


@dataclass(frozen=True)
class Sft:
    """Subshift of finite type given by one window and its allowed rows."""

    group: Group
    alphabet: Tuple[str, ...]
    window: Tuple[GroupElement, ...]
    allowed: FrozenSet[Row]

    def __post_init__(self):
        if not self.alphabet:
            raise StructuralError("alphabet must not be empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise StructuralError("alphabet letters must be distinct")
        if not self.window:
            raise StructuralError("window must not be empty")
        if tuple(make_support(self.window)) != tuple(self.window):
            raise StructuralError("window must be duplicate-free and in canonical order")
        size = len(self.alphabet)
        for row in self.allowed:
            if len(row) != len(self.window) or any(not 0 <= a < size for a in row):
                raise StructuralError(f"allowed row {row} does not fit the window/alphabet")

    @classmethod
    def full_shift(
        cls, group: Group, alphabet: Sequence[str], window: Optional[Sequence[GroupElement]] = None
    ) -> "Sft":
        window = make_support(window or (IDENTITY,))
        rows = frozenset(product(range(len(alphabet)), repeat=len(window)))
        return cls(group, tuple(alphabet), window, rows)

    @classmethod
    def from_forbidden(
        cls,
        group: Group,
        alphabet: Sequence[str],
        window: Sequence[GroupElement],
        forbidden: Iterable[Row],
    ) -> "Sft":
        window = make_support(window)
        banned = set(forbidden)
        rows = frozenset(
            r for r in product(range(len(alphabet)), repeat=len(window)) if r not in banned
        )
        return cls(group, tuple(alphabet), window, rows)

    @cached_property
    def position(self) -> Dict[GroupElement, int]:
        return {g: k for k, g in enumerate(self.window)}

    @property
    def is_empty(self) -> bool:
        return not self.allowed

    def letter_index(self, name: str) -> int:
        try:
            return self.alphabet.index(name)
        except ValueError:
            raise StructuralError(f"letter {name!r} is not in the alphabet")

    def allowed_patterns(self) -> List[Pattern]:
        return sorted(Pattern.from_row(self.window, row) for row in self.allowed)

    def forbidden_rows(self) -> Iterator[Row]:
        for row in product(range(len(self.alphabet)), repeat=len(self.window)):
            if row not in self.allowed:
                yield row

    def translates_inside(self, support: Iterable[GroupElement]) -> List[GroupElement]:
        """All g with g.window contained in ``support``."""
        cells = set(support)
        anchor_inv = self.group.inverse(self.window[0])
        found = []
        for h in sorted(cells):
            g = self.group.multiply(h, anchor_inv)
            if all(self.group.multiply(g, w) in cells for w in self.window):
                found.append(g)
        return found

    def row_at(self, values: Mapping[GroupElement, int], g: GroupElement) -> Row:
        return tuple(values[self.group.multiply(g, w)] for w in self.window)

    def with_allowed(self, rows: Iterable[Row]) -> "Sft":
        return Sft(self.group, self.alphabet, self.window, frozenset(rows))


def locally_admissible(x: Sft, p: Pattern) -> bool:
    """True iff every window translate inside the support of p is allowed."""
    size = len(x.alphabet)
    if any(not 0 <= a < size for _, a in p.cells):
        raise StructuralError("pattern uses letters outside the SFT alphabet")
    values = p.as_dict()
    return all(x.row_at(values, g) in x.allowed for g in x.translates_inside(values))


def first_violation(x: Sft, p: Pattern) -> Optional[GroupElement]:
    """The least translate whose window pattern is not allowed, if any."""
    values = p.as_dict()
    for g in x.translates_inside(values):
        if x.row_at(values, g) not in x.allowed:
            return g
    return None
