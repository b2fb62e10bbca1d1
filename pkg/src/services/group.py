"""
Free products of infinite cyclic and finite groups.

Elements are kept in free-product normal form: a tuple of syllables
``(factor index, value)`` with adjacent syllables from different factors and
no identity syllables. For an infinite cyclic factor the value is a nonzero
exponent, for a finite factor a non-identity index into the factor's table.

The generating set S is the one coloring automata are defined over:
``g_i`` and ``g_i^-1`` for each cyclic factor and every non-identity element
of each finite factor.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from lib.constants import DEFAULT_SUBGROUP_SEARCH_DEPTH, IDENTITY_TOKEN
from lib.errors import StructuralError
from lib.logging_config import get_logger

logger = get_logger("services.group")

Syllable = Tuple[int, int]


@dataclass(frozen=True)
class FactorSpec:
    """One free factor: infinite cyclic (``order is None``) or a finite table."""

    order: Optional[int] = None
    table: Tuple[Tuple[int, ...], ...] = ()

    @classmethod
    def infinite_cyclic(cls) -> "FactorSpec":
        return cls()

    @classmethod
    def cyclic(cls, n: int) -> "FactorSpec":
        """Finite cyclic group of order n (index k stands for g^k)."""
        table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
        return cls.from_table(n, table)

    @classmethod
    def from_table(cls, n: int, table: Sequence[Sequence[int]]) -> "FactorSpec":
        """Build a finite factor from a row-major table with identity index 0."""
        rows = tuple(tuple(int(v) for v in row) for row in table)
        factor = cls(order=n, table=rows)
        factor.validate()
        return factor

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def validate(self) -> None:
        """Check the group axioms for a finite table."""
        if not self.is_finite:
            return
        n = self.order
        if n is None or n < 2:
            raise StructuralError(f"finite factor must have order >= 2, got {n}")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise StructuralError(f"multiplication table must be {n}x{n}")
        full = set(range(n))
        for i, row in enumerate(self.table):
            if set(row) != full:
                raise StructuralError(f"row {i} of the table is not a permutation")
        for j in range(n):
            if {self.table[i][j] for i in range(n)} != full:
                raise StructuralError(f"column {j} of the table is not a permutation")
        if self.table[0] != tuple(range(n)) or any(self.table[i][0] != i for i in range(n)):
            raise StructuralError("index 0 must be the identity of the table")
        t = self.table
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise StructuralError(
                            f"table is not associative at ({a}, {b}, {c})"
                        )

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    @cached_property
    def inverses(self) -> Tuple[int, ...]:
        n = self.order or 0
        return tuple(next(j for j in range(n) if self.table[i][j] == 0) for i in range(n))

    def describe(self) -> str:
        if not self.is_finite:
            return "Z"
        if self == FactorSpec.cyclic(self.order or 0):
            return f"cyclic {self.order}"
        cells = " ".join(str(v) for row in self.table for v in row)
        return f"table {self.order} {cells}"


@dataclass(frozen=True, order=True)
class GroupElement:
    """Normal-form word; ordering is lexicographic over syllables."""

    syllables: Tuple[Syllable, ...] = ()

    @property
    def is_identity(self) -> bool:
        return not self.syllables


IDENTITY = GroupElement()


def make_support(elements: Iterable[GroupElement]) -> Tuple[GroupElement, ...]:
    """Duplicate-free support in the canonical total order."""
    return tuple(sorted(set(elements)))


@dataclass(frozen=True)
class Group:
    """Free product G_1 * ... * G_n of infinite cyclic and finite factors."""

    factors: Tuple[FactorSpec, ...]

    def __post_init__(self):
        if not self.factors:
            raise StructuralError("a group needs at least one factor")
        for factor in self.factors:
            factor.validate()

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def identity(self) -> GroupElement:
        return IDENTITY

    @property
    def is_integers(self) -> bool:
        return len(self.factors) == 1 and not self.factors[0].is_finite

    @property
    def is_finite(self) -> bool:
        return len(self.factors) == 1 and self.factors[0].is_finite

    @cached_property
    def generators(self) -> Tuple[GroupElement, ...]:
        """S in canonical order."""
        gens: List[GroupElement] = []
        for i, factor in enumerate(self.factors):
            if factor.is_finite:
                gens.extend(GroupElement(((i, k),)) for k in range(1, factor.order or 0))
            else:
                gens.extend([GroupElement(((i, -1),)), GroupElement(((i, 1),))])
        return tuple(sorted(gens))

    def factor_of(self, s: GroupElement) -> int:
        """Factor index of a generator (or any single-syllable element)."""
        if len(s.syllables) != 1:
            raise StructuralError(f"{self.format_element(s)} is not a single syllable")
        return s.syllables[0][0]

    def same_finite_factor(self, s: GroupElement, t: GroupElement) -> bool:
        i, j = self.factor_of(s), self.factor_of(t)
        return i == j and self.factors[i].is_finite

    def finite_factor_elements(self, i: int) -> Tuple[GroupElement, ...]:
        """Elements of the finite factor i, identity first."""
        order = self.factors[i].order or 0
        return (IDENTITY,) + tuple(GroupElement(((i, k),)) for k in range(1, order))

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def _check_syllable(self, syllable: Syllable) -> None:
        i, v = syllable
        if not 0 <= i < len(self.factors):
            raise StructuralError(f"factor index {i} out of range")
        factor = self.factors[i]
        if factor.is_finite and not 0 <= v < (factor.order or 0):
            raise StructuralError(f"index {v} out of range for factor {i}")

    def _push(self, out: List[Syllable], syllable: Syllable) -> None:
        i, v = syllable
        factor = self.factors[i]
        if out and out[-1][0] == i:
            _, w = out.pop()
            v = factor.mul(w, v) if factor.is_finite else w + v
        if v != 0:
            out.append((i, v))

    def reduce(self, syllables: Iterable[Syllable]) -> GroupElement:
        """Fold a raw syllable list into normal form."""
        out: List[Syllable] = []
        for syllable in syllables:
            self._check_syllable(syllable)
            self._push(out, syllable)
        return GroupElement(tuple(out))

    def multiply(self, a: GroupElement, b: GroupElement) -> GroupElement:
        out = list(a.syllables)
        for syllable in b.syllables:
            self._check_syllable(syllable)
            self._push(out, syllable)
        return GroupElement(tuple(out))

    def product(self, *elements: GroupElement) -> GroupElement:
        result = IDENTITY
        for element in elements:
            result = self.multiply(result, element)
        return result

    def inverse(self, a: GroupElement) -> GroupElement:
        out = []
        for i, v in reversed(a.syllables):
            factor = self.factors[i]
            out.append((i, factor.inverses[v] if factor.is_finite else -v))
        return GroupElement(tuple(out))

    def word_length(self, a: GroupElement) -> int:
        return sum(
            1 if self.factors[i].is_finite else abs(v) for i, v in a.syllables
        )

    def generator_word(self, a: GroupElement) -> Tuple[GroupElement, ...]:
        """A geodesic spelling of ``a`` over S."""
        word: List[GroupElement] = []
        for i, v in a.syllables:
            if self.factors[i].is_finite:
                word.append(GroupElement(((i, v),)))
            else:
                step = GroupElement(((i, 1 if v > 0 else -1),))
                word.extend([step] * abs(v))
        return tuple(word)

    def suffixes(self, a: GroupElement) -> Tuple[GroupElement, ...]:
        """All suffixes of the geodesic spelling, identity included."""
        word = self.generator_word(a)
        return tuple(self.product(*word[k:]) for k in range(len(word) + 1))

    def ball(self, radius: int, center: GroupElement = IDENTITY) -> Tuple[GroupElement, ...]:
        """Elements center*h with |h| <= radius, in canonical order."""
        if radius < 0:
            raise StructuralError("radius must be non-negative")
        seen = {IDENTITY}
        frontier = [IDENTITY]
        for _ in range(radius):
            nxt = []
            for h in frontier:
                for s in self.generators:
                    hs = self.multiply(h, s)
                    if hs not in seen:
                        seen.add(hs)
                        nxt.append(hs)
            frontier = nxt
        if center.is_identity:
            return make_support(seen)
        return make_support(self.multiply(center, h) for h in seen)

    def generates_group(
        self, elements: Sequence[GroupElement], depth: int = DEFAULT_SUBGROUP_SEARCH_DEPTH
    ) -> bool:
        """Whether the differences f^-1 f' of ``elements`` generate the group.

        Exact for Z and for a single finite factor; for other free products the
        generators must appear among products of at most ``depth`` differences.
        """
        diffs = {
            self.multiply(self.inverse(f), g) for f in elements for g in elements
        } - {IDENTITY}
        if self.is_integers:
            d = 0
            for element in diffs:
                d = gcd(d, element.syllables[0][1])
            return d == 1
        steps = diffs | {self.inverse(d) for d in diffs}
        if not steps:
            return False
        target = set(self.generators)
        reached = {IDENTITY}
        frontier = deque([(IDENTITY, 0)])
        limit = None if self.is_finite else depth
        while frontier and not target <= reached:
            h, k = frontier.popleft()
            if limit is not None and k >= limit:
                continue
            for step in sorted(steps):
                hs = self.multiply(h, step)
                if hs not in reached:
                    reached.add(hs)
                    frontier.append((hs, k + 1))
        return target <= reached

    # ------------------------------------------------------------------
    # Integers
    # ------------------------------------------------------------------

    def from_int(self, n: int) -> GroupElement:
        if not self.is_integers:
            raise StructuralError("integer elements only exist in Z")
        return GroupElement(((0, n),)) if n else IDENTITY

    def to_int(self, a: GroupElement) -> int:
        if not self.is_integers:
            raise StructuralError("integer elements only exist in Z")
        return a.syllables[0][1] if a.syllables else 0

    # ------------------------------------------------------------------
    # Text form
    # ------------------------------------------------------------------

    def format_element(self, a: GroupElement) -> str:
        if self.is_integers:
            return str(self.to_int(a))
        if a.is_identity:
            return IDENTITY_TOKEN
        return ".".join(f"{i}:{v}" for i, v in a.syllables)

    def parse_element(self, text: str) -> GroupElement:
        """Parse ``e``, ``i:k.i:k...`` or, in Z, a plain integer."""
        token = text.strip()
        if token == IDENTITY_TOKEN:
            return IDENTITY
        if self.is_integers and ":" not in token:
            try:
                return self.from_int(int(token))
            except ValueError:
                raise StructuralError(f"bad element {text!r}")
        raw = []
        for part in token.split("."):
            try:
                i, v = part.split(":")
                raw.append((int(i), int(v)))
            except ValueError:
                raise StructuralError(f"bad element {text!r}")
        return self.reduce(raw)

    def describe(self) -> str:
        return " * ".join(factor.describe() for factor in self.factors)


def free_product_group(left: Group, right: Group) -> Group:
    return Group(left.factors + right.factors)


def embed_right(left: Group, element: GroupElement) -> GroupElement:
    """Canonical inclusion of the right factor group into left * right."""
    shift = len(left.factors)
    return GroupElement(tuple((i + shift, v) for i, v in element.syllables))


def integers() -> Group:
    return Group((FactorSpec.infinite_cyclic(),))
