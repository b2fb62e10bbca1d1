"""
Pattern extension through a SAT encoding.

A pattern on a support counts as admissible at margin m when it extends to a
locally admissible pattern on the support thickened by m shells. The encoding
has one variable per (cell, letter), exactly one letter per cell and, for
every window translate inside the target, a disjunction of selector
variables, one per allowed row. Selectors keep the clause count proportional
to the allowed set, which matters for tracked alphabets where the forbidden
set is huge.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from pysat.card import CardEnc, EncType
from pysat.formula import IDPool
from pysat.solvers import Glucose4

from lib.constants import DEFAULT_PATTERN_BUDGET
from lib.errors import BudgetError
from lib.logging_config import get_logger

from services.group import GroupElement, make_support
from services.patterns import Pattern, Row, Sft

logger = get_logger("services.extension")


@dataclass(frozen=True)
class GlobalPatterns:
    """Admissible patterns on a ball, with the margin evidence."""

    radius: int
    margin: int
    support: Tuple[GroupElement, ...]
    rows: FrozenSet[Row]
    stabilized: bool

    @property
    def patterns(self) -> List[Pattern]:
        return sorted(Pattern.from_row(self.support, row) for row in self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def thicken(x: Sft, support: Iterable[GroupElement], margin: int) -> Tuple[GroupElement, ...]:
    """support . ball(margin)"""
    shell = x.group.ball(margin)
    return make_support(x.group.multiply(f, h) for f in support for h in shell)


class _Encoding:
    """CNF for 'a locally admissible pattern on target exists'."""

    def __init__(self, x: Sft, target: Sequence[GroupElement]):
        self.x = x
        self.target = tuple(target)
        self.pool = IDPool()
        self.clauses: List[List[int]] = []
        self.satisfiable = True
        self.domains = self._domains()
        self._encode()

    def var(self, cell: GroupElement, letter: int) -> int:
        return self.pool.id(("cell", cell, letter))

    def _domains(self) -> Dict[GroupElement, Set[int]]:
        x = self.x
        letters = set(range(len(x.alphabet)))
        domains = {cell: set(letters) for cell in self.target}
        columns = [set(row[k] for row in x.allowed) for k in range(len(x.window))]
        for g in x.translates_inside(self.target):
            for k, w in enumerate(x.window):
                domains[x.group.multiply(g, w)] &= columns[k]
        return domains

    def _encode(self) -> None:
        x = self.x
        for cell in self.target:
            lits = [self.var(cell, a) for a in sorted(self.domains[cell])]
            if not lits:
                self.satisfiable = False
                return
            self.clauses.append(lits)
            if len(lits) > 1:
                cnf = CardEnc.atmost(lits=lits, bound=1, vpool=self.pool, encoding=EncType.pairwise)
                self.clauses.extend(cnf.clauses)
        for g in x.translates_inside(self.target):
            cells = [x.group.multiply(g, w) for w in x.window]
            selectors = []
            for row in sorted(x.allowed):
                if all(a in self.domains[c] for c, a in zip(cells, row)):
                    z = self.pool.id(("row", g, row))
                    selectors.append(z)
                    self.clauses.extend([-z, self.var(c, a)] for c, a in zip(cells, row))
            if not selectors:
                self.satisfiable = False
                return
            self.clauses.append(selectors)


def extendable_rows(
    x: Sft,
    support: Sequence[GroupElement],
    margin: int,
    budget: int = DEFAULT_PATTERN_BUDGET,
) -> FrozenSet[Row]:
    """Rows over ``support`` that extend to a locally admissible pattern on support.ball(margin)."""
    support = make_support(support)
    target = thicken(x, support, margin)
    enc = _Encoding(x, target)
    if not enc.satisfiable:
        return frozenset()
    logger.debug(
        f"extension query: |support|={len(support)} |target|={len(target)} "
        f"vars={enc.pool.top} clauses={len(enc.clauses)}"
    )
    found: Set[Row] = set()
    with Glucose4(bootstrap_with=enc.clauses) as solver:
        while solver.solve():
            model = set(lit for lit in solver.get_model() if lit > 0)
            row = tuple(
                next(a for a in sorted(enc.domains[cell]) if enc.var(cell, a) in model)
                for cell in support
            )
            found.add(row)
            if len(found) > budget:
                raise BudgetError(f"more than {budget} admissible patterns on {len(support)} cells")
            solver.add_clause([-enc.var(cell, a) for cell, a in zip(support, row)])
    return frozenset(found)


def extends(x: Sft, p: Pattern, margin: int) -> bool:
    """Whether p extends to a locally admissible pattern on its support thickened by margin."""
    target = thicken(x, p.support, margin)
    enc = _Encoding(x, target)
    if not enc.satisfiable:
        return False
    assumptions = []
    for cell, a in p.cells:
        if a not in enc.domains[cell]:
            return False
        assumptions.append(enc.var(cell, a))
    with Glucose4(bootstrap_with=enc.clauses) as solver:
        return solver.solve(assumptions=assumptions)


def global_patterns(
    x: Sft, r: int, margin: int, budget: int = DEFAULT_PATTERN_BUDGET
) -> GlobalPatterns:
    """Patterns on ball(r) extending to ball(r + margin), plus a stabilization flag.

    The flag compares the result with the one at margin + 1.
    """
    support = x.group.ball(r)
    rows = extendable_rows(x, support, margin, budget)
    deeper = extendable_rows(x, support, margin + 1, budget) if rows else rows
    if deeper != rows:
        logger.debug(f"ball({r}) patterns not yet stable at margin {margin}")
    return GlobalPatterns(r, margin, support, rows, deeper == rows)


def admissible_patterns_on(
    x: Sft, support: Sequence[GroupElement], margin: int, budget: Optional[int] = None
) -> List[Pattern]:
    support = make_support(support)
    rows = extendable_rows(x, support, margin, budget or DEFAULT_PATTERN_BUDGET)
    return sorted(Pattern.from_row(support, row) for row in rows)
