"""
Pseudo-orbits, tracing and inverse systems over Z.

A pseudo-orbit at fine level k' is a sequence of admissible k'-blocks where
each block overlaps the next in k'-1 letters. It is traced at coarse level k
by an admissible word whose i-th k-block is the k-prefix of block i. For a
1-step SFT with k' = k + 1 the overlapping blocks already spell a path of the
block graph, so tracing is exact; other combinations are reported as
heuristic.
"""

from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from lib.constants import DEFAULT_DEPTH, DEFAULT_PSEUDO_ORBIT_BUDGET
from lib.errors import BudgetError, PreconditionError, StructuralError
from lib.logging_config import get_logger
from lib.models import Outcome, Verdict
from lib.utils import format_word

from services.codes import AlphabetMap
from services.patterns import Sft
from services.sofic import SoficPresentation, image_sofic, sofic_equal
from services.words import Word, block_digraph, hull_words, language, require_integers

logger = get_logger("services.shadowing")


def _locally_admissible_word(x: Sft, word: Sequence[int]) -> bool:
    m, words = hull_words(x)
    return all(tuple(word[i:i + m]) in words for i in range(len(word) - m + 1))


@dataclass(frozen=True)
class PseudoOrbit:
    sft: Sft
    fine: int
    coarse: int
    blocks: Tuple[Word, ...]

    def __post_init__(self):
        require_integers(self.sft)
        if not 1 <= self.coarse <= self.fine:
            raise StructuralError("levels must satisfy 1 <= coarse <= fine")
        if not self.blocks:
            raise StructuralError("a pseudo-orbit needs at least one block")
        for i, block in enumerate(self.blocks):
            if len(block) != self.fine:
                raise StructuralError(f"block {i} has length {len(block)}, expected {self.fine}")
            if not _locally_admissible_word(self.sft, block):
                raise StructuralError(
                    f"block {i} ({format_word(self.sft.alphabet, block)}) is not locally admissible"
                )

    @property
    def length(self) -> int:
        return len(self.blocks) - 1

    def first_break(self) -> Optional[int]:
        """Least i whose block does not overlap block i+1."""
        for i in range(len(self.blocks) - 1):
            if self.blocks[i][1:] != self.blocks[i + 1][:-1]:
                return i
        return None

    def spelled(self) -> Word:
        return tuple(self.blocks[0]) + tuple(b[-1] for b in self.blocks[1:])


@dataclass(frozen=True)
class Trace:
    """A traced word with bi-infinite context, or a refusal."""

    traced: bool
    word: Word = ()
    left: Word = ()
    right: Word = ()
    refused_at: Optional[int] = None
    reason: str = ""

    def render(self, alphabet: Sequence[str]) -> str:
        if not self.traced:
            where = f" at index {self.refused_at}" if self.refused_at is not None else ""
            return f"refused{where}: {self.reason}"
        fmt = lambda w: format_word(alphabet, w)  # noqa: E731
        return f"...{fmt(self.left)}[{fmt(self.word)}]{fmt(self.right)}..."


def _least_path(graph: nx.DiGraph, required: Sequence[Optional[int]]) -> Optional[List[Hashable]]:
    """Least vertex path whose labels meet ``required`` (None = any letter)."""
    n = len(required)
    nodes = sorted(graph.nodes)

    def fits(v: Hashable, i: int) -> bool:
        return required[i] is None or graph.nodes[v]["label"] == required[i]

    feasible = [set() for _ in range(n)]
    feasible[n - 1] = {v for v in nodes if fits(v, n - 1)}
    for i in range(n - 2, -1, -1):
        feasible[i] = {v for v in nodes if fits(v, i) and any(w in feasible[i + 1] for w in graph.successors(v))}
    if not feasible[0]:
        return None
    path = [min(feasible[0])]
    for i in range(1, n):
        path.append(min(w for w in graph.successors(path[-1]) if w in feasible[i]))
    return path


def _context(graph: nx.DiGraph, path: List[Hashable], size: int) -> Tuple[Word, Word]:
    left: List[int] = []
    v = path[0]
    for _ in range(size):
        v = min(graph.predecessors(v))
        left.insert(0, graph.nodes[v]["label"])
    right: List[int] = []
    v = path[-1]
    for _ in range(size):
        v = min(graph.successors(v))
        right.append(graph.nodes[v]["label"])
    return tuple(left), tuple(right)


def validate_and_trace(p: PseudoOrbit) -> Trace:
    broken = p.first_break()
    if broken is not None:
        return Trace(False, refused_at=broken, reason="consecutive blocks do not overlap")
    spelled = p.spelled()
    required: List[Optional[int]] = [None] * len(spelled)
    for i, block in enumerate(p.blocks):
        for j in range(p.coarse):
            required[i + j] = block[j]
    graph = block_digraph(p.sft)
    path = _least_path(graph, spelled) or _least_path(graph, required)
    if path is None:
        return Trace(False, reason="no admissible word follows the pseudo-orbit")
    word = tuple(graph.nodes[v]["label"] for v in path)
    left, right = _context(graph, path, max(1, p.coarse))
    return Trace(True, word, left, right)


def enumerate_pseudo_orbits(x: Sft, fine: int, length: int) -> List[Tuple[Word, ...]]:
    """All overlapping sequences of ``length + 1`` admissible fine-blocks."""
    blocks = language(x, fine)
    following: Dict[Word, List[Word]] = {}
    for b in blocks:
        following[b] = [c for c in blocks if c[:-1] == b[1:]]
    sequences: List[Tuple[Word, ...]] = [(b,) for b in blocks]
    for _ in range(length):
        sequences = [s + (c,) for s in sequences for c in following[s[-1]]]
    return sequences


def sft_shadowing_suite(
    x: Sft, k: int, length: int, budget: int = DEFAULT_PSEUDO_ORBIT_BUDGET
) -> Verdict:
    """Trace every pseudo-orbit at fine level k+1 of every length up to ``length``."""
    require_integers(x)
    if k < 1:
        raise StructuralError("coarse level must be at least 1")
    fine = k + 1
    m, _ = hull_words(x)
    total = traced = 0
    for n in range(length + 1):
        orbits = enumerate_pseudo_orbits(x, fine, n)
        total += len(orbits)
        if total > budget:
            raise BudgetError(f"more than {budget} pseudo-orbits up to length {n}")
        for blocks in orbits:
            p = PseudoOrbit(x, fine, k, blocks)
            trace = validate_and_trace(p)
            exact = trace.traced and _locally_admissible_word(x, trace.word) and all(
                trace.word[i:i + k] == b[:k] for i, b in enumerate(blocks)
            )
            if not exact:
                logger.warning(f"pseudo-orbit of length {n} not traced")
                return Verdict(
                    status="tracing-fails",
                    outcome=Outcome.NEGATIVE,
                    certificate={
                        "pseudo-orbit": " ".join(format_word(x.alphabet, b) for b in blocks),
                        "trace": trace.render(x.alphabet),
                        "traced before failure": traced,
                    },
                    bounds={"k": k, "fine level": fine, "length": length},
                )
            traced += 1
    return Verdict(
        status="all-traced",
        outcome=Outcome.POSITIVE,
        certificate={
            "pseudo-orbits": total,
            "traced": f"{traced} (100%)",
            "exactness": "exact (1-step)" if m <= 2 else "heuristic (window longer than 2)",
        },
        bounds={"k": k, "fine level": fine, "length": length},
    )


# ----------------------------------------------------------------------
# Inverse systems
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class InverseSystem:
    """Levels X_1, X_2, ... with bonding maps X_n -> X_(n-1) (None at level 1)."""

    levels: Tuple[Tuple[Sft, Optional[AlphabetMap]], ...]

    def __post_init__(self):
        for n, (x, bond) in enumerate(self.levels):
            require_integers(x)
            if n == 0:
                continue
            if bond is None:
                raise StructuralError(f"level {n + 1} needs a bonding map")
            below = self.levels[n - 1][0]
            if bond.source != x.alphabet or bond.target != below.alphabet:
                raise StructuralError(f"bonding map of level {n + 1} does not match adjacent alphabets")

    def __len__(self) -> int:
        return len(self.levels)

    def sft(self, n: int) -> Sft:
        return self.levels[n - 1][0]

    def down_to(self, m: int, n0: int) -> AlphabetMap:
        """Composite bonding map X_m -> X_n0 (1-based, m >= n0)."""
        composite = AlphabetMap.identity(self.sft(m).alphabet)
        for n in range(m, n0, -1):
            bond = self.levels[n - 1][1]
            assert bond is not None
            composite = composite.then(bond)
        return composite

    def image(self, m: int, n0: int) -> SoficPresentation:
        return image_sofic(self.sft(m), self.down_to(m, n0))


def ml_check(sys: InverseSystem, n0: int, depth: int = DEFAULT_DEPTH) -> Verdict:
    """Least n with equal images in X_n0 from every level n..n0+depth-1."""
    last = n0 + depth - 1
    if n0 < 1 or depth < 1 or last > len(sys):
        raise PreconditionError(f"levels {n0}..{last} are not all present (system has {len(sys)})")
    images = {n: sys.image(n, n0) for n in range(n0, last + 1)}
    bounds = {"n0": n0, "depth": depth}
    stable_from = last
    while stable_from > n0 and sofic_equal(images[stable_from - 1], images[last]):
        stable_from -= 1
    if stable_from < last:
        return Verdict(
            status="stabilizes",
            outcome=Outcome.POSITIVE,
            certificate={"level": stable_from, "checked through": last},
            bounds=bounds,
        )
    logger.warning(f"images in level {n0} still changing at level {last}")
    return Verdict(
        status="no-stabilization-within-depth",
        outcome=Outcome.UNKNOWN,
        certificate={"last change": f"between levels {last - 1} and {last}" if last > n0 else "single level"},
        bounds=bounds,
    )
