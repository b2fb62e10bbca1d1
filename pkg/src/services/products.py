"""
Free products and restricted free products of SFTs.

For X over G and Y over H the product lives over G * H. Its window is the
union of X's window and the embedded window of Y, and a row is allowed when
its restriction to each part is allowed by that factor. That is the same
subshift as forbidding P_X and P_Y separately.
"""

from itertools import product
from typing import Callable, Dict, List, Sequence, Tuple

from lib.constants import PAIR_SEPARATOR
from lib.errors import DegenerateInputError, StructuralError
from lib.logging_config import get_logger

from services.codes import AlphabetMap
from services.group import embed_right, free_product_group, make_support
from services.patterns import Sft

logger = get_logger("services.products")

Pair = Tuple[int, int]


def _join(
    x: Sft,
    y: Sft,
    alphabet: Sequence[str],
    left_letters: Callable[[int], List[int]],
    right_letters: Callable[[int], List[int]],
    both: Callable[[int, int], List[int]],
) -> Sft:
    """Glue allowed rows of x and y on the union window.

    ``left_letters(b)`` lists product letters over an x-only cell holding b,
    ``right_letters(c)`` likewise for y-only cells, and ``both(b, c)`` the
    letters allowed on a cell shared by the two windows (only the identity).
    """
    group = free_product_group(x.group, y.group)
    y_window = [embed_right(x.group, w) for w in y.window]
    window = make_support(list(x.window) + y_window)
    position = {g: k for k, g in enumerate(window)}
    x_cells = [position[w] for w in x.window]
    y_cells = [position[w] for w in y_window]
    rows = set()
    for rx in sorted(x.allowed):
        for ry in sorted(y.allowed):
            options: Dict[int, List[int]] = {}
            for k, b in zip(x_cells, rx):
                options[k] = left_letters(b)
            for k, c in zip(y_cells, ry):
                if k in options:
                    options[k] = both(rx[x_cells.index(k)], c)
                else:
                    options[k] = right_letters(c)
            rows.update(product(*(options[k] for k in range(len(window)))))
    logger.debug(f"product window of {len(window)} cells, {len(rows)} allowed rows")
    return Sft(group, tuple(alphabet), window, frozenset(rows))


def free_product(x: Sft, y: Sft) -> Sft:
    """X * Y over G * H with forbidden set P_X u P_Y."""
    if x.alphabet != y.alphabet:
        raise StructuralError("free product needs a common alphabet")
    return _join(
        x,
        y,
        x.alphabet,
        lambda b: [b],
        lambda c: [c],
        lambda b, c: [b] if b == c else [],
    )


def restricted_pairs(phi0: AlphabetMap, psi0: AlphabetMap) -> List[Pair]:
    """{(b, c) : phi0(b) = psi0(c)} ordered by b, then c."""
    if phi0.target != psi0.target:
        raise StructuralError("the two maps must share their target alphabet")
    pairs = [
        (b, c)
        for b in range(len(phi0.source))
        for c in range(len(psi0.source))
        if phi0(b) == psi0(c)
    ]
    if not pairs:
        raise DegenerateInputError("restricted alphabet is empty: the images of the maps are disjoint")
    return pairs


def pair_names(phi0: AlphabetMap, psi0: AlphabetMap, pairs: Sequence[Pair]) -> Tuple[str, ...]:
    return tuple(f"{phi0.source[b]}{PAIR_SEPARATOR}{psi0.source[c]}" for b, c in pairs)


def pair_projections(
    phi0: AlphabetMap, psi0: AlphabetMap, pairs: Sequence[Pair]
) -> Tuple[AlphabetMap, AlphabetMap]:
    """The coordinate maps (b, c) -> b and (b, c) -> c."""
    names = pair_names(phi0, psi0, pairs)
    left = AlphabetMap(names, phi0.source, tuple(b for b, _ in pairs))
    right = AlphabetMap(names, psi0.source, tuple(c for _, c in pairs))
    return left, right


def restricted_free_product(x: Sft, y: Sft, phi0: AlphabetMap, psi0: AlphabetMap) -> Sft:
    """X *_{phi,psi} Y over the alphabet of compatible pairs."""
    if phi0.source != x.alphabet or psi0.source != y.alphabet:
        raise StructuralError("maps must start at the alphabets of the two SFTs")
    pairs = restricted_pairs(phi0, psi0)
    index = {pair: k for k, pair in enumerate(pairs)}
    by_left: Dict[int, List[int]] = {}
    by_right: Dict[int, List[int]] = {}
    for k, (b, c) in enumerate(pairs):
        by_left.setdefault(b, []).append(k)
        by_right.setdefault(c, []).append(k)
    return _join(
        x,
        y,
        pair_names(phi0, psi0, pairs),
        lambda b: by_left.get(b, []),
        lambda c: by_right.get(c, []),
        lambda b, c: [index[(b, c)]] if (b, c) in index else [],
    )
