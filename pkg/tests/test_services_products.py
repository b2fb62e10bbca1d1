"""
Tests for services/products module.
"""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import DegenerateInputError, StructuralError
from services.codes import AlphabetMap
from services.extension import global_patterns
from services.group import IDENTITY, GroupElement
from services.patterns import Sft
from services.products import (
    free_product,
    pair_names,
    pair_projections,
    restricted_free_product,
    restricted_pairs,
)


@pytest.fixture
def phi0():
    return AlphabetMap.from_names(["a", "b"], ["0", "1"], {"a": "0", "b": "1"})


@pytest.fixture
def psi0():
    return AlphabetMap.from_names(["p", "q", "r"], ["0", "1"], {"p": "0", "q": "1", "r": "1"})


class TestFreeProduct:
    """Tests for free products of SFTs."""

    def test_window_and_rows(self, golden):
        x = free_product(golden, golden)
        a, b = GroupElement(((0, 1),)), GroupElement(((1, 1),))
        assert x.window == (IDENTITY, a, b)
        # a 1 at the centre forces 0 on both neighbours
        assert len(x.allowed) == 5
        assert (1, 0, 0) in x.allowed
        assert (1, 1, 0) not in x.allowed

    def test_group(self, golden):
        assert free_product(golden, golden).group.describe() == "Z * Z"

    def test_alphabet_mismatch(self, golden, spike):
        with pytest.raises(StructuralError, match="common alphabet"):
            free_product(golden, spike)

    def test_with_single_point(self, golden, z):
        """The single point forces 0 everywhere, so only the all-0 ball remains."""
        point = Sft(z, ("0", "1"), (IDENTITY, z.from_int(1)), frozenset({(0, 0)}))
        found = global_patterns(free_product(golden, point), 1, 2)
        assert len(found) == 1
        assert set(next(iter(found.rows))) == {0}

    def test_full_shifts(self, full2):
        x = free_product(full2, full2)
        assert len(x.allowed) == 8


class TestRestrictedPairs:
    def test_pairs_in_order(self, phi0, psi0):
        assert restricted_pairs(phi0, psi0) == [(0, 0), (1, 1), (1, 2)]

    def test_names(self, phi0, psi0):
        pairs = restricted_pairs(phi0, psi0)
        assert pair_names(phi0, psi0, pairs) == ("a/p", "b/q", "b/r")

    def test_disjoint_images(self, phi0):
        other = AlphabetMap.from_names(["p"], ["0", "1"], {"p": "1"})
        only_a = AlphabetMap.from_names(["a"], ["0", "1"], {"a": "0"})
        with pytest.raises(DegenerateInputError):
            restricted_pairs(only_a, other)

    def test_targets_differ(self, phi0):
        other = AlphabetMap.from_names(["p"], ["x"], {"p": "x"})
        with pytest.raises(StructuralError, match="target alphabet"):
            restricted_pairs(phi0, other)

    def test_projections(self, phi0, psi0):
        left, right = pair_projections(phi0, psi0, restricted_pairs(phi0, psi0))
        assert left.images == (0, 1, 1)
        assert right.images == (0, 1, 2)
        assert left.target == ("a", "b")


class TestRestrictedFreeProduct:
    """Tests for restricted free products."""

    def test_full_shifts_share_the_centre(self, z, phi0, psi0):
        x = Sft.full_shift(z, ["a", "b"])
        y = Sft.full_shift(z, ["p", "q", "r"])
        product_ = restricted_free_product(x, y, phi0, psi0)
        assert product_.window == (IDENTITY,)
        assert product_.alphabet == ("a/p", "b/q", "b/r")
        assert len(product_.allowed) == 3

    def test_neighbour_rows(self, z, phi0, psi0):
        x = Sft.full_shift(z, ["a", "b"], [IDENTITY, z.from_int(1)])
        y = Sft.full_shift(z, ["p", "q", "r"])
        product_ = restricted_free_product(x, y, phi0, psi0)
        # centre pair, then any pair over the x-neighbour
        assert len(product_.allowed) == 9

    def test_maps_must_match_alphabets(self, golden, phi0, psi0):
        with pytest.raises(StructuralError, match="must start"):
            restricted_free_product(golden, golden, phi0, psi0)
