"""
Tests for services/group module.
"""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import StructuralError
from services.group import (
    IDENTITY,
    FactorSpec,
    Group,
    GroupElement,
    embed_right,
    free_product_group,
    integers,
    make_support,
)


def el(*syllables):
    return GroupElement(tuple(syllables))


@pytest.fixture
def f2():
    return Group((FactorSpec.infinite_cyclic(), FactorSpec.infinite_cyclic()))


@pytest.fixture
def z2z3():
    return Group((FactorSpec.cyclic(2), FactorSpec.cyclic(3)))


class TestFactorSpec:
    """Tests for FactorSpec construction and validation."""

    def test_cyclic_table(self):
        f = FactorSpec.cyclic(3)
        assert f.order == 3
        assert f.mul(2, 2) == 1
        assert f.inverses == (0, 2, 1)

    def test_from_table_matches_cyclic(self):
        table = [[0, 1], [1, 0]]
        assert FactorSpec.from_table(2, table) == FactorSpec.cyclic(2)

    def test_describe(self):
        assert FactorSpec.infinite_cyclic().describe() == "Z"
        assert FactorSpec.cyclic(4).describe() == "cyclic 4"

    def test_klein_four_describes_as_table(self):
        table = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]
        f = FactorSpec.from_table(4, table)
        assert f.describe() == "table 4 " + " ".join(str(v) for row in table for v in row)

    def test_rejects_non_permutation_row(self):
        with pytest.raises(StructuralError, match="permutation"):
            FactorSpec.from_table(2, [[0, 1], [1, 1]])

    def test_rejects_misplaced_identity(self):
        with pytest.raises(StructuralError, match="identity"):
            FactorSpec.from_table(2, [[1, 0], [0, 1]])

    def test_rejects_wrong_shape(self):
        with pytest.raises(StructuralError, match="2x2"):
            FactorSpec.from_table(2, [[0, 1]])

    def test_rejects_trivial_order(self):
        with pytest.raises(StructuralError):
            FactorSpec.cyclic(1)


class TestNormalForm:
    """Tests for reduce, multiply and inverse."""

    def test_cyclic_exponents_add(self, f2):
        assert f2.reduce([(0, 2), (0, -2), (1, 1)]) == el((1, 1))

    def test_finite_syllables_multiply(self, z2z3):
        assert z2z3.reduce([(1, 1), (1, 2)]) == IDENTITY
        assert z2z3.reduce([(1, 2), (1, 2)]) == el((1, 1))

    def test_cancellation_cascades(self, f2):
        a = el((0, 1), (1, 1))
        assert f2.multiply(a, f2.inverse(a)) == IDENTITY

    def test_inverse_reverses_syllables(self, z2z3):
        assert z2z3.inverse(el((0, 1), (1, 1))) == el((1, 2), (0, 1))

    def test_product(self, f2):
        a, b = el((0, 1)), el((1, -1))
        assert f2.product(a, b, f2.inverse(b)) == a

    def test_rejects_bad_factor_index(self, f2):
        with pytest.raises(StructuralError, match="out of range"):
            f2.reduce([(2, 1)])


class TestStructure:
    def test_integer_generators(self):
        z = integers()
        assert z.generators == (z.from_int(-1), z.from_int(1))
        assert z.is_integers

    def test_finite_generators(self, z2z3):
        assert z2z3.generators == (el((0, 1)), el((1, 1)), el((1, 2)))
        assert not z2z3.is_finite

    def test_word_length(self, f2, z2z3):
        assert f2.word_length(el((0, 3), (1, -2))) == 5
        assert z2z3.word_length(el((0, 1), (1, 2))) == 2

    def test_suffixes(self, f2):
        a = el((0, 2), (1, 1))
        assert set(f2.suffixes(a)) == {a, el((0, 1), (1, 1)), el((1, 1)), IDENTITY}

    def test_free_product_and_embedding(self):
        z = integers()
        g = free_product_group(z, Group((FactorSpec.cyclic(3),)))
        assert g.describe() == "Z * cyclic 3"
        assert embed_right(z, el((0, 2))) == el((1, 2))


class TestBall:
    """Tests for ball enumeration."""

    @pytest.mark.parametrize("radius", [0, 1, 2, 5])
    def test_integer_ball(self, radius):
        z = integers()
        assert z.ball(radius) == make_support(z.from_int(k) for k in range(-radius, radius + 1))

    def test_free_group_ball_sizes(self, f2):
        assert len(f2.ball(1)) == 5
        assert len(f2.ball(2)) == 17

    def test_z2z3_ball_sizes(self, z2z3):
        assert len(z2z3.ball(1)) == 4
        assert len(z2z3.ball(2)) == 8

    def test_centered_ball(self):
        z = integers()
        assert z.ball(1, z.from_int(5)) == (z.from_int(4), z.from_int(5), z.from_int(6))

    def test_negative_radius(self, f2):
        with pytest.raises(StructuralError):
            f2.ball(-1)

    def test_canonical_order(self, f2):
        ball = f2.ball(2)
        assert list(ball) == sorted(ball)
        assert ball[0] == IDENTITY


class TestGeneratesGroup:
    def test_integers_gcd(self):
        z = integers()
        assert not z.generates_group([z.from_int(0), z.from_int(2)])
        assert z.generates_group([z.from_int(0), z.from_int(2), z.from_int(3)])

    def test_free_group(self, f2):
        assert f2.generates_group([IDENTITY, el((0, 1)), el((1, 1))])
        assert not f2.generates_group([IDENTITY, el((0, 1))])

    def test_single_point_window(self, f2):
        assert not f2.generates_group([IDENTITY])

    def test_finite_group(self):
        g = Group((FactorSpec.cyclic(4),))
        assert not g.generates_group([IDENTITY, el((0, 2))])
        assert g.generates_group([IDENTITY, el((0, 1))])


class TestTextForm:
    def test_integer_round_trip(self):
        z = integers()
        assert z.parse_element("-3") == z.from_int(-3)
        assert z.format_element(z.from_int(-3)) == "-3"
        assert z.parse_element("e") == IDENTITY
        assert z.format_element(IDENTITY) == "0"

    def test_free_product_syllables(self, z2z3):
        a = z2z3.parse_element("0:1.1:2")
        assert a == el((0, 1), (1, 2))
        assert z2z3.format_element(a) == "0:1.1:2"
        assert z2z3.format_element(IDENTITY) == "e"

    def test_parse_reduces(self, z2z3):
        assert z2z3.parse_element("1:1.1:2") == IDENTITY

    def test_bad_element(self, z2z3):
        with pytest.raises(StructuralError, match="bad element"):
            z2z3.parse_element("x")

    def test_to_int_outside_integers(self, z2z3):
        with pytest.raises(StructuralError):
            z2z3.to_int(IDENTITY)
