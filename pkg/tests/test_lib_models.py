"""
Tests for lib/models and lib/errors modules.
"""

import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lib.errors import (
    BudgetError,
    CorruptionError,
    NotApplicableError,
    SpecSyntaxError,
    StructuralError,
)
from lib.models import Outcome, Report, SearchBounds, Verdict


class TestOutcome:
    def test_exit_codes(self):
        assert Outcome.POSITIVE.exit_code == 0
        assert Outcome.NEGATIVE.exit_code == 1
        assert Outcome.UNKNOWN.exit_code == 2


class TestVerdict:
    """Tests for Verdict model."""

    def test_entries_become_text(self):
        v = Verdict(status="periodic", outcome=Outcome.POSITIVE, certificate={"covered": 3})
        assert v.certificate == {"covered": "3"}

    def test_render_keeps_order(self):
        v = Verdict(
            status="not-isolated",
            outcome=Outcome.NEGATIVE,
            certificate={"witness": "sub-SFT", "window": 3},
            bounds={"length": 8},
        )
        assert v.render() == [
            "status: not-isolated",
            "certificate:",
            "  witness: sub-SFT",
            "  window: 3",
            "bounds:",
            "  length: 8",
        ]

    def test_positive(self):
        assert Verdict(status="x", outcome=Outcome.POSITIVE).positive
        assert not Verdict(status="x", outcome=Outcome.UNKNOWN).positive


class TestReport:
    def test_text_ends_with_newline(self):
        assert Report(lines=["a", "b"]).text() == "a\nb\n"

    def test_empty_text(self):
        assert Report().text() == ""
        assert Report().exit_code == 0


class TestSearchBounds:
    def test_defaults(self):
        b = SearchBounds()
        assert (b.radius, b.window, b.length, b.depth, b.cap) == (3, 4, 8, 4, 6)
        assert b.margin == 2
        assert b.sample_radius == 4

    def test_rejects_negative_radius(self):
        with pytest.raises(ValidationError):
            SearchBounds(radius=-1)

    def test_rejects_zero_window(self):
        with pytest.raises(ValidationError):
            SearchBounds(window=0)


class TestErrors:
    def test_exit_codes(self):
        assert StructuralError("x").exit_code == 3
        assert CorruptionError("x").exit_code == 3
        assert NotApplicableError("x").exit_code == 1
        assert BudgetError("x").exit_code == 2

    def test_syntax_error_line(self):
        e = SpecSyntaxError("bad window", 7)
        assert str(e) == "line 7: bad window"
        assert e.line == 7
        assert isinstance(e, StructuralError)

    def test_syntax_error_without_line(self):
        assert str(SpecSyntaxError("bad")) == "bad"
