"""Pydantic models for verdicts, reports and validated search bounds."""
from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field, field_validator

from lib.constants import (
    DEFAULT_CAP,
    DEFAULT_CYCLE_VERTEX_CAP,
    DEFAULT_DEPTH,
    DEFAULT_FACTOR_ORDER_CAP,
    DEFAULT_LENGTH,
    DEFAULT_MARGIN,
    DEFAULT_PSEUDO_ORBIT_BUDGET,
    DEFAULT_RADIUS,
    DEFAULT_SAMPLE_RADIUS,
    DEFAULT_SEED,
    DEFAULT_SUBGROUP_SEARCH_DEPTH,
    DEFAULT_WINDOW,
    EXIT_NEGATIVE,
    EXIT_POSITIVE,
    EXIT_UNKNOWN,
)


class Outcome(str, Enum):
    """Three-valued result of a decision procedure."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"

    @property
    def exit_code(self) -> int:
        return {
            Outcome.POSITIVE: EXIT_POSITIVE,
            Outcome.NEGATIVE: EXIT_NEGATIVE,
            Outcome.UNKNOWN: EXIT_UNKNOWN,
        }[self]


def _stringify_items(v: Dict) -> Dict[str, str]:
    """Coerce report entries to text so rendering is stable."""
    return {str(key): str(value) for key, value in v.items()}


class Verdict(BaseModel):
    """A decision with its evidence.

    ``status`` is the domain word (``isolated-certified``, ``not-minimal``...),
    ``outcome`` fixes the exit code. Certificates and bounds keep insertion
    order so reports are byte-identical across runs.
    """
    status: str
    outcome: Outcome
    certificate: Dict[str, str] = Field(default_factory=dict)
    bounds: Dict[str, str] = Field(default_factory=dict)

    @field_validator('certificate', 'bounds', mode='before')
    @classmethod
    def validate_entries(cls, v):
        return _stringify_items(v or {})

    @property
    def positive(self) -> bool:
        return self.outcome == Outcome.POSITIVE

    def render(self) -> List[str]:
        lines = [f"status: {self.status}"]
        lines.append("certificate:")
        for key, value in self.certificate.items():
            lines.append(f"  {key}: {value}")
        lines.append("bounds:")
        for key, value in self.bounds.items():
            lines.append(f"  {key}: {value}")
        return lines


class Report(BaseModel):
    """Plain report lines plus the exit code the command should return."""
    lines: List[str] = Field(default_factory=list)
    exit_code: int = EXIT_POSITIVE

    def text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


class SearchBounds(BaseModel):
    """Validated search bounds; one field per config key."""
    radius: int = Field(DEFAULT_RADIUS, ge=0, le=32)
    window: int = Field(DEFAULT_WINDOW, ge=1, le=16)
    length: int = Field(DEFAULT_LENGTH, ge=1, le=64)
    depth: int = Field(DEFAULT_DEPTH, ge=1, le=64)
    cap: int = Field(DEFAULT_CAP, ge=1, le=32)
    margin: int = Field(DEFAULT_MARGIN, ge=0, le=16)
    sample_radius: int = Field(DEFAULT_SAMPLE_RADIUS, ge=1, le=16)
    factor_order_cap: int = Field(DEFAULT_FACTOR_ORDER_CAP, ge=2, le=64)
    cycle_vertex_cap: int = Field(DEFAULT_CYCLE_VERTEX_CAP, ge=1, le=256)
    subgroup_search_depth: int = Field(DEFAULT_SUBGROUP_SEARCH_DEPTH, ge=1, le=16)
    pseudo_orbit_budget: int = Field(DEFAULT_PSEUDO_ORBIT_BUDGET, ge=1)
    seed: int = DEFAULT_SEED
