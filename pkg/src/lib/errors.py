"""
Exception hierarchy for symdyn.

Every error state of the library maps to one of these classes. Each carries
the exit code the command line reports for it.
"""

from typing import Optional

from .constants import EXIT_INPUT_ERROR, EXIT_NEGATIVE, EXIT_UNKNOWN


class SymdynError(Exception):
    """Base class for all library errors."""

    exit_code = EXIT_INPUT_ERROR


class StructuralError(SymdynError):
    """Malformed or mismatched input: alphabets, windows, tables, local rules."""


class SpecSyntaxError(StructuralError):
    """Spec file error tied to a source line."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnsupportedInputError(SymdynError):
    """Input outside the family an operation handles."""


class DegenerateInputError(SymdynError):
    """Input that collapses to nothing, such as an empty restricted alphabet."""


class PreconditionError(SymdynError):
    """A documented precondition does not hold."""


class NotApplicableError(SymdynError):
    """The construction provably does not apply to this input."""

    exit_code = EXIT_NEGATIVE


class CorruptionError(SymdynError):
    """Data that contradicts the coding it claims to follow."""


class BudgetError(SymdynError):
    """A configured search bound or cap was exhausted."""

    exit_code = EXIT_UNKNOWN
