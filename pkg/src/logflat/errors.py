"""Typed errors shared across the package.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented exit codes: 2 parse, 3 invalid mathematical input, 4 unsupported
scope, 5 internal consistency failure.
"""


class LogflatError(Exception):
    exit_code = 1


class ParseError(LogflatError):
    """Malformed ring / divisor / curve / point literal."""

    exit_code = 2

    def __init__(self, message, text=None, pos=None):
        if text is not None and pos is not None:
            message = f"{message} (at position {pos} in {text!r})"
        super().__init__(message)
        self.text = text
        self.pos = pos


class InvalidInputError(LogflatError):
    """Mathematically invalid input (singular curve, zero element, ...)."""

    exit_code = 3


class BaseMismatchError(InvalidInputError):
    """Operands live over different rings or marked bases."""


class MarkedSetMismatchError(InvalidInputError):
    """The marked prime set does not equal the curve's bad reduction set."""


class UnsupportedError(LogflatError):
    """Outside the implemented scope; explicit rather than silent."""

    exit_code = 4


class UnsupportedReductionError(UnsupportedError):
    """Component tracking not implemented for this reduction type."""


class NonTorsionPointError(UnsupportedError):
    """Pairing second argument must have finite order."""


class SupportCollisionError(UnsupportedError):
    """No translation in the fixture list separated the divisor supports."""


class SearchBudgetError(UnsupportedError):
    """A bounded search (fundamental unit, point order) hit its cap."""


class ConsistencyError(LogflatError):
    """Two independent computations of the same quantity disagree.

    Raised only when an internal cross-check fails; signals a bug, never a
    property of the input.
    """

    exit_code = 5


class OrthogonalityError(InvalidInputError):
    """Subgroup pair not orthogonal under the component pairing."""


class MembershipError(InvalidInputError):
    """Point reduces outside the selected component subgroup."""
