"""Rational numbers modulo 1, normalized to [0, 1).

QmodZ values carry monodromy pairing entries and the fractional coefficients
of divisors along the marked set.  Instances are immutable and hashable;
arithmetic wraps mod 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class QmodZ:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    @classmethod
    def of(cls, numerator, denominator=1) -> "QmodZ":
        return cls(Fraction(numerator, denominator))

    def __add__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ(self.value + other.value)

    def __sub__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ(self.value - other.value)

    def __neg__(self) -> "QmodZ":
        return QmodZ(-self.value)

    def __mul__(self, k: int) -> "QmodZ":
        return QmodZ(self.value * k)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def order(self) -> int:
        """Additive order: the denominator of the reduced representative."""
        return self.value.denominator

    def __str__(self):
        return f"{self.value.numerator}/{self.value.denominator}"


ZERO = QmodZ(Fraction(0))
