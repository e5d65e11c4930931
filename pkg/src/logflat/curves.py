"""Elliptic curves in general Weierstrass form over Q or a quadratic field.

Coefficients and point coordinates are exact field elements (Fraction over
Z, RingElt over a quadratic ring).  The group law covers the full
a1..a6 form; standard quantities b2..b8, c4, c6 and the discriminant are
cached together with their defining identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    InvalidInputError,
    ParseError,
    SearchBudgetError,
)
from .rings import NumberRing, as_element, parse_element, render_element


@dataclass(frozen=True)
class EllipticCurve:
    ring: NumberRing
    a1: object
    a2: object
    a3: object
    a4: object
    a6: object

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(
                self, name, as_element(self.ring, getattr(self, name))
            )
        if self.discriminant == 0:
            raise InvalidInputError("singular curve: discriminant is zero")

    @classmethod
    def from_a_invariants(cls, ring: NumberRing, a_list) -> "EllipticCurve":
        if len(a_list) != 5:
            raise InvalidInputError("expected [a1, a2, a3, a4, a6]")
        return cls(ring, *a_list)

    @cached_property
    def b2(self):
        return self.a1 * self.a1 + 4 * self.a2

    @cached_property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @cached_property
    def b6(self):
        return self.a3 * self.a3 + 4 * self.a6

    @cached_property
    def b8(self):
        return (
            self.a1 * self.a1 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3 * self.a3
            - self.a4 * self.a4
        )

    @cached_property
    def c4(self):
        return self.b2 * self.b2 - 24 * self.b4

    @cached_property
    def c6(self):
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @cached_property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def infinity(self) -> "CurvePoint":
        return CurvePoint(self, None, None)

    def point(self, x, y) -> "CurvePoint":
        return CurvePoint(self, as_element(self.ring, x), as_element(self.ring, y))

    def rhs_minus_lhs(self, x, y):
        """Defining polynomial y^2 + a1 x y + a3 y - x^3 - a2 x^2 - a4 x - a6."""
        return (
            y * y
            + self.a1 * x * y
            + self.a3 * y
            - x**3
            - self.a2 * x * x
            - self.a4 * x
            - self.a6
        )

    def __str__(self):
        coeffs = ",".join(render_element(a) for a in self.a_invariants())
        return f"[{coeffs}] over {self.ring}"


@dataclass(frozen=True)
class CurvePoint:
    """A rational point, either affine (x, y) or the point at infinity."""

    curve: EllipticCurve
    x: object
    y: object

    def __post_init__(self):
        if not self.is_infinity():
            if self.curve.rhs_minus_lhs(self.x, self.y) != 0:
                raise InvalidInputError(
                    f"({render_element(self.x)}, {render_element(self.y)}) "
                    "does not satisfy the curve equation"
                )

    def is_infinity(self) -> bool:
        return self.x is None

    def __neg__(self) -> "CurvePoint":
        if self.is_infinity():
            return self
        E = self.curve
        return CurvePoint(E, self.x, -self.y - E.a1 * self.x - E.a3)

    def __add__(self, other: "CurvePoint") -> "CurvePoint":
        if self.curve != other.curve:
            raise InvalidInputError("points on different curves")
        E = self.curve
        if self.is_infinity():
            return other
        if other.is_infinity():
            return self
        x1, y1, x2, y2 = self.x, self.y, other.x, other.y
        if x1 == x2:
            if y2 == -y1 - E.a1 * x1 - E.a3:
                return E.infinity()
            lam = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) / (
                2 * y1 + E.a1 * x1 + E.a3
            )
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + E.a1 * lam - E.a2 - x1 - x2
        y3 = -(lam + E.a1) * x3 - nu - E.a3
        return CurvePoint(E, x3, y3)

    def __sub__(self, other: "CurvePoint") -> "CurvePoint":
        return self + (-other)

    def __mul__(self, k: int) -> "CurvePoint":
        if k < 0:
            return (-self) * (-k)
        out = self.curve.infinity()
        base = self
        while k:
            if k & 1:
                out = out + base
            base = base + base
            k >>= 1
        return out

    __rmul__ = __mul__

    def order(self, cap: int = 30) -> int | None:
        """Exact order if at most cap, else None (presumed infinite)."""
        acc = self
        for k in range(1, cap + 1):
            if acc.is_infinity():
                return k
            acc = acc + self
        return None

    def __str__(self):
        if self.is_infinity():
            return "O"
        return f"({render_element(self.x)}, {render_element(self.y)})"

    def __repr__(self):
        return f"CurvePoint({self})"


def torsion_order(P: CurvePoint, cap: int = 30) -> int:
    o = P.order(cap)
    if o is None:
        raise SearchBudgetError(f"point order exceeds cap {cap}")
    return o


# ---------------------------------------------------------------------------
# coordinate changes (r, s, t, u): x = u^2 x' + r, y = u^3 y' + s u^2 x' + t


@dataclass(frozen=True)
class Transformation:
    r: object
    s: object
    t: object
    u: object

    def apply(self, E: EllipticCurve) -> EllipticCurve:
        r, s, t, u = self.r, self.s, self.t, self.u
        a1, a2, a3, a4, a6 = E.a_invariants()
        na1 = (a1 + 2 * s) / u
        na2 = (a2 - s * a1 + 3 * r - s * s) / (u * u)
        na3 = (a3 + r * a1 + 2 * t) / u**3
        na4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4
        na6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6
        return EllipticCurve(E.ring, na1, na2, na3, na4, na6)

    def apply_point(self, E_new: EllipticCurve, P: CurvePoint) -> CurvePoint:
        """Carry a point on the original curve onto the transformed curve."""
        if P.is_infinity():
            return E_new.infinity()
        r, s, t, u = self.r, self.s, self.t, self.u
        nx = (P.x - r) / (u * u)
        ny = (P.y - s * (P.x - r) - t) / u**3
        return CurvePoint(E_new, nx, ny)


def parse_curve(ring: NumberRing, text: str) -> EllipticCurve:
    """Parse '[a1,a2,a3,a4,a6]' with entries in the base field."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("curve literal must be bracketed", text, 0)
    parts = s[1:-1].split(",")
    if len(parts) != 5:
        raise ParseError("expected five coefficients", text, 0)
    return EllipticCurve(ring, *(parse_element(ring, p) for p in parts))


def parse_point(E: EllipticCurve, text: str) -> CurvePoint:
    """Parse 'O' or '(x, y)' with entries in the base field."""
    s = text.strip()
    if s == "O":
        return E.infinity()
    s = s.replace(" ", "")
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("point literal must be 'O' or '(x, y)'", text, 0)
    parts = s[1:-1].split(",")
    if len(parts) != 2:
        raise ParseError("point needs two coordinates", text, 0)
    x = parse_element(E.ring, parts[0])
    y = parse_element(E.ring, parts[1])
    return E.point(x, y)
