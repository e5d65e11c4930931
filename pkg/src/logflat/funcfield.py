"""Rational functions on an elliptic curve and Miller functions.

A function is stored as (A(x) + B(x) y) / C(x) with polynomial parts over
the base field; y^2 is reduced through the curve equation.  Evaluation at a
point falls back to exact local power series expansion whenever the stored
numerator and denominator both vanish there, so evaluation points may
collide with intermediate factors of a Miller loop without harm (only the
final divisor matters).

Divisors of stored functions are checkable: ord_at computes the exact
vanishing order at any affine point or at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import CurvePoint, EllipticCurve
from .errors import ConsistencyError, InvalidInputError
from .rings import as_element

# polynomials are tuples of field coefficients, index = degree


def _zero(ring):
    return as_element(ring, 0)


def _one(ring):
    return as_element(ring, 1)


def ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def padd(p, q):
    n = max(len(p), len(q))
    out = []
    for i in range(n):
        a = p[i] if i < len(p) else 0
        b = q[i] if i < len(q) else 0
        out.append(a + b if not isinstance(a, int) else b + a)
    return ptrim(out)


def pneg(p):
    return tuple(-c for c in p)

def pmul(p, q):
    if not p or not q:
        return ()
    out = [None] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            prod = a * b
            out[i + j] = prod if out[i + j] is None else out[i + j] + prod
    return ptrim(tuple(c if c is not None else 0 for c in out))


def pscale(p, c):
    return ptrim(tuple(c * a for a in p))


def peval(p, x):
    acc = None
    for c in reversed(p):
        acc = c if acc is None else acc * x + c
    return acc if acc is not None else 0


def pdivmod(p, q):
    """Exact polynomial division with remainder over a field."""
    p = list(p)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    out = [0] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    while len(p) >= len(q) and any(c != 0 for c in p):
        if p[-1] == 0:
            p.pop()
            continue
        shift = len(p) - len(q)
        factor = p[-1] / lead
        out[shift] = factor
        for i, c in enumerate(q):
            p[shift + i] = p[shift + i] - factor * c
        p.pop()
    return ptrim(tuple(out)), ptrim(tuple(p))


def pgcd(p, q):
    p, q = ptrim(p), ptrim(q)
    while q:
        _, r = pdivmod(p, q)
        p, q = q, r
    if p:
        p = pscale(p, 1 / p[-1])
    return p


@dataclass(frozen=True)
class CurveFunction:
    """(A + B*y) / C on a fixed curve, with A, B, C polynomials in x."""

    curve: EllipticCurve
    A: tuple
    B: tuple
    C: tuple

    def __post_init__(self):
        if not self.C:
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def constant(cls, E: EllipticCurve, c) -> "CurveFunction":
        c = as_element(E.ring, c)
        return cls(E, (c,), (), (_one(E.ring),))

    @classmethod
    def from_parts(cls, E, A, B=(), C=None) -> "CurveFunction":
        if C is None:
            C = (_one(E.ring),)
        f = cls(E, ptrim(tuple(A)), ptrim(tuple(B)), ptrim(tuple(C)))
        return f.reduced()

    @classmethod
    def line(cls, E: EllipticCurve, P: CurvePoint, Q: CurvePoint) -> "CurveFunction":
        """The line through P and Q (tangent when P = Q), as a function.

        Divisor: (P) + (Q) + (-(P+Q)) - 3(O) for affine P, Q.
        """
        if P.is_infinity() or Q.is_infinity():
            affine = Q if P.is_infinity() else P
            return cls.vertical(E, affine)
        if P.x == Q.x and (P != Q or 2 * P.y + E.a1 * P.x + E.a3 == 0):
            return cls.vertical(E, P)
        if P == Q:
            lam = (3 * P.x * P.x + 2 * E.a2 * P.x + E.a4 - E.a1 * P.y) / (
                2 * P.y + E.a1 * P.x + E.a3
            )
        else:
            lam = (Q.y - P.y) / (Q.x - P.x)
        nu = P.y - lam * P.x
        # y - lam x - nu
        return cls.from_parts(E, (-nu, -lam), (_one(E.ring),))

    @classmethod
    def vertical(cls, E: EllipticCurve, P: CurvePoint) -> "CurveFunction":
        """x - x_P, divisor (P) + (-P) - 2(O); the constant 1 for P = O."""
        if P.is_infinity():
            return cls.constant(E, 1)
        return cls.from_parts(E, (-P.x, _one(E.ring)))

    def is_zero(self) -> bool:
        return not self.A and not self.B

    def _rhs_poly(self):
        E = self.curve
        one = _one(E.ring)
        return (E.a6, E.a4, E.a2, one)

    def _a13_poly(self):
        E = self.curve
        return ptrim((E.a3, E.a1))

    def __mul__(self, other: "CurveFunction") -> "CurveFunction":
        if isinstance(other, (int, Fraction)) or not isinstance(
            other, CurveFunction
        ):
            return CurveFunction(
                self.curve, pscale(self.A, other), pscale(self.B, other), self.C
            )
        E = self.curve
        AA = pmul(self.A, other.A)
        BB = pmul(self.B, other.B)
        cross = padd(pmul(self.A, other.B), pmul(self.B, other.A))
        # y^2 = R(x) - (a1 x + a3) y
        A = padd(AA, pmul(BB, self._rhs_poly()))
        B = padd(cross, pneg(pmul(BB, self._a13_poly())))
        return CurveFunction.from_parts(E, A, B, pmul(self.C, other.C))

    __rmul__ = __mul__

    def conj_numer(self) -> "CurveFunction":
        """(A - B(a1 x + a3)) - B y over the same denominator."""
        A = padd(self.A, pneg(pmul(self.B, self._a13_poly())))
        return CurveFunction(self.curve, A, pneg(self.B), self.C)

    def inverse(self) -> "CurveFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero function")
        conj = self.conj_numer()
        # norm = (A + By)(A + B ybar) is a pure polynomial in x
        prod = CurveFunction(self.curve, self.A, self.B, (_one(self.curve.ring),)) * CurveFunction(
            self.curve, conj.A, conj.B, (_one(self.curve.ring),)
        )
        if prod.B:
            raise ConsistencyError("norm has a y part")
        norm = prod.A
        # 1/f = C * conj_numer / norm
        A = pmul(conj.A, self.C)
        B = pmul(conj.B, self.C)
        return CurveFunction.from_parts(self.curve, A, B, pmul(norm, prod.C))

    def __truediv__(self, other: "CurveFunction") -> "CurveFunction":
        return self * other.inverse()

    def __pow__(self, k: int) -> "CurveFunction":
        if k < 0:
            return self.inverse() ** (-k)
        out = CurveFunction.constant(self.curve, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def reduced(self) -> "CurveFunction":
        """Cancel common polynomial content between numerator and denominator."""
        if self.is_zero():
            return CurveFunction(self.curve, (), (), (_one(self.curve.ring),))
        g = pgcd(pgcd(self.A, self.B), self.C)
        if len(g) <= 1:
            return self
        A, _ = pdivmod(self.A, g)
        B, _ = pdivmod(self.B, g)
        C, _ = pdivmod(self.C, g)
        return CurveFunction(self.curve, A, B, C)

    # ----- local expansions -----

    def _series_at(self, P: CurvePoint, prec: int):
        """(num series, den series) in the local parameter at affine P."""
        E = self.curve
        xs, ys = _point_series(E, P, prec)
        num = _series_add(
            _poly_series(self.A, xs, prec),
            _series_mul(_poly_series(self.B, xs, prec), ys, prec),
            prec,
        )
        den = _poly_series(self.C, xs, prec)
        return num, den

    def ord_at(self, P: CurvePoint) -> int:
        """Exact vanishing order at P (negative for a pole)."""
        if self.is_zero():
            raise InvalidInputError("zero function has no divisor")
        E = self.curve
        if P.is_infinity():
            # no cancellation possible: x-parts have even order, y adds -3
            cands = []
            if self.A:
                cands.append(-2 * (len(self.A) - 1))
            if self.B:
                cands.append(-2 * (len(self.B) - 1) - 3)
            return min(cands) - (-2 * (len(self.C) - 1))
        prec = 8
        while True:
            num, den = self._series_at(P, prec)
            on = _series_ord(num)
            od = _series_ord(den)
            if on is not None and od is not None:
                return on - od
            prec *= 2
            if prec > 4096:
                raise ConsistencyError("local expansion did not terminate")

    def value_at(self, P: CurvePoint):
        """Exact value at affine P; requires ord_at(P) == 0."""
        if P.is_infinity():
            raise InvalidInputError("evaluation at infinity not supported")
        u = peval(self.A, P.x) + peval(self.B, P.x) * P.y
        c = peval(self.C, P.x)
        if c != 0 and u != 0:
            return u / c
        if c != 0 and u == 0:
            raise InvalidInputError(f"function vanishes at {P}")
        prec = 8
        while True:
            num, den = self._series_at(P, prec)
            on = _series_ord(num)
            od = _series_ord(den)
            if on is not None and od is not None:
                if on != od:
                    raise InvalidInputError(
                        f"function has a zero or pole at {P}"
                    )
                return num[on] / den[od]
            prec *= 2
            if prec > 4096:
                raise ConsistencyError("local expansion did not terminate")


# ----- series helpers (dense lists, index = power of the local parameter) --


def _series_add(a, b, prec):
    return [
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
        for i in range(prec)
    ]


def _series_mul(a, b, prec):
    out = [0] * prec
    for i, ca in enumerate(a):
        if ca == 0 or i >= prec:
            continue
        for j, cb in enumerate(b):
            if i + j >= prec:
                break
            if cb == 0:
                continue
            out[i + j] = out[i + j] + ca * cb
    return out


def _series_ord(a):
    for i, c in enumerate(a):
        if c != 0:
            return i
    return None


def _poly_series(p, xs, prec):
    """Evaluate a polynomial in x on the series xs (Horner)."""
    acc = [0] * prec
    for c in reversed(p):
        acc = _series_mul(acc, xs, prec)
        acc[0] = acc[0] + c
    return acc


def _point_series(E: EllipticCurve, P: CurvePoint, prec: int):
    """Series (x(t), y(t)) at an affine point in the local parameter t.

    t = x - x_P generically; t = y - y_P at points with vertical tangent.
    """
    ring = E.ring
    two_y = 2 * P.y + E.a1 * P.x + E.a3
    if two_y != 0:
        xs = [0] * prec
        xs[0] = P.x
        if prec > 1:
            xs[1] = _one(ring)
        ys = _newton_y(E, xs, P.y, prec)
        return xs, ys
    ys = [0] * prec
    ys[0] = P.y
    if prec > 1:
        ys[1] = _one(ring)
    xs = _newton_x(E, ys, P.x, prec)
    return xs, ys


def _newton_y(E, xs, y0, prec):
    ys = [0] * prec
    ys[0] = y0
    # F(x, y) = y^2 + (a1 x + a3) y - R(x)
    for _ in range(prec + 2):
        a13 = _series_add(
            _series_mul([E.a1], xs, prec), [E.a3] + [0] * (prec - 1), prec
        )
        R = _poly_series((E.a6, E.a4, E.a2, _one(E.ring)), xs, prec)
        F = _series_add(
            _series_add(_series_mul(ys, ys, prec), _series_mul(a13, ys, prec), prec),
            [-c for c in R],
            prec,
        )
        if all(c == 0 for c in F):
            break
        dF = _series_add(_series_mul([2], ys, prec), a13, prec)
        corr = _series_div(F, dF, prec)
        ys = _series_add(ys, [-c for c in corr], prec)
    return ys


def _newton_x(E, ys, x0, prec):
    xs = [0] * prec
    xs[0] = x0
    one = _one(E.ring)
    for _ in range(prec + 2):
        a13y = _series_add(
            _series_mul([E.a1], _series_mul(xs, ys, prec), prec),
            _series_mul([E.a3], ys, prec),
            prec,
        )
        R = _poly_series((E.a6, E.a4, E.a2, one), xs, prec)
        F = _series_add(
            _series_add(_series_mul(ys, ys, prec), a13y, prec),
            [-c for c in R],
            prec,
        )
        if all(c == 0 for c in F):
            break
        # dF/dx = a1 y - (3x^2 + 2a2 x + a4)
        dR = _poly_series((E.a4, 2 * E.a2, 3 * one), xs, prec)
        dF = _series_add(_series_mul([E.a1], ys, prec), [-c for c in dR], prec)
        corr = _series_div(F, dF, prec)
        xs = _series_add(xs, [-c for c in corr], prec)
    return xs


def _series_div(a, b, prec):
    """a / b for series with b a unit (b[0] != 0)."""
    if b[0] == 0:
        # factor the leading parameter power out of both
        ob = _series_ord(b)
        oa = _series_ord(a)
        if oa is None:
            return [0] * prec
        if ob is None or (oa < ob):
            raise ZeroDivisionError("series division not exact")
        return _series_div(a[ob:] + [0] * ob, b[ob:] + [0] * ob, prec)
    inv_b0 = 1 / b[0]
    out = [0] * prec
    for i in range(prec):
        acc = a[i] if i < len(a) else 0
        for j in range(i):
            acc = acc - out[j] * (b[i - j] if i - j < len(b) else 0)
        out[i] = acc * inv_b0
    return out


# ---------------------------------------------------------------------------
# Miller functions


def miller_function(E: EllipticCurve, Y: CurvePoint, n: int) -> CurveFunction:
    """Function with divisor n(Y) - n(O) for Y of exact order n.

    Built by the standard double-and-add accumulation of line functions,
    kept as an exact symbolic function on the curve.
    """
    if Y.is_infinity():
        raise InvalidInputError("base point must be affine")
    if not (n * Y).is_infinity():
        raise InvalidInputError("point does not have the stated order")
    f = CurveFunction.constant(E, 1)
    R = Y
    for bit in bin(n)[3:]:
        # doubling: f^2 * line(R, R) / vertical(2R)
        R2 = R + R
        f = f * f * CurveFunction.line(E, R, R) / CurveFunction.vertical(E, R2)
        R = R2
        if bit == "1":
            R3 = R + Y
            f = f * CurveFunction.line(E, R, Y) / CurveFunction.vertical(E, R3)
            R = R3
    if not R.is_infinity():
        raise ConsistencyError("miller loop did not close at infinity")
    return f


def eval_at_difference(f: CurveFunction, P1: CurvePoint, P2: CurvePoint):
    """f(P1)/f(P2): evaluation on the degree-zero divisor (P1) - (P2).

    Any scalar multiple of f gives the same answer, so the normalization of
    the Miller function is irrelevant.
    """
    return f.value_at(P1) / f.value_at(P2)
