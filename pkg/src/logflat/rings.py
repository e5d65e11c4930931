"""Exact arithmetic in Z and in maximal orders of quadratic fields.

Conventions
-----------
A quadratic ring is the full ring of integers of Q(sqrt(d)) for squarefree
d not in {0, 1}.  Elements are written a + b*w against the integral basis
(1, w) where w = sqrt(d) for d = 2, 3 mod 4 and w = (1 + sqrt(d))/2 for
d = 1 mod 4.  Field elements carry Fraction coordinates; integrality means
both coordinates are integers.

Ideals come in two shapes: a ``FractionalIdeal`` is a finite map
prime -> exponent, and internally ideals are reduced to Hermite-form
Z-lattices in the (1, w) coordinates for equality, membership and
principality work.

All values are immutable after construction and all functions are pure, so
concurrent use from multiple threads is safe.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .errors import (
    BaseMismatchError,
    ConsistencyError,
    InvalidInputError,
    ParseError,
    SearchBudgetError,
)
from .linalg import hnf_row_lattice

# ---------------------------------------------------------------------------
# rational integer utilities


def _is_square(n) -> bool:
    if isinstance(n, Fraction):
        if n.denominator != 1:
            return False
        n = n.numerator
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any desk-scale input."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    x, c = 2, 1
    while True:
        y, d = x, 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
        x, c = c + 2, c + 1


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of a nonzero integer (sign discarded)."""
    if n == 0:
        raise InvalidInputError("cannot factor 0")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend([d, m // d])
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# rings and elements


@dataclass(frozen=True)
class NumberRing:
    """Z (d is None) or the maximal order of Q(sqrt(d)), d squarefree."""

    d: int | None = None

    def __post_init__(self):
        if self.d is not None:
            if self.d in (0, 1):
                raise InvalidInputError("d must not be 0 or 1")
            for _, e in factor_int(self.d).items():
                if e > 1:
                    raise InvalidInputError(f"d = {self.d} is not squarefree")

    @property
    def is_quadratic(self) -> bool:
        return self.d is not None

    @property
    def is_imaginary(self) -> bool:
        return self.d is not None and self.d < 0

    @property
    def discriminant(self) -> int:
        if self.d is None:
            return 1
        return self.d if self.d % 4 == 1 else 4 * self.d

    # minimal polynomial of w is x^2 - (w_trace) x - (w_norm_neg)
    @property
    def w_trace(self) -> int:
        return 1 if (self.d is not None and self.d % 4 == 1) else 0

    @property
    def w_norm_neg(self) -> int:
        if self.d is None:
            return 0
        return (self.d - 1) // 4 if self.d % 4 == 1 else self.d

    def element(self, a, b=0):
        if self.d is None:
            if b:
                raise InvalidInputError("Z has no w component")
            return Fraction(a)
        return RingElt(self, Fraction(a), Fraction(b))

    def one(self):
        return self.element(1)

    def zero(self):
        return self.element(0)

    def __str__(self):
        return "Z" if self.d is None else f"Q(sqrt {self.d})"


ZZ = NumberRing()


@dataclass(frozen=True)
class RingElt:
    """a + b*w in a quadratic ring, Fraction coordinates."""

    ring: NumberRing
    a: Fraction
    b: Fraction

    def _coerce(self, other):
        if isinstance(other, RingElt):
            if other.ring != self.ring:
                raise BaseMismatchError("elements of different rings")
            return other
        if isinstance(other, (int, Fraction)):
            return RingElt(self.ring, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElt(self.ring, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RingElt(self.ring, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElt(self.ring, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n0 = self.ring.w_trace, self.ring.w_norm_neg
        a = self.a * o.a + self.b * o.b * n0
        b = self.a * o.b + self.b * o.a + self.b * o.b * t
        return RingElt(self.ring, a, b)

    __rmul__ = __mul__

    def conj(self) -> "RingElt":
        t = self.ring.w_trace
        return RingElt(self.ring, self.a + self.b * t, -self.b)

    def norm(self) -> Fraction:
        t, n0 = self.ring.w_trace, self.ring.w_norm_neg
        return self.a * self.a + t * self.a * self.b - n0 * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.ring.w_trace * self.b

    def inverse(self) -> "RingElt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return RingElt(self.ring, c.a / n, c.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.element(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_rational(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, RingElt):
            return (
                self.ring == other.ring and self.a == other.a and self.b == other.b
            )
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.ring, self.a, self.b))

    def __str__(self):
        return render_element(self)

    def __repr__(self):
        return f"RingElt({render_element(self)})"


def as_element(ring: NumberRing, x):
    """Coerce ints/Fractions into the ring's element type."""
    if ring.d is None:
        if isinstance(x, RingElt):
            raise BaseMismatchError("quadratic element over Z base")
        return Fraction(x)
    if isinstance(x, RingElt):
        if x.ring != ring:
            raise BaseMismatchError("element of a different ring")
        return x
    return RingElt(ring, Fraction(x), Fraction(0))


def elt_norm(ring: NumberRing, x) -> Fraction:
    x = as_element(ring, x)
    return x.norm() if isinstance(x, RingElt) else x


def elt_conj(ring: NumberRing, x):
    x = as_element(ring, x)
    return x.conj() if isinstance(x, RingElt) else x


def elt_is_integral(ring: NumberRing, x) -> bool:
    x = as_element(ring, x)
    if isinstance(x, RingElt):
        return x.is_integral()
    return x.denominator == 1


def elt_is_zero(x) -> bool:
    if isinstance(x, RingElt):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# prime ideals


@dataclass(frozen=True)
class PrimeIdeal:
    """Prime of a NumberRing in two-element form.

    For quadratic rings, split and ramified primes store the residue r of w
    modulo the prime (second generator w - r); inert primes store r = None.
    """

    ring: NumberRing
    p: int
    f: int = 1
    e: int = 1
    r: int | None = None

    @property
    def norm(self) -> int:
        return self.p**self.f

    @property
    def residue_char(self) -> int:
        return self.p

    def second_generator(self):
        if self.ring.d is None or self.f == 2:
            return None
        # normalize the rational part into [0, p)
        a = (-self.r) % self.p
        return self.ring.element(a, 1)

    def conjugate(self) -> "PrimeIdeal":
        if self.ring.d is None or self.f == 2 or self.e == 2:
            return self
        t = self.ring.w_trace
        return PrimeIdeal(self.ring, self.p, 1, 1, (t - self.r) % self.p)

    def uniformizer(self):
        """Element with valuation 1 here and 0 at the conjugate prime."""
        if self.ring.d is None:
            return Fraction(self.p)
        if self.f == 2:
            return self.ring.element(self.p)
        g = self.ring.element(-self.r, 1)
        if self.e == 2:
            return g if valuation_integral(self, g) == 1 else g + self.p
        if int(g.norm()) % (self.p * self.p) == 0:
            g = g - self.p
        return g

    def __str__(self):
        return render_prime(self)

    def __repr__(self):
        return f"PrimeIdeal({self})"


def primes_above(ring: NumberRing, p: int) -> list[PrimeIdeal]:
    """The primes of the ring over the rational prime p."""
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    if ring.d is None:
        return [PrimeIdeal(ring, p)]
    sym = kronecker(ring.discriminant, p)
    t, n0 = ring.w_trace, ring.w_norm_neg
    if sym == -1:
        return [PrimeIdeal(ring, p, f=2)]
    roots = sorted(r for r in range(p) if (r * r - t * r - n0) % p == 0)
    if sym == 0:
        return [PrimeIdeal(ring, p, e=2, r=roots[0])]
    return [PrimeIdeal(ring, p, r=roots[0]), PrimeIdeal(ring, p, r=roots[1])]


def _int_ord(p: int, q) -> int:
    q = Fraction(q)
    if q == 0:
        raise InvalidInputError("valuation of zero")
    v = 0
    n = q.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = q.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def valuation_integral(P: PrimeIdeal, x) -> int:
    """Valuation at P of a nonzero integral element."""
    ring = P.ring
    if ring.d is None:
        return _int_ord(P.p, Fraction(x))
    x = as_element(ring, x)
    if x.is_zero():
        raise InvalidInputError("valuation of zero")
    if P.f == 2:
        if x.b == 0:
            return _int_ord(P.p, x.a)
        if x.a == 0:
            return _int_ord(P.p, x.b)
        return min(_int_ord(P.p, x.a), _int_ord(P.p, x.b))
    if P.e == 2:
        return _int_ord(P.p, x.norm())
    v = 0
    pi_bar = P.uniformizer().conj()
    while True:
        if (x.a + x.b * P.r) % P.p != 0:
            return v
        y = x * pi_bar
        x = RingElt(ring, y.a / P.p, y.b / P.p)
        v += 1


def valuation(P: PrimeIdeal, x) -> int:
    """Valuation at P of a nonzero field element (Fraction coordinates ok)."""
    ring = P.ring
    if ring.d is None:
        return _int_ord(P.p, Fraction(x))
    x = as_element(ring, x)
    if x.is_zero():
        raise InvalidInputError("valuation of zero")
    den = x.a.denominator * x.b.denominator // gcd(
        x.a.denominator, x.b.denominator
    )
    y = x * den
    return valuation_integral(P, y) - _int_ord(P.p, den) * P.e


# ---------------------------------------------------------------------------
# ideal lattices (internal representation)


@dataclass(frozen=True)
class IdealLattice:
    """Fractional ideal as denominator + HNF basis rows in (1, w) coords."""

    ring: NumberRing
    den: int
    rows: tuple[tuple[int, int], ...]

    @classmethod
    def from_generators(cls, ring: NumberRing, gens) -> "IdealLattice":
        elts = [as_element(ring, g) for g in gens]
        elts = [g for g in elts if not g.is_zero()]
        if not elts:
            raise InvalidInputError("zero ideal")
        den = 1
        for g in elts:
            dg = g.a.denominator * g.b.denominator // gcd(
                g.a.denominator, g.b.denominator
            )
            den = den * dg // gcd(den, dg)
        w = ring.element(0, 1)
        vecs = []
        for g in elts:
            for h in (g, g * w):
                h = h * den
                vecs.append((int(h.a), int(h.b)))
        rows = hnf_row_lattice(vecs)
        if len(rows) != 2:
            raise InvalidInputError("generators do not span a full lattice")
        return cls(ring, den, tuple(tuple(r) for r in rows)).reduce()

    def reduce(self) -> "IdealLattice":
        g = self.den
        for row in self.rows:
            for x in row:
                g = gcd(g, x)
        if g <= 1:
            return self
        return IdealLattice(
            self.ring,
            self.den // g,
            tuple(tuple(x // g for x in row) for row in self.rows),
        )

    @property
    def norm(self) -> Fraction:
        det = abs(
            self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
        )
        return Fraction(det, self.den * self.den)

    def basis_elements(self):
        return [
            self.ring.element(Fraction(a, self.den), Fraction(b, self.den))
            for a, b in self.rows
        ]

    def contains(self, x) -> bool:
        x = as_element(self.ring, x)
        u, v = x.a * self.den, x.b * self.den
        if u.denominator != 1 or v.denominator != 1:
            return False
        u, v = int(u), int(v)
        (a0, b0), (a1, b1) = self.rows
        det = a0 * b1 - a1 * b0
        if det == 0:
            raise InvalidInputError("degenerate lattice")
        s_num = u * b1 - v * a1
        t_num = v * a0 - u * b0
        return s_num % det == 0 and t_num % det == 0

    def mul(self, other: "IdealLattice") -> "IdealLattice":
        gens = []
        for x in self.basis_elements():
            for y in other.basis_elements():
                gens.append(x * y)
        return IdealLattice.from_generators(self.ring, gens)

    def conjugate(self) -> "IdealLattice":
        return IdealLattice.from_generators(
            self.ring, [g.conj() for g in self.basis_elements()]
        )

    def scale(self, q) -> "IdealLattice":
        q = Fraction(q)
        return IdealLattice.from_generators(
            self.ring, [g * q for g in self.basis_elements()]
        )

    def __eq__(self, other):
        if not isinstance(other, IdealLattice):
            return NotImplemented
        a, b = self.reduce(), other.reduce()
        return a.ring == b.ring and a.den == b.den and a.rows == b.rows


def prime_lattice(P: PrimeIdeal) -> IdealLattice:
    ring = P.ring
    if P.f == 2:
        return IdealLattice.from_generators(ring, [ring.element(P.p)])
    return IdealLattice.from_generators(
        ring, [ring.element(P.p), ring.element(-P.r, 1)]
    )


# ---------------------------------------------------------------------------
# fractional ideals as exponent maps


@dataclass(frozen=True)
class FractionalIdeal:
    """Finite product of primes with nonzero integer exponents."""

    ring: NumberRing
    powers: tuple[tuple[PrimeIdeal, int], ...]

    @classmethod
    def from_dict(cls, ring: NumberRing, d: dict) -> "FractionalIdeal":
        items = tuple(
            sorted(
                ((P, e) for P, e in d.items() if e != 0),
                key=lambda t: (t[0].p, -t[0].f, t[0].r if t[0].r is not None else -1),
            )
        )
        return cls(ring, items)

    @classmethod
    def unit(cls, ring: NumberRing) -> "FractionalIdeal":
        return cls(ring, ())

    def as_dict(self) -> dict:
        return dict(self.powers)

    def __mul__(self, other: "FractionalIdeal") -> "FractionalIdeal":
        if self.ring != other.ring:
            raise BaseMismatchError("ideals over different rings")
        d = self.as_dict()
        for P, e in other.powers:
            d[P] = d.get(P, 0) + e
        return FractionalIdeal.from_dict(self.ring, d)

    def __pow__(self, k: int) -> "FractionalIdeal":
        return FractionalIdeal.from_dict(
            self.ring, {P: e * k for P, e in self.powers}
        )

    def inverse(self) -> "FractionalIdeal":
        return self**-1

    @property
    def norm(self) -> Fraction:
        out = Fraction(1)
        for P, e in self.powers:
            out *= Fraction(P.norm) ** e
        return out

    def is_integral(self) -> bool:
        return all(e > 0 for _, e in self.powers)

    def is_unit_ideal(self) -> bool:
        return not self.powers

    def to_lattice(self) -> IdealLattice:
        ring = self.ring
        if ring.d is None:
            raise InvalidInputError("lattices only for quadratic rings")
        lat = IdealLattice.from_generators(ring, [ring.element(1)])
        for P, e in self.powers:
            pl = prime_lattice(P)
            if e > 0:
                for _ in range(e):
                    lat = lat.mul(pl)
            else:
                inv = pl.conjugate().scale(Fraction(1, P.norm))
                for _ in range(-e):
                    lat = lat.mul(inv)
        return lat

    def __str__(self):
        if not self.powers:
            return "(1)"
        return " * ".join(
            render_prime(P) if e == 1 else f"{render_prime(P)}^{e}"
            for P, e in self.powers
        )


def factor_element(ring: NumberRing, x) -> FractionalIdeal:
    """Principal divisor div(x) of a nonzero field element."""
    if ring.d is None:
        q = Fraction(x)
        if q == 0:
            raise InvalidInputError("cannot factor 0")
        d: dict[PrimeIdeal, int] = {}
        for p, e in factor_int(q.numerator).items():
            d[PrimeIdeal(ring, p)] = e
        for p, e in factor_int(q.denominator).items():
            P = PrimeIdeal(ring, p)
            d[P] = d.get(P, 0) - e
        return FractionalIdeal.from_dict(ring, d)
    x = as_element(ring, x)
    if x.is_zero():
        raise InvalidInputError("cannot factor 0")
    n = x.norm()
    d = {}
    # split primes can cancel in the norm, so coordinate denominators are
    # part of the support too
    den = x.a.denominator * x.b.denominator // gcd(
        x.a.denominator, x.b.denominator
    )
    support = (
        set(factor_int(n.numerator))
        | set(factor_int(n.denominator))
        | (set(factor_int(den)) if den > 1 else set())
    )
    for p in sorted(support):
        for P in primes_above(ring, p):
            v = valuation(P, x)
            if v:
                d[P] = v
    return FractionalIdeal.from_dict(ring, d)


# ---------------------------------------------------------------------------
# units


@lru_cache(maxsize=None)
def roots_of_unity(ring: NumberRing) -> tuple:
    """(generator, order) of the torsion unit group."""
    if ring.d is None:
        return (Fraction(-1), 2)
    if ring.d == -1:
        return (ring.element(0, 1), 4)  # i
    if ring.d == -3:
        return (ring.element(0, 1), 6)  # (1+sqrt(-3))/2, a primitive 6th root
    return (ring.element(-1), 2)


@lru_cache(maxsize=None)
def fundamental_unit(ring: NumberRing, budget: int = 10_000):
    """Fundamental unit of a real quadratic ring via continued fractions.

    Runs the quadratic-irrational continued fraction of w and tests each
    convergent h - k*conj(w); raises SearchBudgetError past the budget.
    """
    if not ring.is_quadratic or ring.is_imaginary:
        raise InvalidInputError("fundamental unit needs a real quadratic ring")
    d = ring.d
    P, Q = (1, 2) if d % 4 == 1 else (0, 1)
    sq = isqrt(d)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    t = ring.w_trace
    for _ in range(budget):
        a = (P + sq) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        u = ring.element(h - k * t, k)  # h - k*conj(w)
        if abs(u.norm()) == 1:
            return u
        P = a * Q - P
        Q = (d - P * P) // Q
    raise SearchBudgetError(
        f"fundamental unit of {ring} not found within {budget} steps"
    )


def is_unit(ring: NumberRing, x) -> bool:
    return elt_is_integral(ring, x) and abs(elt_norm(ring, x)) == 1


# ---------------------------------------------------------------------------
# principality


def _principal_generator_lattice(ring: NumberRing, lat: IdealLattice, budget):
    """Generator of an integral ideal lattice, or None."""
    n0 = lat.norm
    if n0.denominator != 1:
        raise InvalidInputError("integral ideal expected")
    n0 = int(n0)
    if n0 == 1:
        return ring.element(1)
    t = ring.w_trace
    n_neg = ring.w_norm_neg
    if ring.is_imaginary:
        disc = abs(ring.discriminant)
        bmax = isqrt(4 * n0 // disc) + 1
        for b in range(-bmax, bmax + 1):
            # a^2 + t a b - n_neg b^2 = n0, solve for a
            c = -n_neg * b * b - n0
            delta = t * t * b * b - 4 * c
            if delta < 0 or not _is_square(delta):
                continue
            s = isqrt(delta)
            for sign in (1, -1):
                num = -t * b + sign * s
                if num % 2:
                    continue
                g = ring.element(num // 2, b)
                if abs(g.norm()) == n0 and lat.contains(g):
                    return g
        return None
    # real quadratic: box bounded through the fundamental unit
    import math

    eps = fundamental_unit(ring, budget)
    sqd = math.sqrt(ring.d)
    wreal = (t + sqd) / 2 if t else sqd
    e1 = abs(float(eps.a) + float(eps.b) * wreal)
    bound = math.sqrt(n0) * max(e1, 1 / e1) * 1.01 + 1
    disc = ring.discriminant
    bmax = int(2 * bound / math.sqrt(disc)) + 2
    for b in range(-bmax, bmax + 1):
        for target in (n0, -n0):
            c = -n_neg * b * b - target
            delta = t * t * b * b - 4 * c
            if delta < 0 or not _is_square(delta):
                continue
            s = isqrt(delta)
            for sign in (1, -1):
                num = -t * b + sign * s
                if num % 2:
                    continue
                g = ring.element(num // 2, b)
                if abs(g.norm()) == n0 and lat.contains(g):
                    return g
    return None


def is_principal(ring: NumberRing, I: FractionalIdeal, budget: int = 10_000):
    """Generator of I if principal, else None.

    The search enumerates elements whose norm matches the ideal norm inside
    a box derived from the norm form (unit-adjusted in the real case).
    """
    if ring.d is None:
        q = Fraction(1)
        for P, e in I.powers:
            q *= Fraction(P.p) ** e
        return q
    scale = Fraction(1)
    J = I
    for P, e in I.powers:
        if e < 0:
            vp = 2 if P.e == 2 else 1  # valuation of p at P
            k = (-e + vp - 1) // vp
            J = J * factor_element(ring, P.p) ** k
            scale *= Fraction(1, P.p**k)
    lat = J.to_lattice()
    g = _principal_generator_lattice(ring, lat, budget)
    if g is None:
        return None
    out = g * scale
    if factor_element(ring, out).as_dict() != I.as_dict():
        return None
    return out


# ---------------------------------------------------------------------------
# class group


@dataclass(frozen=True)
class IdealClassGroup:
    """Invariant factors, generator ideals, and a desk-scale dlog table.

    ``inverted`` is empty for Cl(R) itself; for the class group of an open
    localization it lists the inverted primes, and triviality means landing
    in the subgroup they generate.
    """

    ring: NumberRing
    invariant_factors: tuple[int, ...]
    generators: tuple[FractionalIdeal, ...]
    reps: tuple = field(repr=False, default=())
    inverted: tuple = ()
    _sub: tuple = field(repr=False, default=())

    @property
    def order(self) -> int:
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def is_trivial_class(self, I: FractionalIdeal, budget: int = 10_000) -> bool:
        if not self._sub:
            return is_principal(self.ring, I, budget) is not None
        return any(
            is_principal(self.ring, I * K.inverse(), budget) is not None
            for K in self._sub
        )

    def class_of(self, I: FractionalIdeal, budget: int = 10_000) -> tuple[int, ...]:
        """Coordinates of [I] in the invariant-factor presentation."""
        for coords, rep in self.reps:
            if self.is_trivial_class(I * rep.inverse(), budget):
                return coords
        raise ConsistencyError("ideal class missing from the discrete-log table")

    def all_reps(self):
        return [rep for _, rep in self.reps]


def minkowski_bound_int(ring: NumberRing) -> int:
    """Integer cutoff >= the Minkowski bound (slight overshoot is harmless)."""
    if ring.d is None:
        return 1
    disc = abs(ring.discriminant)
    if ring.is_imaginary:
        return (2 * (isqrt(disc) + 1) * 100000) // 314159 + 1
    return (isqrt(disc) + 1) // 2 + 1


def class_group(ring: NumberRing, budget: int = 10_000) -> IdealClassGroup:
    """Ideal class group by prime enumeration below the Minkowski bound."""
    one = FractionalIdeal.unit(ring)
    if ring.d is None:
        return IdealClassGroup(ring, (), (), (((), one),))
    bound = minkowski_bound_int(ring)
    prime_gens = []
    for p in range(2, bound + 1):
        if not is_prime(p):
            continue
        for P in primes_above(ring, p):
            if P.f == 1:
                prime_gens.append(FractionalIdeal.from_dict(ring, {P: 1}))
    classes = [one]

    def find_class(I):
        for idx, rep in enumerate(classes):
            if is_principal(ring, I * rep.inverse(), budget) is not None:
                return idx
        return None

    frontier = [one]
    while frontier:
        I = frontier.pop()
        for g in prime_gens:
            J = I * g
            if find_class(J) is None:
                classes.append(J)
                frontier.append(J)

    table = [[find_class(I * J) for J in classes] for I in classes]
    from .abgroup import structure_from_table

    factors, gen_idx, dlog = structure_from_table(table)
    gens = tuple(classes[i] for i in gen_idx)
    reps = tuple((coords, classes[elt]) for coords, elt in sorted(dlog.items()))
    return IdealClassGroup(ring, tuple(factors), gens, reps)


def pic_of_open(ring: NumberRing, D, budget: int = 10_000) -> IdealClassGroup:
    """Class group of the localization away from the primes in D.

    Computed as Cl(R) modulo the subgroup generated by the classes of the
    inverted primes.
    """
    D = list(D)
    cl = class_group(ring, budget)
    if not D or cl.order == 1:
        return cl
    inverted = [FractionalIdeal.from_dict(ring, {P: 1}) for P in D]
    sub = [FractionalIdeal.unit(ring)]
    frontier = list(sub)
    while frontier:
        I = frontier.pop()
        for g in inverted:
            J = I * g
            if not any(
                is_principal(ring, J * K.inverse(), budget) is not None
                for K in sub
            ):
                sub.append(J)
                frontier.append(J)

    def quo_trivial(I):
        return any(
            is_principal(ring, I * K.inverse(), budget) is not None for K in sub
        )

    quots = [FractionalIdeal.unit(ring)]
    for rep in cl.all_reps():
        if not any(quo_trivial(rep * J.inverse()) for J in quots):
            quots.append(rep)

    def find_class(I):
        for idx, rep in enumerate(quots):
            if quo_trivial(I * rep.inverse()):
                return idx
        raise ConsistencyError("quotient class not matched")

    table = [[find_class(I * J) for J in quots] for I in quots]
    from .abgroup import structure_from_table

    factors, gen_idx, dlog = structure_from_table(table)
    gens = tuple(quots[i] for i in gen_idx)
    reps = tuple((coords, quots[elt]) for coords, elt in sorted(dlog.items()))
    return IdealClassGroup(
        ring, tuple(factors), gens, reps, inverted=tuple(inverted), _sub=tuple(sub)
    )


# ---------------------------------------------------------------------------
# S-units mod n-th powers


@dataclass(frozen=True)
class FiniteAbelianPresentation:
    """Invariant factors with one representative per factor."""

    factors: tuple[int, ...]
    representatives: tuple

    @property
    def order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out


def s_unit_basis(ring: NumberRing, S_primes, budget: int = 10_000):
    """Free generators of the S-unit group modulo torsion.

    The generators realize an HNF basis of the lattice
    {e in Z^S : prod P^e principal}, plus the fundamental unit in the real
    quadratic case.
    """
    S = list(S_primes)
    free = []
    if ring.is_quadratic and not ring.is_imaginary:
        free.append(fundamental_unit(ring, budget))
    if not S:
        return free
    if ring.d is None:
        for P in S:
            free.append(Fraction(P.p))
        return free
    cl = class_group(ring, budget)
    exponent = 1
    for f in cl.invariant_factors:
        exponent = exponent * f // gcd(exponent, f)
    import itertools

    vectors = []
    for vec in itertools.product(range(exponent), repeat=len(S)):
        if not any(vec):
            continue
        I = FractionalIdeal.from_dict(ring, dict(zip(S, vec)))
        if is_principal(ring, I, budget) is not None:
            vectors.append(list(vec))
    for i in range(len(S)):
        v = [0] * len(S)
        v[i] = exponent
        vectors.append(v)
    rows = hnf_row_lattice(vectors)
    for row in rows:
        I = FractionalIdeal.from_dict(ring, dict(zip(S, row)))
        g = is_principal(ring, I, budget)
        if g is None:
            raise ConsistencyError("S-unit lattice row is not principal")
        free.append(g)
    return free


def units_mod_n(
    ring: NumberRing, S_primes, n: int, budget: int = 10_000
) -> FiniteAbelianPresentation:
    """O_{K,S}^* / (O_{K,S}^*)^n as invariant factors with representatives."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    zeta, w = roots_of_unity(ring)
    free = s_unit_basis(ring, S_primes, budget)
    blocks = []
    g0 = gcd(w, n)
    if g0 > 1:
        # the class of zeta generates mu_w /(mu_w)^n, of order gcd(w, n)
        blocks.append((g0, zeta))
    if n > 1:
        for g in free:
            blocks.append((n, g))
    blocks.sort(key=lambda t: t[0])
    return FiniteAbelianPresentation(
        tuple(b[0] for b in blocks), tuple(b[1] for b in blocks)
    )


# ---------------------------------------------------------------------------
# rendering and parsing


def render_element(x) -> str:
    if isinstance(x, (Fraction, int)):
        return str(x)
    a, b = x.a, x.b
    if b == 0:
        return str(a)
    mag = abs(b)
    wpart = "w" if mag == 1 else f"{mag}*w"
    if a == 0:
        return wpart if b > 0 else f"-{wpart}"
    sign = "+" if b > 0 else "-"
    return f"{a}{sign}{wpart}"


def render_prime(P: PrimeIdeal) -> str:
    if P.ring.d is None or P.f == 2:
        return f"({P.p})"
    return f"({P.p}, {render_element(P.second_generator())})"


_RING_RE = re.compile(r"^Q\(sqrt\(?(-?\d+)\)?\)$")


def parse_ring(text: str) -> NumberRing:
    s = re.sub(r"\s+", "", text)
    if s == "Z":
        return ZZ
    m = _RING_RE.match(s)
    if not m:
        raise ParseError("expected 'Z' or 'Q(sqrt d)'", text, 0)
    try:
        return NumberRing(int(m.group(1)))
    except InvalidInputError as exc:
        raise ParseError(str(exc), text, 0) from exc


_TERM_RE = re.compile(
    r"(?P<sign>[+-]?)(?:"
    r"(?P<coefw>\d+(?:/\d+)?)\*?w"
    r"|(?P<wonly>w)"
    r"|(?P<rat>\d+(?:/\d+)?)"
    r")"
)


def parse_element(ring: NumberRing, text: str):
    """Parse 'a+b*w' style element literals (whitespace-insensitive)."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty element literal", text, 0)
    pos = 0
    a, b = Fraction(0), Fraction(0)
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError("bad element syntax", text, pos)
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("coefw") is not None:
            b += sign * Fraction(m.group("coefw"))
        elif m.group("wonly") is not None:
            b += sign
        else:
            a += sign * Fraction(m.group("rat"))
        pos = m.end()
    if ring.d is None:
        if b != 0:
            raise ParseError("w not defined over Z", text, 0)
        return a
    return ring.element(a, b)


def parse_prime(ring: NumberRing, text: str) -> PrimeIdeal:
    """Parse '(p)' or '(p, a+b*w)' into the matching prime of the ring."""
    s = re.sub(r"\s+", "", text)
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("prime literal must be parenthesized", text, 0)
    parts = s[1:-1].split(",")
    try:
        p = int(parts[0])
    except ValueError as exc:
        raise ParseError(
            "residue characteristic must be an integer", text, 1
        ) from exc
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    cands = primes_above(ring, p)
    if len(parts) == 1:
        if len(cands) == 1:
            return cands[0]
        raise ParseError(
            f"({p}) is not prime in {ring}; give a second generator", text, 0
        )
    g = parse_element(ring, ",".join(parts[1:]))
    matches = [P for P in cands if valuation(P, g) >= 1]
    if len(matches) == 1:
        return matches[0]
    raise ParseError("second generator does not pick a prime above p", text, 0)
