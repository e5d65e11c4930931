"""Divisors with rational coefficients along a marked prime set.

Over a base ring with marked primes D, the group of interest is the set of
divisors with arbitrary rational coefficients at the marked primes and
integer coefficients elsewhere, taken modulo principal divisors.  This
quotient (the logarithmic Picard group of the marked base) sits in an exact
sequence between the ordinary class group and a sum of Q/Z parts indexed by
the marked primes; both ends are computed here exactly.

Canonical class representatives store the fractional coefficients in [0, 1)
and reduce the integral leftover to class-group coordinates, which makes
equality decidable without group-quotient witnesses.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .abgroup import structure_from_table
from .errors import (
    BaseMismatchError,
    ConsistencyError,
    InvalidInputError,
    ParseError,
)
from .qmodz import QmodZ
from .rings import (
    FractionalIdeal,
    IdealClassGroup,
    NumberRing,
    PrimeIdeal,
    class_group,
    is_principal,
    parse_prime,
    pic_of_open,
    render_prime,
    units_mod_n,
)


@lru_cache(maxsize=None)
def cached_class_group(ring: NumberRing) -> IdealClassGroup:
    return class_group(ring)


def _prime_sort_key(P: PrimeIdeal):
    return (P.p, -P.f, P.r if P.r is not None else -1)


@dataclass(frozen=True)
class MarkedBase:
    """A number ring together with a finite set of distinct marked primes."""

    ring: NumberRing
    marked: tuple[PrimeIdeal, ...]

    def __post_init__(self):
        seen = set()
        for P in self.marked:
            if P.ring != self.ring:
                raise BaseMismatchError("marked prime from a different ring")
            if P in seen:
                raise InvalidInputError(f"marked prime {P} repeated")
            seen.add(P)
        object.__setattr__(
            self, "marked", tuple(sorted(self.marked, key=_prime_sort_key))
        )

    def index_of(self, P: PrimeIdeal) -> int:
        return self.marked.index(P)

    def __str__(self):
        inner = ", ".join(render_prime(P) for P in self.marked)
        return f"{self.ring} marked {{{inner}}}"


@dataclass(frozen=True)
class RationalDivisor:
    """Formal Q-combination of primes, integral away from the marked set."""

    base: MarkedBase
    coefficients: tuple[tuple[PrimeIdeal, Fraction], ...]

    @classmethod
    def from_dict(cls, base: MarkedBase, d: dict) -> "RationalDivisor":
        marked = set(base.marked)
        items = []
        for P, c in d.items():
            c = Fraction(c)
            if c == 0:
                continue
            if P.ring != base.ring:
                raise BaseMismatchError("prime from a different ring")
            if c.denominator != 1 and P not in marked:
                raise InvalidInputError(
                    f"non-integer coefficient {c} at unmarked prime {P}"
                )
            items.append((P, c))
        items.sort(key=lambda t: _prime_sort_key(t[0]))
        return cls(base, tuple(items))

    @classmethod
    def zero(cls, base: MarkedBase) -> "RationalDivisor":
        return cls(base, ())

    @classmethod
    def from_ideal(cls, base: MarkedBase, I: FractionalIdeal) -> "RationalDivisor":
        return cls.from_dict(base, {P: Fraction(e) for P, e in I.powers})

    def as_dict(self) -> dict:
        return dict(self.coefficients)

    def coefficient(self, P: PrimeIdeal) -> Fraction:
        return self.as_dict().get(P, Fraction(0))

    def __add__(self, other: "RationalDivisor") -> "RationalDivisor":
        if self.base != other.base:
            raise BaseMismatchError("divisors over different marked bases")
        d = self.as_dict()
        for P, c in other.coefficients:
            d[P] = d.get(P, Fraction(0)) + c
        return RationalDivisor.from_dict(self.base, d)

    def __neg__(self) -> "RationalDivisor":
        return RationalDivisor(
            self.base, tuple((P, -c) for P, c in self.coefficients)
        )

    def __sub__(self, other: "RationalDivisor") -> "RationalDivisor":
        return self + (-other)

    def scale(self, k) -> "RationalDivisor":
        k = Fraction(k)
        return RationalDivisor.from_dict(
            self.base, {P: c * k for P, c in self.coefficients}
        )

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.coefficients)

    def integral_ideal(self) -> FractionalIdeal:
        if not self.is_integral():
            raise InvalidInputError("divisor has fractional coefficients")
        return FractionalIdeal.from_dict(
            self.base.ring, {P: int(c) for P, c in self.coefficients}
        )

    def __str__(self):
        if not self.coefficients:
            return "0"
        parts = []
        for P, c in self.coefficients:
            if c == 1:
                parts.append(render_prime(P))
            else:
                parts.append(f"{c}*{render_prime(P)}")
        return " + ".join(parts)


@dataclass(frozen=True)
class FracDivisorModZ:
    """Q/Z coefficients along the marked primes (all zero off them)."""

    base: MarkedBase
    coeffs: tuple[QmodZ, ...]  # aligned with base.marked

    def __post_init__(self):
        if len(self.coeffs) != len(self.base.marked):
            raise InvalidInputError("coefficient vector length mismatch")

    @classmethod
    def zero(cls, base: MarkedBase) -> "FracDivisorModZ":
        return cls(base, tuple(QmodZ.of(0) for _ in base.marked))

    @classmethod
    def from_dict(cls, base: MarkedBase, d: dict) -> "FracDivisorModZ":
        vec = [QmodZ(Fraction(d.get(P, 0))) for P in base.marked]
        return cls(base, tuple(vec))

    def coefficient(self, P: PrimeIdeal) -> QmodZ:
        return self.coeffs[self.base.index_of(P)]

    def __add__(self, other: "FracDivisorModZ") -> "FracDivisorModZ":
        if self.base != other.base:
            raise BaseMismatchError("different marked bases")
        return FracDivisorModZ(
            self.base, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    def scale(self, k: int) -> "FracDivisorModZ":
        return FracDivisorModZ(self.base, tuple(c * k for c in self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def denominators_divide(self, n: int) -> bool:
        return all(n % c.order == 0 for c in self.coeffs)

    def __str__(self):
        parts = [
            f"{c}*{render_prime(P)}"
            for P, c in zip(self.base.marked, self.coeffs)
            if not c.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class LogPicClass:
    """Class of a rational divisor modulo principal divisors.

    The pair (fractional parts along the marked set, class-group coordinates
    of the integral leftover) is a complete invariant: two classes agree iff
    their difference is an integral principal divisor.
    """

    base: MarkedBase
    fractional: FracDivisorModZ
    pic_coords: tuple[int, ...]

    @property
    def ring(self):
        return self.base.ring

    def representative(self) -> RationalDivisor:
        cl = cached_class_group(self.ring)
        rep_ideal = dict(cl.reps)[self.pic_coords]
        div = RationalDivisor.from_ideal(self.base, rep_ideal)
        frac = RationalDivisor.from_dict(
            self.base,
            {P: c.value for P, c in zip(self.base.marked, self.fractional.coeffs)},
        )
        return div + frac

    def is_trivial(self) -> bool:
        return self.fractional.is_zero() and all(c == 0 for c in self.pic_coords)

    def __add__(self, other: "LogPicClass") -> "LogPicClass":
        if self.base != other.base:
            raise BaseMismatchError("classes over different marked bases")
        return log_pic_class(self.representative() + other.representative())

    def __neg__(self) -> "LogPicClass":
        return log_pic_class(-self.representative())

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "LogPicClass":
        return log_pic_class(self.representative().scale(k))

    def __str__(self):
        return f"[{self.representative()}]"


def log_pic_class(d: RationalDivisor) -> LogPicClass:
    """Canonical reduced class of a rational divisor."""
    base = d.base
    frac = {}
    integral = {}
    marked = set(base.marked)
    for P, c in d.coefficients:
        if P in marked:
            fpart = c - (c.numerator // c.denominator)
            frac[P] = fpart
            whole = c - fpart
            if whole:
                integral[P] = int(whole)
        else:
            integral[P] = int(c)
    I = FractionalIdeal.from_dict(base.ring, integral)
    coords = cached_class_group(base.ring).class_of(I)
    return LogPicClass(base, FracDivisorModZ.from_dict(base, frac), coords)


def class_equal(c1: LogPicClass, c2: LogPicClass) -> bool:
    if c1.base != c2.base:
        raise BaseMismatchError("classes over different marked bases")
    return c1.fractional == c2.fractional and c1.pic_coords == c2.pic_coords


def order_of_class(c: LogPicClass) -> int:
    """Least k >= 1 with k*c trivial."""
    k0 = 1
    for q in c.fractional.coeffs:
        k0 = k0 * q.order // gcd(k0, q.order)
    integral = c.scale(k0)
    if not integral.fractional.is_zero():
        raise ConsistencyError("scaling by the denominator lcm left fractions")
    cl = cached_class_group(c.ring)
    j = 1
    for d_i, coord in zip(cl.invariant_factors, integral.pic_coords):
        o = d_i // gcd(d_i, coord) if coord else 1
        j = j * o // gcd(j, o)
    return k0 * j


def fractional_class_part(c: LogPicClass) -> FracDivisorModZ:
    """Project the marked-prime coefficients of the class modulo Z.

    Kills exactly the image of the ordinary class group, and surjects onto
    the full Q/Z sum.
    """
    return c.fractional


@dataclass(frozen=True)
class PicClassModN:
    """An ideal class considered modulo n-th powers of classes."""

    ring: NumberRing
    n: int
    ideal: FractionalIdeal

    def is_trivial(self) -> bool:
        cl = cached_class_group(self.ring)
        for rep in cl.all_reps():
            if is_principal(self.ring, self.ideal * (rep**self.n).inverse()) is not None:
                return True
        return False

    def witness(self):
        """A class representative whose n-th power matches, if trivial."""
        cl = cached_class_group(self.ring)
        for rep in cl.all_reps():
            if is_principal(self.ring, self.ideal * (rep**self.n).inverse()) is not None:
                return rep
        return None

    def __eq__(self, other):
        if not isinstance(other, PicClassModN):
            return NotImplemented
        if (self.ring, self.n) != (other.ring, other.n):
            return False
        return PicClassModN(
            self.ring, self.n, self.ideal * other.ideal.inverse()
        ).is_trivial()


def lifted_pic_class(omega: FracDivisorModZ, n: int) -> PicClassModN:
    """Class mod n-th powers of the canonical integral lift of omega.

    Sends the coefficient 1/n at a marked prime to that prime's class; this
    is the obstruction for omega to come from the full torsor group.
    """
    if not omega.denominators_divide(n):
        raise InvalidInputError("coefficient denominators must divide n")
    M = canonical_lift(omega, n)
    return PicClassModN(omega.base.ring, n, M.integral_ideal())


def canonical_lift(omega: FracDivisorModZ, n: int) -> RationalDivisor:
    """Integral divisor sum k_m * P_m with k_m in [0, n) lifting omega."""
    if not omega.denominators_divide(n):
        raise InvalidInputError("coefficient denominators must divide n")
    d = {}
    for P, c in zip(omega.base.marked, omega.coeffs):
        k = int(c.value * n)
        if k:
            d[P] = Fraction(k)
    return RationalDivisor.from_dict(omega.base, d)


# ---------------------------------------------------------------------------
# torsor groups for the two topologies


@dataclass(frozen=True)
class KummerFppfGroup:
    """H^1 for mu_n over an open piece: S-units mod n plus class torsion."""

    ring: NumberRing
    inverted: tuple[PrimeIdeal, ...]
    n: int
    order: int
    unit_factors: tuple[int, ...]
    pic_torsion_factors: tuple[int, ...]


def torsor_group_fppf(
    ring: NumberRing, inverted, n: int, budget: int = 10_000
) -> KummerFppfGroup:
    """Order (and block factors) of the fppf mu_n torsor group over the
    complement of the inverted primes."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    inverted = tuple(sorted(inverted, key=_prime_sort_key))
    units = units_mod_n(ring, list(inverted), n, budget)
    pic_u = pic_of_open(ring, list(inverted), budget)
    tors = tuple(gcd(f, n) for f in pic_u.invariant_factors if gcd(f, n) > 1)
    order = units.order
    for t in tors:
        order *= t
    return KummerFppfGroup(ring, inverted, n, order, units.factors, tors)


@dataclass(frozen=True)
class KummerLogGroup:
    """mu_n torsor group of the marked base for the log flat topology.

    order = fppf_order * |ker of the lift obstruction|; the cross-check
    against the fppf group over the punctured base is enforced at
    construction time.
    """

    base: MarkedBase
    n: int
    order: int
    fppf_order: int
    kernel_generators: tuple[tuple[FracDivisorModZ, int], ...]
    kernel_order: int
    punctured_order: int


def obstruction_kernel(base: MarkedBase, n: int) -> list[FracDivisorModZ]:
    """All omega with denominators dividing n whose lifted class is an n-th
    power, enumerated exhaustively over the n^|D| candidates."""
    out = []
    r = len(base.marked)
    for vec in itertools.product(range(n), repeat=r):
        omega = FracDivisorModZ(
            base, tuple(QmodZ.of(v, n) for v in vec)
        )
        if lifted_pic_class(omega, n).is_trivial():
            out.append(omega)
    return out


def torsor_group_log(
    base: MarkedBase, n: int, budget: int = 10_000
) -> KummerLogGroup:
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    fppf_S = torsor_group_fppf(base.ring, (), n, budget)
    kernel = obstruction_kernel(base, n)
    korder = len(kernel)

    # subgroup structure of the kernel inside (Z/n)^r
    index = {tuple(c.value for c in w.coeffs): i for i, w in enumerate(kernel)}
    table = []
    for w1 in kernel:
        row = []
        for w2 in kernel:
            s = w1 + w2
            row.append(index[tuple(c.value for c in s.coeffs)])
        table.append(row)
    factors, gen_idx, _ = structure_from_table(table)
    gens = tuple((kernel[i], f) for i, f in zip(gen_idx, factors))

    order = fppf_S.order * korder
    punctured = torsor_group_fppf(base.ring, base.marked, n, budget)
    if punctured.order != order:
        raise ConsistencyError(
            "two torsor-group presentations disagree: "
            f"{order} (marked base) vs {punctured.order} (punctured base)"
        )
    return KummerLogGroup(
        base, n, order, fppf_S.order, gens, korder, punctured.order
    )


# ---------------------------------------------------------------------------
# divisor literals


def parse_divisor(base: MarkedBase, text: str) -> RationalDivisor:
    """Parse divisor literals like '1/2*(2,1+w) + 3*(7)'."""
    s = re.sub(r"\s+", "", text)
    if not s:
        return RationalDivisor.zero(base)
    d: dict[PrimeIdeal, Fraction] = {}
    pos = 0
    sign = 1
    while pos < len(s):
        if s[pos] == "+":
            sign, pos = 1, pos + 1
        elif s[pos] == "-":
            sign, pos = -1, pos + 1
        m = re.match(r"(\d+(?:/\d+)?)\*", s[pos:])
        coeff = Fraction(1)
        if m:
            coeff = Fraction(m.group(1))
            pos += m.end()
        if pos >= len(s) or s[pos] != "(":
            raise ParseError("expected a prime literal", text, pos)
        depth = 0
        end = pos
        while end < len(s):
            if s[end] == "(":
                depth += 1
            elif s[end] == ")":
                depth -= 1
                if depth == 0:
                    break
            end += 1
        if depth != 0:
            raise ParseError("unbalanced parentheses", text, pos)
        P = parse_prime(base.ring, s[pos : end + 1])
        d[P] = d.get(P, Fraction(0)) + sign * coeff
        pos = end + 1
    return RationalDivisor.from_dict(base, d)
