"""Class-group-valued and Q/Z-valued pairings on elliptic curve points.

For a torsion point y of exact order n, the function g with divisor
n(y) - n(O) evaluates on translated degree-zero divisors (x+T) - (T); the
divisor -(1/n) div(g((x+T)-(T))) on the base ring, read modulo principal
divisors, is the logarithmic class pairing <x, y>.  Its fractional part at
each bad prime recovers the component-group pairing of the reductions of x
and y (the monodromy pairing), computed independently from intersection
matrices; the agreement of the two routes is the central cross-check of
this package.

The global sign is fixed so that on a split multiplicative fiber with
cyclically ordered components the pairing of components i and j is +i*j/n;
equivalently the divisor above carries the minus sign.  This convention is
verified internally and documented rather than matched to any external
table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .curves import CurvePoint, EllipticCurve
from .divisors import (
    FracDivisorModZ,
    LogPicClass,
    MarkedBase,
    RationalDivisor,
    cached_class_group,
    log_pic_class,
)
from .errors import (
    ConsistencyError,
    InvalidInputError,
    MarkedSetMismatchError,
    MembershipError,
    NonTorsionPointError,
    OrthogonalityError,
    SupportCollisionError,
)
from .funcfield import eval_at_difference, miller_function
from .qmodz import QmodZ
from .reduction import ReductionData, reduction_component, tate_algorithm
from .rings import (
    FractionalIdeal,
    NumberRing,
    PrimeIdeal,
    factor_element,
    factor_int,
    primes_above,
    valuation,
)


@lru_cache(maxsize=None)
def reduction_data(E: EllipticCurve, P: PrimeIdeal) -> ReductionData:
    return tate_algorithm(E, P)


@lru_cache(maxsize=None)
def bad_primes(E: EllipticCurve) -> tuple[PrimeIdeal, ...]:
    """Primes of bad reduction of the curve (local minimal models)."""
    ring = E.ring
    disc = E.discriminant
    if ring.d is None:
        support = sorted(factor_int(Fraction(disc).numerator))
        cands = [PrimeIdeal(ring, p) for p in support]
    else:
        n = disc.norm()
        cands = []
        for p in sorted(set(factor_int(n.numerator))):
            cands.extend(primes_above(ring, p))
    out = []
    for P in cands:
        if not reduction_data(E, P).is_good:
            out.append(P)
    return tuple(out)


def check_marked_base(E: EllipticCurve, base: MarkedBase):
    if base.ring != E.ring:
        raise MarkedSetMismatchError("marked base ring differs from the curve's")
    expected = set(bad_primes(E))
    if set(base.marked) != expected:
        raise MarkedSetMismatchError(
            "marked primes must be exactly the bad reduction set "
            f"{{{', '.join(str(P) for P in sorted(expected, key=str))}}}"
        )


@lru_cache(maxsize=None)
def _miller(E: EllipticCurve, y: CurvePoint, n: int):
    return miller_function(E, y, n)


def miller_function_eval(
    E: EllipticCurve, y: CurvePoint, P1: CurvePoint, P2: CurvePoint, scale=1
):
    """g(P1)/g(P2) for g with divisor n(y) - n(O), n the exact order of y.

    The scalar normalization of g cancels on the degree-zero divisor
    (P1) - (P2); passing a nonzero ``scale`` multiplies g and must not
    change the result.
    """
    n = y.order()
    if n is None:
        raise NonTorsionPointError("base point of the function must be torsion")
    for Q in (P1, P2):
        if Q.is_infinity() or Q == y:
            raise SupportCollisionError(
                "evaluation divisor meets the function's divisor"
            )
    g = _miller(E, y, n)
    if scale != 1:
        from .funcfield import CurveFunction, pscale

        g = CurveFunction(E, pscale(g.A, scale), pscale(g.B, scale), g.C)
    return eval_at_difference(g, P1, P2)


def translation_candidates(E: EllipticCurve, x: CurvePoint, y: CurvePoint):
    """Deterministic list of auxiliary points for support separation."""
    seen = []

    def push(P):
        if not P.is_infinity() and P not in seen:
            seen.append(P)

    n = y.order() or 1
    for a in range(1, n + 1):
        push(a * y)
    for a in range(1, 4):
        push(a * x)
        push(a * x + y)
        push(x + a * y)
    # small rational points (x-coordinate box search over the base field)
    if E.ring.d is None:
        for xc in range(-10, 25):
            # y^2 + (a1 x + a3) y = rhs: solve the quadratic exactly
            b = E.a1 * xc + E.a3
            c = -(xc**3 + E.a2 * xc * xc + E.a4 * xc + E.a6)
            disc = b * b - 4 * c
            if disc < 0:
                continue
            num = Fraction(disc).numerator
            root = _exact_sqrt(num)
            if root is None:
                continue
            for sgn in (1, -1):
                yv = Fraction(-b + sgn * root, 2)
                if E.rhs_minus_lhs(Fraction(xc), yv) == 0:
                    push(E.point(Fraction(xc), yv))
    return seen


def _exact_sqrt(n: int):
    from math import isqrt

    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def _pairing_divisor(
    E: EllipticCurve, x: CurvePoint, y: CurvePoint, base: MarkedBase, T: CurvePoint
) -> RationalDivisor:
    n = y.order()
    xT = x + T
    if T.is_infinity() or xT.is_infinity():
        raise SupportCollisionError("translation hit the origin")
    if xT == y or T == y:
        raise SupportCollisionError("translation meets the function divisor")
    value = miller_function_eval(E, y, xT, T)
    div = factor_element(base.ring, value)
    coeffs = {P: Fraction(-e, n) for P, e in div.powers}
    marked = set(base.marked)
    for P, c in coeffs.items():
        if c.denominator != 1 and P not in marked:
            raise ConsistencyError(
                f"pairing divisor has fractional coefficient {c} at the "
                f"good prime {P}"
            )
    return RationalDivisor.from_dict(base, coeffs)


def log_class_pairing(
    E: EllipticCurve,
    x: CurvePoint,
    y: CurvePoint,
    base: MarkedBase,
    retries: int | None = None,
    translations=None,
) -> LogPicClass:
    """The pairing <x, y> in the logarithmic Picard group of the base.

    y must be torsion; the marked set must equal the curve's bad reduction
    set.  Support collisions are resolved by translating the evaluation
    divisor; the class does not depend on the translation used (pass
    ``translations`` to pin specific auxiliary points).
    """
    check_marked_base(E, base)
    if y.order() is None:
        raise NonTorsionPointError("second pairing argument must be torsion")
    if x.is_infinity():
        return log_pic_class(RationalDivisor.zero(base))
    cands = (
        list(translations)
        if translations is not None
        else translation_candidates(E, x, y)
    )
    if retries is not None:
        cands = cands[:retries]
    last = None
    for T in cands:
        try:
            d = _pairing_divisor(E, x, y, base, T)
            return log_pic_class(d)
        except SupportCollisionError as exc:
            last = exc
            continue
    raise SupportCollisionError(
        "no translation separated the supports"
    ) from last


def monodromy_pairing(
    E: EllipticCurve, x: CurvePoint, y: CurvePoint, s: PrimeIdeal
) -> QmodZ:
    """Component pairing of the reductions of x and y at a bad prime."""
    rd = reduction_data(E, s)
    gx = reduction_component(rd, x)
    gy = reduction_component(rd, y)
    return rd.component_group.form(gx, gy)


def component_correction(
    E: EllipticCurve, x: CurvePoint, y: CurvePoint, s: PrimeIdeal
) -> Fraction:
    """Exact rational correction c with c = form(gx, gy) mod Z.

    This is the pseudo-inverse solve against the intersection matrix before
    reduction mod Z; the integral ambiguity is absorbed by the class
    quotient.
    """
    rd = reduction_data(E, s)
    gx = reduction_component(rd, x)
    gy = reduction_component(rd, y)
    return rd.component_group.correction(gx, gy)


@dataclass(frozen=True)
class MonodromyProfile:
    """Per-bad-prime Q/Z pairing values; support inside the marked set."""

    base: MarkedBase
    values: tuple[tuple[PrimeIdeal, QmodZ], ...]

    def as_dict(self) -> dict:
        return dict(self.values)

    def value_at(self, P: PrimeIdeal) -> QmodZ:
        return self.as_dict().get(P, QmodZ.of(0))

    def as_frac_divisor(self) -> FracDivisorModZ:
        return FracDivisorModZ.from_dict(
            self.base, {P: v.value for P, v in self.values}
        )

    def __str__(self):
        if not self.values:
            return "0"
        return " + ".join(f"{v}*{P}" for P, v in self.values if not v.is_zero()) or "0"


def monodromy_profile(
    E: EllipticCurve, x: CurvePoint, y: CurvePoint, base: MarkedBase
) -> MonodromyProfile:
    """All local component pairings of x and y along the marked set."""
    check_marked_base(E, base)
    vals = []
    for P in base.marked:
        vals.append((P, monodromy_pairing(E, x, y, P)))
    return MonodromyProfile(base, tuple(vals))


@dataclass(frozen=True)
class IdealClass:
    """An honest ideal class: representative plus class-group coordinates."""

    ring: NumberRing
    coords: tuple[int, ...]
    representative: FractionalIdeal

    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.coords)


def _subgroup_closure(G, elements) -> set[int]:
    out = {0}
    frontier = [0]
    elements = set(elements) | {0}
    while frontier:
        a = frontier.pop()
        for b in elements:
            c = G.add(a, b)
            if c not in out:
                out.add(c)
                frontier.append(c)
    # close under the generated sums as well
    changed = True
    while changed:
        changed = False
        for a in list(out):
            for b in list(out):
                c = G.add(a, b)
                if c not in out:
                    out.add(c)
                    changed = True
    return out


def class_pairing_restricted(
    E: EllipticCurve,
    x: CurvePoint,
    y: CurvePoint,
    base: MarkedBase,
    gamma_x,
    gamma_y,
) -> IdealClass:
    """The classical class pairing under orthogonal component restrictions.

    gamma_x and gamma_y map each bad prime to a set of component-group
    elements; the two subgroups must be orthogonal under the pairing form
    at every bad prime, and the reductions of x and y must land inside
    them.  The fractional part of the logarithmic pairing then vanishes and
    the integral leftover is an honest ideal class.
    """
    check_marked_base(E, base)
    for P in base.marked:
        rd = reduction_data(E, P)
        G = rd.component_group
        gx_sub = _subgroup_closure(G, gamma_x.get(P, ()))
        gy_sub = _subgroup_closure(G, gamma_y.get(P, ()))
        for a in gx_sub:
            for b in gy_sub:
                if not G.form(a, b).is_zero():
                    raise OrthogonalityError(
                        f"components {a} and {b} at {P} pair to {G.form(a, b)}"
                    )
        if reduction_component(rd, x) not in gx_sub:
            raise MembershipError(f"x reduces outside the selection at {P}")
        if reduction_component(rd, y) not in gy_sub:
            raise MembershipError(f"y reduces outside the selection at {P}")
    cls = log_class_pairing(E, x, y, base)
    if not cls.fractional.is_zero():
        raise ConsistencyError(
            "fractional part did not vanish under orthogonal restrictions"
        )
    cl = cached_class_group(base.ring)
    rep = dict(cl.reps)[cls.pic_coords]
    return IdealClass(base.ring, cls.pic_coords, rep)
