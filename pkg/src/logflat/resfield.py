"""Residue fields of prime ideals: F_p and F_p^2 with exact arithmetic.

Elements are ints in [0, p) for degree one, or pairs (a, b) representing
a + b*theta for degree two, theta being the image of the ring generator w.
Root finding is brute force over the field, which is the honest tool at
residue characteristics of desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError
from .rings import PrimeIdeal, RingElt, as_element, valuation


@dataclass(frozen=True)
class ResidueField:
    prime: PrimeIdeal

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def degree(self) -> int:
        return self.prime.f

    @property
    def size(self) -> int:
        return self.p**self.degree

    # ----- element shape helpers -----

    def zero(self):
        return 0 if self.degree == 1 else (0, 0)

    def one(self):
        return 1 if self.degree == 1 else (1, 0)

    def elements(self):
        if self.degree == 1:
            yield from range(self.p)
        else:
            for a in range(self.p):
                for b in range(self.p):
                    yield (a, b)

    def is_zero(self, x) -> bool:
        return x == 0 if self.degree == 1 else x == (0, 0)

    def add(self, x, y):
        if self.degree == 1:
            return (x + y) % self.p
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)

    def neg(self, x):
        if self.degree == 1:
            return (-x) % self.p
        return ((-x[0]) % self.p, (-x[1]) % self.p)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def mul(self, x, y):
        p = self.p
        if self.degree == 1:
            return (x * y) % p
        ring = self.prime.ring
        t, n0 = ring.w_trace, ring.w_norm_neg
        a = (x[0] * y[0] + x[1] * y[1] * n0) % p
        b = (x[0] * y[1] + x[1] * y[0] + x[1] * y[1] * t) % p
        return (a, b)

    def inv(self, x):
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of zero residue")
        return self.pow(x, self.size - 2)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, k):
        out = self.one()
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def from_int(self, n: int):
        if self.degree == 1:
            return n % self.p
        return (n % self.p, 0)

    # ----- transfer to and from the ring -----

    def reduce(self, x):
        """Residue of a field element with nonnegative valuation here."""
        P = self.prime
        ring = P.ring
        if ring.d is None:
            q = Fraction(x)
            if q.denominator % self.p == 0:
                raise InvalidInputError("negative valuation at the prime")
            return (q.numerator * pow(q.denominator, -1, self.p)) % self.p
        x = as_element(ring, x)
        den = x.a.denominator * x.b.denominator
        if den % self.p != 0:
            inv = pow(den % self.p, -1, self.p)
            ua = int(x.a * den) % self.p
            ub = int(x.b * den) % self.p
            if self.degree == 2:
                return ((ua * inv) % self.p, (ub * inv) % self.p)
            return ((ua + ub * P.r) * inv) % self.p
        # denominators at p: locate the residue by a bounded search
        if valuation(P, x) < 0:
            raise InvalidInputError("negative valuation at the prime")
        if self.degree == 1 and P.e == 1:
            # refine the root of w's minimal polynomial p-adically, then
            # evaluate a + b*r at the refined root
            k = 1
            d = den
            while d % self.p == 0:
                d //= self.p
                k += 1
            r = self._lift_root(k + 1)
            val = x.a + x.b * r
            if val.denominator % self.p == 0:
                raise InvalidInputError("residue did not stabilize")
            return (val.numerator * pow(val.denominator, -1, self.p)) % self.p
        # ramified with p in denominators: brute-force over residues
        for z in self.elements():
            cand = x - self.lift(z)
            if (isinstance(cand, RingElt) and cand.is_zero()) or cand == 0:
                return z
            if valuation(P, cand) >= 1:
                return z
        raise InvalidInputError("no residue matched")

    def _lift_root(self, prec: int) -> int:
        """Integer root of x^2 - t x - n0 modulo p^prec lifting r (Hensel)."""
        ring = self.prime.ring
        t, n0 = ring.w_trace, ring.w_norm_neg
        r, mod = self.prime.r, self.p
        target = self.p**prec
        while mod < target:
            mod = min(mod * mod, target)
            d = (2 * r - t) % mod
            r = (r - (r * r - t * r - n0) * pow(d, -1, mod)) % mod
        return r

    def lift(self, z):
        """Small ring element reducing to z."""
        ring = self.prime.ring
        if self.degree == 1:
            if ring.d is None:
                return Fraction(z)
            return ring.element(z)
        return ring.element(z[0], z[1])

    # ----- root finding (brute force) -----

    def sqrt(self, a):
        for z in self.elements():
            if self.mul(z, z) == (a if self.degree == 2 else a % self.p):
                return z
        return None

    def poly_roots(self, coeffs) -> list:
        """Roots in the field of sum coeffs[i] X^i (coeffs are residues)."""
        out = []
        for z in self.elements():
            acc = self.zero()
            for c in reversed(coeffs):
                acc = self.add(self.mul(acc, z), c)
            if self.is_zero(acc):
                out.append(z)
        return out

    def poly_is_separable_quadratic(self, c2, c1, c0) -> bool:
        """Whether c2 X^2 + c1 X + c0 (c2 != 0) has distinct roots over the
        algebraic closure."""
        if self.p == 2:
            return not self.is_zero(c1)
        disc = self.sub(
            self.mul(c1, c1), self.mul(self.from_int(4), self.mul(c2, c0))
        )
        return not self.is_zero(disc)
