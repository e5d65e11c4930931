"""Miller evaluation, monodromy pairing, and the logarithmic class pairing."""

from fractions import Fraction

import pytest

from logflat.curves import parse_curve
from logflat.divisors import MarkedBase, class_equal, fractional_class_part
from logflat.errors import (
    MarkedSetMismatchError,
    MembershipError,
    NonTorsionPointError,
    OrthogonalityError,
    SupportCollisionError,
)
from logflat.funcfield import miller_function
from logflat.pairings import (
    bad_primes,
    class_pairing_restricted,
    component_correction,
    log_class_pairing,
    miller_function_eval,
    monodromy_pairing,
    monodromy_profile,
    reduction_data,
    translation_candidates,
)
from logflat.qmodz import QmodZ
from logflat.reduction import reduction_component
from logflat.rings import ZZ, NumberRing, PrimeIdeal, valuation

EFIX = parse_curve(ZZ, "[0,-2,0,-3,0]")  # y^2 = x(x-3)(x+1): bad {2, 3}
E11 = parse_curve(ZZ, "[0,-1,1,-10,-20]")  # 11a1: bad {11}
EANCHOR = parse_curve(ZZ, "[-1,0,-1,1,2]")  # Z/6 torsion, I4/I3/I1 at 2/3/5
EIII = parse_curve(ZZ, "[0,-2,0,2,0]")  # rank 1, III at 2

BFIX = MarkedBase(ZZ, bad_primes(EFIX))
B11 = MarkedBase(ZZ, bad_primes(E11))
BANCHOR = MarkedBase(ZZ, bad_primes(EANCHOR))
BIII = MarkedBase(ZZ, bad_primes(EIII))


class TestMillerEval:
    def test_two_torsion_function_is_x(self):
        # div(x) = 2(0,0) - 2(O) on y^2 = x(x-3)(x+1)
        T = EFIX.point(0, 0)
        f = miller_function(EFIX, T, 2)
        assert f.B == () and f.C == (1,) and f.A == (0, 1)
        v = miller_function_eval(EFIX, T, EFIX.point(3, 0), EFIX.point(-1, 0))
        assert v == -3

    def test_trivial_difference(self):
        P = E11.point(5, 5)
        Q = E11.point(16, 60)
        assert miller_function_eval(E11, P, Q, Q) == 1

    def test_telescoping(self):
        P = E11.point(5, 5)
        pts = [E11.point(16, 60), E11.point(16, -61), E11.point(5, -6)]
        v01 = miller_function_eval(E11, P, pts[0], pts[1])
        v12 = miller_function_eval(E11, P, pts[1], pts[2])
        v02 = miller_function_eval(E11, P, pts[0], pts[2])
        assert v01 * v12 == v02

    def test_scale_invariance(self):
        P = E11.point(5, 5)
        a, b = E11.point(16, 60), E11.point(16, -61)
        base = miller_function_eval(E11, P, a, b)
        for s in (2, -3, Fraction(7, 5)):
            assert miller_function_eval(E11, P, a, b, scale=s) == base

    def test_support_collision(self):
        P = E11.point(5, 5)
        with pytest.raises(SupportCollisionError):
            miller_function_eval(E11, P, P, E11.point(16, 60))

    def test_divisor_orders(self):
        P = E11.point(5, 5)
        f = miller_function(E11, P, 5)
        assert f.ord_at(P) == 5
        assert f.ord_at(E11.infinity()) == -5
        for k in (2, 3, 4):
            assert f.ord_at(k * P) == 0


class TestMonodromyPairing:
    def test_identity_component_zero(self):
        assert monodromy_pairing(
            EFIX, EFIX.point(-1, 0), EFIX.point(0, 0), PrimeIdeal(ZZ, 3)
        ).is_zero()

    def test_node_self_pairing(self):
        v = monodromy_pairing(
            EFIX, EFIX.point(0, 0), EFIX.point(0, 0), PrimeIdeal(ZZ, 3)
        )
        assert v == QmodZ.of(1, 2)

    def test_11a1_values(self):
        P = E11.point(5, 5)
        s = PrimeIdeal(ZZ, 11)
        assert monodromy_pairing(E11, P, P, s) == QmodZ.of(1, 5)
        assert monodromy_pairing(E11, P, 2 * P, s) == QmodZ.of(2, 5)

    def test_correction_reduces_to_form(self):
        P = E11.point(5, 5)
        s = PrimeIdeal(ZZ, 11)
        c = component_correction(E11, P, P, s)
        assert QmodZ(c) == monodromy_pairing(E11, P, P, s)


class TestLogClassPairing:
    def test_zero_argument(self):
        cls = log_class_pairing(E11, E11.infinity(), E11.point(5, 5), B11)
        assert cls.is_trivial()

    def test_torsion_annihilation(self):
        P = E11.point(5, 5)
        cls = log_class_pairing(E11, P, P, B11)
        acc = cls
        for _ in range(4):
            acc = acc + cls
        assert acc.is_trivial()
        T = EFIX.point(0, 0)
        c2 = log_class_pairing(EFIX, T, T, BFIX)
        assert (c2 + c2).is_trivial()

    def test_fixture_half_at_three(self):
        T = EFIX.point(0, 0)
        nu = fractional_class_part(log_class_pairing(EFIX, T, T, BFIX))
        assert nu.coefficient(PrimeIdeal(ZZ, 3)) == QmodZ.of(1, 2)
        assert nu.coefficient(PrimeIdeal(ZZ, 2)) == QmodZ.of(0)

    def test_consistency_law_fixtures(self):
        # the four-point fixture only admits the diagonal evaluation: any
        # other argument pair exhausts the rational translations
        cases = [
            (EFIX, BFIX, EFIX.point(0, 0), EFIX.point(0, 0)),
            (E11, B11, E11.point(5, 5), E11.point(5, 5)),
            (E11, B11, E11.point(16, 60), E11.point(5, 5)),
            (EANCHOR, BANCHOR, EANCHOR.point(0, -1), EANCHOR.point(0, -1)),
            (EANCHOR, BANCHOR, EANCHOR.point(3, -4), EANCHOR.point(0, 2)),
            (EIII, BIII, EIII.point(0, 0), EIII.point(0, 0)),
        ]
        for E, B, x, y in cases:
            nu = fractional_class_part(log_class_pairing(E, x, y, B))
            prof = monodromy_profile(E, x, y, B)
            assert nu == prof.as_frac_divisor(), (str(E), str(x), str(y))

    def test_bilinearity_in_x(self):
        P = E11.point(5, 5)
        for a, b in [(1, 1), (1, 2), (2, 2)]:
            lhs = log_class_pairing(E11, (a + b) * P, P, B11)
            rhs = log_class_pairing(E11, a * P, P, B11) + log_class_pairing(
                E11, b * P, P, B11
            )
            assert class_equal(lhs, rhs)

    def test_bilinearity_in_y(self):
        P = E11.point(5, 5)
        lhs = log_class_pairing(E11, P, 3 * P, B11)
        rhs = log_class_pairing(E11, P, P, B11).scale(3)
        assert class_equal(lhs, rhs)

    def test_translation_independence(self):
        y = EANCHOR.point(0, -1)
        cands = [
            T
            for T in translation_candidates(EANCHOR, y, y)
            if not (T == y or (y + T) == y or T.is_infinity() or (y + T).is_infinity())
        ]
        assert len(cands) >= 3
        classes = [
            log_class_pairing(EANCHOR, y, y, BANCHOR, translations=[T])
            for T in cands[:4]
        ]
        for c in classes[1:]:
            assert class_equal(classes[0], c)

    def test_non_torsion_rejected(self):
        G = EIII.point(1, 1)
        with pytest.raises(NonTorsionPointError):
            log_class_pairing(EIII, EIII.point(0, 0), G, BIII)

    def test_marked_set_must_match(self):
        wrong = MarkedBase(ZZ, (PrimeIdeal(ZZ, 5),))
        with pytest.raises(MarkedSetMismatchError):
            log_class_pairing(E11, E11.point(5, 5), E11.point(5, 5), wrong)

    def test_quadratic_base(self):
        RI = NumberRing(-1)
        E = parse_curve(RI, "[0,-1,1,-10,-20]")
        B = MarkedBase(RI, bad_primes(E))
        P = E.point(5, 5)
        nu = fractional_class_part(log_class_pairing(E, P, P, B))
        prof = monodromy_profile(E, P, P, B)
        assert nu == prof.as_frac_divisor()


class TestRestrictedPairing:
    def setup_method(self):
        self.P2 = bad_primes(EIII)[0]
        self.G = EIII.point(1, 1)
        self.T = EIII.point(0, 0)
        self.full = list(range(reduction_data(EIII, self.P2).component_group.order))

    def test_identity_selection_succeeds(self):
        val = class_pairing_restricted(
            EIII, self.G, self.T, BIII, {self.P2: [0]}, {self.P2: self.full}
        )
        assert val.is_trivial()  # pic(Z) = 0

    def test_multiple_lands_identity(self):
        x = 2 * self.G
        nu = fractional_class_part(log_class_pairing(EIII, x, self.T, BIII))
        assert nu.is_zero()
        val = class_pairing_restricted(
            EIII, x, self.T, BIII, {self.P2: [0]}, {self.P2: self.full}
        )
        assert val.is_trivial()

    def test_orthogonality_violation(self):
        with pytest.raises(OrthogonalityError):
            class_pairing_restricted(
                EIII, self.T, self.T, BIII, {self.P2: self.full}, {self.P2: self.full}
            )

    def test_membership_violation(self):
        with pytest.raises(MembershipError):
            class_pairing_restricted(
                EIII, self.T, self.G, BIII, {self.P2: [0]}, {self.P2: [0]}
            )


class TestProfiles:
    def test_good_everywhere_is_empty(self):
        # y^2 + y = x^3 - x^2 has discriminant -11 (curve of conductor 11);
        # over a base where nothing is marked the profile must be empty
        E = parse_curve(ZZ, "[0,-1,1,0,0]")
        B = MarkedBase(ZZ, bad_primes(E))
        P = E.point(0, 0)
        prof = monodromy_profile(E, P, P, B)
        assert set(prof.as_dict()) == set(B.marked)

    def test_identity_everywhere_zero_profile(self):
        prof = monodromy_profile(EIII, self.gen(), EIII.point(0, 0), BIII)
        assert all(v.is_zero() for _, v in prof.values)

    def gen(self):
        return EIII.point(1, 1)

    def test_profile_matches_pointwise(self):
        T = EFIX.point(0, 0)
        prof = monodromy_profile(EFIX, T, T, BFIX)
        for P, v in prof.values:
            assert v == monodromy_pairing(EFIX, T, T, P)
