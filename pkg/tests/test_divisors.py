"""Rational divisors, log Picard classes, and the torsor-group presentations."""

from fractions import Fraction

import pytest

from logflat.divisors import (
    FracDivisorModZ,
    MarkedBase,
    RationalDivisor,
    canonical_lift,
    class_equal,
    fractional_class_part,
    lifted_pic_class,
    log_pic_class,
    obstruction_kernel,
    order_of_class,
    parse_divisor,
    torsor_group_fppf,
    torsor_group_log,
)
from logflat.errors import BaseMismatchError, InvalidInputError
from logflat.qmodz import QmodZ
from logflat.rings import ZZ, NumberRing, PrimeIdeal, factor_element, primes_above

R5 = NumberRing(-5)
RI = NumberRing(-1)
P5 = PrimeIdeal(ZZ, 5)
P7 = PrimeIdeal(ZZ, 7)
p2 = primes_above(R5, 2)[0]
p3 = primes_above(R5, 3)[0]
p5 = primes_above(R5, 5)[0]

BZ5 = MarkedBase(ZZ, (P5,))
B5 = MarkedBase(R5, (p2,))


def div(base, d):
    return RationalDivisor.from_dict(base, d)


class TestRationalDivisor:
    def test_unmarked_fraction_rejected(self):
        with pytest.raises(InvalidInputError):
            div(BZ5, {P7: Fraction(1, 2)})

    def test_marked_fraction_allowed(self):
        d = div(BZ5, {P5: Fraction(1, 2), P7: 3})
        assert d.coefficient(P5) == Fraction(1, 2)

    def test_addition_drops_zeros(self):
        d = div(BZ5, {P5: Fraction(1, 2)})
        assert (d + d + d.scale(-2)).coefficients == ()

    def test_duplicate_marked_prime_rejected(self):
        with pytest.raises(InvalidInputError):
            MarkedBase(ZZ, (P5, P5))


class TestLogPicClass:
    def test_integral_principal_is_trivial(self):
        c = log_pic_class(div(BZ5, {P5: 3}))
        assert c.is_trivial()

    def test_p2_class_nontrivial_order_two(self):
        c = log_pic_class(div(B5, {p2: 1}))
        assert not c.is_trivial()
        assert order_of_class(c) == 2

    def test_halves_sum_to_trivial(self):
        h = log_pic_class(div(BZ5, {P5: Fraction(1, 2)}))
        assert (h + h).is_trivial()

    def test_class_equal_modulo_principal(self):
        d1 = div(BZ5, {P5: Fraction(1, 2)})
        d2 = d1 + RationalDivisor.from_ideal(BZ5, factor_element(ZZ, 3))
        assert class_equal(log_pic_class(d1), log_pic_class(d2))

    def test_class_unequal_fractions(self):
        a = log_pic_class(div(BZ5, {P5: Fraction(1, 3)}))
        b = log_pic_class(div(BZ5, {P5: Fraction(2, 3)}))
        assert not class_equal(a, b)

    def test_difference_two_p2_minus_div2(self):
        # [p2 + (1/2)p2] = [(1/2)p2 + div(2) - p2] since 2*p2 - div(2) = 0
        lhs = log_pic_class(div(B5, {p2: Fraction(3, 2)}))
        d2 = RationalDivisor.from_ideal(B5, factor_element(R5, 2))
        rhs = log_pic_class(div(B5, {p2: Fraction(-1, 2)}) + d2)
        assert class_equal(lhs, rhs)

    def test_base_mismatch(self):
        with pytest.raises(BaseMismatchError):
            class_equal(
                log_pic_class(div(BZ5, {P5: 1})),
                log_pic_class(div(B5, {p2: 1})),
            )

    def test_order_law_over_z(self):
        for n in range(1, 51):
            c = log_pic_class(div(BZ5, {P5: Fraction(1, n)}))
            assert order_of_class(c) == n

    def test_order_half_p2_is_four(self):
        c = log_pic_class(div(B5, {p2: Fraction(1, 2)}))
        assert order_of_class(c) == 4
        assert order_of_class(log_pic_class(div(B5, {}))) == 1

    def test_bracket_not_q_linear(self):
        # [(1/n) D] has order n even when [D] is trivial
        c = log_pic_class(div(BZ5, {P5: 1}))
        assert c.is_trivial()
        frac = log_pic_class(div(BZ5, {P5: Fraction(1, 4)}))
        assert order_of_class(frac) == 4


class TestFractionalPart:
    def test_projection(self):
        c = log_pic_class(div(BZ5, {P5: Fraction(1, 2)}))
        assert fractional_class_part(c).coefficient(P5) == QmodZ.of(1, 2)

    def test_integral_in_kernel(self):
        c = log_pic_class(div(BZ5, {P5: 4, P7: -2}))
        assert fractional_class_part(c).is_zero()

    def test_mixed(self):
        d = div(MarkedBase(ZZ, (P5,)), {P5: Fraction(1, 3), P7: 4})
        assert fractional_class_part(log_pic_class(d)).coefficient(P5) == QmodZ.of(1, 3)

    def test_homomorphism(self):
        a = log_pic_class(div(B5, {p2: Fraction(1, 3)}))
        b = log_pic_class(div(B5, {p2: Fraction(5, 6)}))
        lhs = fractional_class_part(a + b)
        rhs = fractional_class_part(a) + fractional_class_part(b)
        assert lhs == rhs

    def test_surjectivity_with_explicit_preimage(self):
        # any target with denominator n has the scaled divisor as preimage
        base = MarkedBase(R5, (p2, p3))
        for vec in [(1, 0), (3, 2), (5, 5)]:
            omega = FracDivisorModZ(
                base, tuple(QmodZ.of(v, 6) for v in vec)
            )
            d = RationalDivisor.from_dict(
                base,
                {P: c.value for P, c in zip(base.marked, omega.coeffs)},
            )
            assert fractional_class_part(log_pic_class(d)) == omega


class TestLiftObstruction:
    def test_trivial_over_z(self):
        base = BZ5
        omega = FracDivisorModZ.from_dict(base, {P5: Fraction(1, 2)})
        assert lifted_pic_class(omega, 2).is_trivial()

    def test_nontrivial_for_p2(self):
        omega = FracDivisorModZ.from_dict(B5, {p2: Fraction(1, 2)})
        assert not lifted_pic_class(omega, 2).is_trivial()

    def test_zero_trivial(self):
        omega = FracDivisorModZ.zero(B5)
        assert lifted_pic_class(omega, 2).is_trivial()

    def test_denominator_violation(self):
        omega = FracDivisorModZ.from_dict(B5, {p2: Fraction(1, 3)})
        with pytest.raises(InvalidInputError):
            lifted_pic_class(omega, 2)

    def test_canonical_lift(self):
        omega = FracDivisorModZ.from_dict(B5, {p2: Fraction(1, 2)})
        M = canonical_lift(omega, 2)
        assert M.coefficient(p2) == 1
        omega0 = FracDivisorModZ.zero(B5)
        assert canonical_lift(omega0, 2).coefficients == ()
        base = BZ5
        om = FracDivisorModZ.from_dict(base, {P5: Fraction(3, 4)})
        assert canonical_lift(om, 4).coefficient(P5) == 3

    def test_kernel_lifts_are_nth_powers(self):
        base = MarkedBase(R5, (p2, p3))
        for n in (2, 3):
            for omega in obstruction_kernel(base, n):
                obst = lifted_pic_class(omega, n)
                wit = obst.witness()
                assert wit is not None


class TestTorsorGroups:
    def test_fppf_over_z(self):
        assert torsor_group_fppf(ZZ, (), 2).order == 2
        assert torsor_group_fppf(ZZ, (P5,), 2).order == 4

    def test_fppf_r5(self):
        assert torsor_group_fppf(R5, (), 2).order == 4

    def test_log_group_z5(self):
        g = torsor_group_log(BZ5, 2)
        assert g.order == 4 and g.fppf_order == 2 and g.kernel_order == 2

    def test_log_group_empty_marked(self):
        g = torsor_group_log(MarkedBase(ZZ, ()), 3)
        assert g.order == torsor_group_fppf(ZZ, (), 3).order == 1

    def test_log_group_r5_p2(self):
        g = torsor_group_log(B5, 2)
        # obstruction kernel is {0}: the only candidate 1/2*p2 maps to [p2]
        assert g.kernel_order == 1
        assert g.order == 4

    def test_two_presentations_across_grid(self):
        for base, n in [
            (MarkedBase(R5, (p2, p3)), 6),
            (MarkedBase(RI, (primes_above(RI, 2)[0],)), 4),
            (MarkedBase(ZZ, (P5, P7)), 3),
        ]:
            g = torsor_group_log(base, n)
            assert g.order == g.punctured_order


class TestDivisorParsing:
    def test_example_literal(self):
        d = parse_divisor(B5, "1/2*(2,1+w)")
        assert d.coefficient(p2) == Fraction(1, 2)

    def test_sum_literal(self):
        base = MarkedBase(ZZ, (P5,))
        d = parse_divisor(base, "1/2*(5) + 3*(7)")
        assert d.coefficient(P5) == Fraction(1, 2)
        assert d.coefficient(P7) == 3

    def test_signs(self):
        base = MarkedBase(ZZ, (P5,))
        d = parse_divisor(base, "-(5) + 2*(5)")
        assert d.coefficient(P5) == 1

    def test_empty(self):
        assert parse_divisor(BZ5, "").coefficients == ()
