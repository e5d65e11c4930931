"""Support machinery: exact linear algebra, Q/Z values, group structure,
curve function fields."""

import random
from fractions import Fraction

import pytest

from logflat.abgroup import invariant_factors_from_orders, structure_from_table
from logflat.curves import parse_curve
from logflat.funcfield import (
    CurveFunction,
    eval_at_difference,
    miller_function,
    pdivmod,
    pgcd,
    pmul,
)
from logflat.linalg import (
    hnf_row_lattice,
    identity,
    kernel_basis,
    mat_mul,
    smith_normal_form,
    solve_rational,
)
from logflat.qmodz import QmodZ
from logflat.reduction import reduction_component, tate_algorithm
from logflat.rings import ZZ, PrimeIdeal


class TestQmodZ:
    def test_normalization(self):
        assert QmodZ.of(7, 2) == QmodZ.of(1, 2)
        assert QmodZ.of(-1, 3) == QmodZ.of(2, 3)

    def test_arithmetic(self):
        assert QmodZ.of(1, 2) + QmodZ.of(1, 2) == QmodZ.of(0)
        assert (QmodZ.of(1, 3) * 5) == QmodZ.of(2, 3)
        assert (-QmodZ.of(1, 4)) == QmodZ.of(3, 4)

    def test_order(self):
        assert QmodZ.of(2, 6).order == 3
        assert QmodZ.of(0).order == 1


class TestSmithNormalForm:
    def test_known(self):
        d, u, v = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        assert [d[i][i] for i in range(3)] == [2, 2, 156]

    def test_transforms_exact(self):
        rng = random.Random(5)
        for _ in range(30):
            rows = rng.randint(1, 4)
            cols = rng.randint(1, 4)
            m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
            d, u, v = smith_normal_form(m)
            assert mat_mul(mat_mul(u, m), v) == d
            for i in range(min(rows, cols) - 1):
                if d[i + 1][i + 1] != 0:
                    assert d[i + 1][i + 1] % max(d[i][i], 1) == 0

    def test_kernel(self):
        kb = kernel_basis([[1, 1, 1, 1]])
        assert len(kb) == 3
        for v in kb:
            assert sum(v) == 0

    def test_solver(self):
        x = solve_rational([[2, 1], [1, 1]], [3, 2])
        assert x == [Fraction(1), Fraction(1)]
        assert solve_rational([[1, 1], [1, 1]], [0, 1]) is None

    def test_hnf(self):
        rows = hnf_row_lattice([(2, 0), (0, 2), (1, 1)])
        # index-2 sublattice of Z^2 containing (1,1)
        det = rows[0][0] * rows[1][1]
        assert det == 2


class TestAbGroup:
    def test_invariants_from_orders(self):
        # Z/2 x Z/4: orders multiset
        orders = []
        for a in range(2):
            for b in range(4):
                from math import lcm

                orders.append(lcm(a and 2 or 1, [1, 4, 2, 4][b]))
        assert invariant_factors_from_orders(orders) == [2, 4]

    def test_structure_cyclic(self):
        n = 6
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        factors, gens, dlog = structure_from_table(table)
        assert factors == [6]
        assert len(dlog) == 6

    def test_structure_klein(self):
        elems = [(0, 0), (0, 1), (1, 0), (1, 1)]
        idx = {e: i for i, e in enumerate(elems)}
        table = [
            [idx[((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)] for b in elems]
            for a in elems
        ]
        factors, gens, dlog = structure_from_table(table)
        assert factors == [2, 2]


class TestPolynomials:
    def test_divmod(self):
        # (x^2 - 1) / (x - 1) = x + 1
        q, r = pdivmod(
            (Fraction(-1), Fraction(0), Fraction(1)), (Fraction(-1), Fraction(1))
        )
        assert q == (Fraction(1), Fraction(1)) and r == ()

    def test_gcd(self):
        a = pmul((Fraction(1), Fraction(1)), (Fraction(2), Fraction(1)))
        b = pmul((Fraction(1), Fraction(1)), (Fraction(3), Fraction(1)))
        assert pgcd(a, b) == (Fraction(1), Fraction(1))


class TestCurveFunctions:
    def setup_method(self):
        self.E = parse_curve(ZZ, "[0,-1,1,-10,-20]")
        self.P = self.E.point(5, 5)

    def test_vertical_divisor(self):
        v = CurveFunction.vertical(self.E, self.P)
        assert v.ord_at(self.P) == 1
        assert v.ord_at(-self.P) == 1
        assert v.ord_at(self.E.infinity()) == -2

    def test_line_divisor(self):
        # on this curve -(P + 2P) = 2P, so the chord is tangent at 2P
        Q = 2 * self.P
        l = CurveFunction.line(self.E, self.P, Q)
        assert l.ord_at(self.P) == 1
        assert l.ord_at(Q) == 2
        assert l.ord_at(self.E.infinity()) == -3

    def test_inverse_and_product(self):
        f = CurveFunction.line(self.E, self.P, self.P)
        g = f * f.inverse()
        Q = 3 * self.P
        assert g.value_at(Q) == 1

    def test_local_expansion_resolves_cancellation(self):
        # multiply and divide by a vertical through the evaluation point:
        # the stored fraction degenerates there but the value survives
        f = miller_function(self.E, self.P, 5)
        v = CurveFunction.vertical(self.E, 2 * self.P)
        g = (f * v) * v.inverse()
        a, b = 3 * self.P, 2 * self.P
        assert eval_at_difference(g, a, b) == eval_at_difference(f, a, b)


class TestNonsplitMultiplicative:
    def test_nonsplit_i2(self):
        # y^2 + xy - y = x^3: tangent cone at the node over F_2 is
        # irreducible, so I2 nonsplit with Tamagawa 2
        E = parse_curve(ZZ, "[1,0,-1,0,0]")
        rd = tate_algorithm(E, PrimeIdeal(ZZ, 2))
        assert rd.kodaira.symbol == "I2"
        assert rd.kodaira.split is False
        assert rd.tamagawa == 2
        assert rd.component_group.order == 2

    def test_nonsplit_point_on_middle(self):
        E = parse_curve(ZZ, "[1,0,-1,0,0]")
        rd = tate_algorithm(E, PrimeIdeal(ZZ, 2))
        g = reduction_component(rd, E.point(1, 1))
        assert rd.component_group.element_order(g) == 2
        assert reduction_component(rd, E.point(0, 0)) == 0
