from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from blowtower.errors import MathError
from blowtower.exact import (
    UniPoly,
    as_rational,
    binomial,
    classify_real_roots,
    count_real_roots,
    format_rational,
    poly_gcd,
    resultant,
    square_free_decomposition,
    sturm_count,
    symmetric_function,
)

small = st.fractions(min_value=-6, max_value=6, max_denominator=4)
polys = st.lists(st.integers(-5, 5), min_size=1, max_size=5).map(UniPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero())


def P(*coeffs):
    return UniPoly(coeffs)


class TestRational:
    def test_parsing_and_formatting(self):
        assert as_rational("6/4") == F(3, 2)
        assert format_rational(F(-3, 2)) == "-3/2"
        assert format_rational(F(4)) == "4"

    def test_rejects_bool_and_float(self):
        with pytest.raises(TypeError):
            as_rational(True)
        with pytest.raises(TypeError):
            as_rational(0.5)


class TestUniPoly:
    def test_trailing_zeros_stripped(self):
        assert P(1, 2, 0, 0).coeffs == (1, 2)
        assert P(0, 0).coeffs == ()
        assert P().degree == -1

    def test_arithmetic(self):
        f = P(1, 1)
        assert f * f == P(1, 2, 1)
        assert (f ** 3)(F(1)) == 8
        q, r = divmod(P(6, 4, 1), P(4, 1))
        assert q == P(0, 1) and r == P(6)

    def test_pretty(self):
        assert P(6, 4, 1).pretty("b") == "b^2 + 4*b + 6"


class TestResultant:
    def test_examples(self):
        assert resultant(P(6, 4, 1), P(4, 1)) == 6
        assert resultant(P(1, 1), P(1, 1)) == 0
        assert resultant(P(-1, 1), P(1, 1)) == 2

    def test_both_zero_is_undefined(self):
        with pytest.raises(MathError, match="undefined resultant"):
            resultant(P(), P())

    def test_constant_against_anything(self):
        assert resultant(P(1), P()) == 1
        assert resultant(P(2), P(0, 0, 1)) == 4

    @settings(max_examples=200, deadline=None)
    @given(nonzero_polys, nonzero_polys)
    def test_zero_iff_common_factor(self, f, g):
        assert (resultant(f, g) == 0) == (poly_gcd(f, g).degree >= 1)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(small, min_size=1, max_size=3), st.lists(small, min_size=1, max_size=3))
    def test_product_formula(self, roots_f, roots_g):
        f, g = UniPoly.from_roots(roots_f), UniPoly.from_roots(roots_g)
        expected = F(1)
        for a in roots_f:
            for b in roots_g:
                expected *= a - b
        assert resultant(f, g) == expected


class TestRootClassification:
    def test_irrational_pair(self):
        rep = classify_real_roots(P(-2, 0, 1))
        assert rep.rational_roots == () and rep.irrational_real_root_count == 2

    def test_repeated_rational_root(self):
        rep = classify_real_roots(P(3, 6, 3))
        assert rep.rational_roots == ((F(-1), 2),) and rep.irrational_real_root_count == 0

    def test_no_real_roots(self):
        rep = classify_real_roots(P(7, 9, 3))
        assert rep.rational_roots == () and rep.irrational_real_root_count == 0
        assert not rep.has_real_roots

    def test_zero_root_and_mixed(self):
        # b^2 (b - 1/2) (b^2 - 3)
        f = P(0, 0, 1) * P(F(-1, 2), 1) * P(-3, 0, 1)
        rep = classify_real_roots(f)
        assert rep.rational_roots == ((F(0), 2), (F(1, 2), 1))
        assert rep.irrational_real_root_count == 2

    def test_zero_polynomial(self):
        with pytest.raises(MathError, match="identically zero"):
            classify_real_roots(P())

    @settings(max_examples=150, deadline=None)
    @given(st.lists(small, max_size=4), st.lists(st.integers(-4, 4), max_size=3), st.integers(1, 3))
    def test_counts_add_up(self, rational, extra, lead):
        f = UniPoly.from_roots(rational) * (UniPoly(extra) if UniPoly(extra).degree >= 0 else P(1)) * lead
        rep = classify_real_roots(f)
        for root, mult in rep.rational_roots:
            assert f(root) == 0
        with_mult = sum(m for _, m in rep.rational_roots) + rep.irrational_real_root_count
        distinct = len(rep.rational_roots) + rep.irrational_real_root_count
        assert distinct == sturm_count(f)
        # irrational roots are conjugate-closed and usually simple; bound by the multiplicity count
        assert with_mult <= count_real_roots(f, multiplicity=True)

    @settings(max_examples=100, deadline=None)
    @given(nonzero_polys, small.filter(lambda x: x != 0))
    def test_scaling_invariance(self, f, c):
        assert classify_real_roots(f) == classify_real_roots(f.scale(c))


class TestSquareFree:
    @settings(max_examples=100, deadline=None)
    @given(nonzero_polys)
    def test_decomposition_reassembles(self, f):
        if f.degree < 1:
            return
        prod = P(1)
        for a, i in square_free_decomposition(f):
            prod = prod * a ** i
        assert prod.monic() == f.monic()

    def test_sturm_known(self):
        assert sturm_count(UniPoly.from_roots([1, 2, 2, 3])) == 3
        assert count_real_roots(UniPoly.from_roots([1, 2, 2, 3]), multiplicity=True) == 4


class TestCombinatorics:
    def test_symmetric_functions(self):
        assert symmetric_function(1, [1, 2]) == 3
        assert symmetric_function(2, [1, 2]) == 2
        assert [symmetric_function(j, [1, 0, 0]) for j in (1, 2, 3)] == [1, 0, 0]
        assert symmetric_function(0, [5, 7]) == 1

    def test_binomial(self):
        assert binomial(4, 2) == 6
        with pytest.raises(MathError):
            binomial(3, 4)

    def test_symmetric_out_of_range(self):
        with pytest.raises(MathError):
            symmetric_function(3, [1, 2])
