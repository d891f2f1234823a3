from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ahscatter.errors import NonInvertibleLeadingTerm, ZeroDenominator
from ahscatter.ring import (
    BoundaryOp,
    RatFunc,
    XSeries,
    has_pole_at,
    laurent_coeff,
    normalize_ratfunc,
    parse_rational,
    series_reciprocal,
)
from oracles import lam, to_sympy

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
polys = st.lists(fractions, min_size=0, max_size=4)
nonzero_polys = st.lists(fractions, min_size=1, max_size=4).filter(lambda p: any(p))


def rf(num, den):
    return RatFunc(num, den)


@given(polys, nonzero_polys, polys, nonzero_polys)
@settings(max_examples=60, deadline=None)
def test_field_operations_agree_with_sympy(n1, d1, n2, d2):
    f, g = rf(n1, d1), rf(n2, d2)
    F, G = to_sympy(f), to_sympy(g)
    assert sp.simplify(to_sympy(f + g) - (F + G)) == 0
    assert sp.simplify(to_sympy(f * g) - F * G) == 0
    assert sp.simplify(to_sympy(f - g) - (F - G)) == 0
    if not g.is_zero():
        assert sp.simplify(to_sympy(f / g) - F / G) == 0


@given(polys, nonzero_polys)
@settings(max_examples=60, deadline=None)
def test_canonical_form_is_reduced_and_monic(num, den):
    f = rf(num, den)
    assert f.den[-1] == 1
    P = sum(c * lam**i for i, c in enumerate(f.num))
    Q = sum(c * lam**i for i, c in enumerate(f.den))
    assert sp.degree(sp.gcd(sp.Poly(P, lam), sp.Poly(Q, lam))) <= 0 or not f.num


@given(polys, nonzero_polys, nonzero_polys)
@settings(max_examples=40, deadline=None)
def test_equality_ignores_common_factors(num, den, extra):
    f = rf(num, den)
    g = RatFunc(f.num, f.den) * RatFunc(extra, extra)
    assert f == g and hash(f) == hash(g)


def test_normalize_cancels_common_root():
    # (lam^2 - 1)/(2 lam - 2) = (lam + 1)/2
    f = normalize_ratfunc([-1, 0, 1], [-2, 2])
    assert f == RatFunc([Fraction(1, 2), Fraction(1, 2)], [1])
    assert f.den == (Fraction(1),)


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDenominator):
        RatFunc([1], [])
    with pytest.raises(ZeroDenominator):
        RatFunc.lam() / RatFunc.const(0)


@given(st.integers(1, 3), fractions, st.lists(fractions, min_size=1, max_size=3))
@settings(max_examples=25, deadline=None)
def test_laurent_coefficients_match_sympy(q, lam0, extra):
    # f = N(lam) / ((lam - lam0)^q (lam^2 + 1)); coefficient of (lam-lam0)^-j is
    # the (q-j)-th Taylor coefficient of (lam - lam0)^q f at lam0
    f = RatFunc(extra, [1]) / (RatFunc([-lam0, 1]) ** q * RatFunc([1, 0, 1]))
    L0 = sp.Rational(lam0.numerator, lam0.denominator)
    regular = sp.cancel(to_sympy(f) * (lam - L0) ** q)
    for j in range(1, q + 1):
        ref = sp.diff(regular, lam, q - j).subs(lam, L0) / sp.factorial(q - j)
        got = laurent_coeff(f, lam0, j)
        assert isinstance(got, Fraction)
        assert got == Fraction(int(sp.numer(ref)), int(sp.denom(ref)))
    assert laurent_coeff(f, lam0, q + 1) == 0


def test_residue_of_simple_pole():
    # (2 - lam) / (2 (lam - 3/2)) has residue (2 - 3/2)/2 = 1/4 at 3/2
    f = RatFunc([2, -1], [-3, 2])
    assert laurent_coeff(f, Fraction(3, 2), 1) == Fraction(1, 4)
    assert has_pole_at(f, Fraction(3, 2)) and not has_pole_at(f, 2)
    assert laurent_coeff(RatFunc.lam(), 0, 1) == 0


def test_evaluation_at_pole_raises():
    with pytest.raises(ZeroDivisionError):
        RatFunc([1], [-1, 1])(1)


def test_boundary_op_is_commutative_polynomial_ring():
    a = BoundaryOp([1, RatFunc.lam()])
    b = BoundaryOp([RatFunc([0, 0, 1]), 2])
    assert a * b == b * a
    assert (a * b).degree == 2
    assert (a - a).is_zero()
    assert BoundaryOp.L() * BoundaryOp.L() == BoundaryOp([0, 0, 1])


@given(st.lists(fractions, min_size=1, max_size=6).filter(lambda c: c[0] != 0))
@settings(max_examples=40, deadline=None)
def test_series_reciprocal_inverts(coeffs):
    s = XSeries(coeffs, len(coeffs) + 1, zero=Fraction(0))
    prod = s * series_reciprocal(s)
    assert prod[0] == 1 and all(prod[m] == 0 for m in range(1, prod.order + 1))


def test_reciprocal_needs_invertible_constant_term():
    with pytest.raises(NonInvertibleLeadingTerm):
        series_reciprocal(XSeries([Fraction(0), Fraction(1)]))


def test_parse_rational_refuses_floats():
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational(3) == 3
    with pytest.raises(TypeError):
        parse_rational(0.5)
