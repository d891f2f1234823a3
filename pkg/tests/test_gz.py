import math
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ahscatter.errors import NotEvenEnough
from ahscatter.gz import (
    WarpedMetricJet,
    apply_D_lambda,
    evenness_order,
    gz_solve,
    lambda_l,
    scattering_residues,
)
from ahscatter.ring import XSeries, laurent_coeff
from oracles import L, gz_coefficients, lam, op_to_sympy

small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def jet(n, w, M=None):
    return WarpedMetricJet.from_coeffs(n, w, M)


@pytest.mark.parametrize("n,w", [
    (2, [1, 0, "-1/2", 0, "1/16"]),
    (2, [1, 1]),
    (3, [1, "1/3", "-2", "1/5", 0]),
    (1, [1, 0, 1, 1]),
])
def test_coefficients_match_direct_laplacian_expansion(n, w):
    M = 4
    sol = gz_solve(jet(n, w + [0] * (M + 1 - len(w)), M))
    ref = gz_coefficients(n, [Fraction(c) for c in w], M)
    for j in range(1, M + 1):
        assert sp.simplify(op_to_sympy(sol.p[j]) - ref[j]) == 0, j


def test_first_step_for_even_metric():
    # p_2 = -(L - n(n-lam) w_2) / (2 (2 lam - n - 2))
    for n in (1, 2, 3):
        w2 = Fraction(-1, 2)
        p2 = op_to_sympy(gz_solve(jet(n, [1, 0, w2], 2)).p[2])
        expect = -(L - n * (n - lam) * sp.Rational(-1, 2)) / (2 * (2 * lam - n - 2))
        assert sp.simplify(p2 - expect) == 0


def test_odd_first_step_example():
    # w = 1 + x, n = 2: p_1 = (2 - lam) / (2 (lam - 3/2))
    p1 = op_to_sympy(gz_solve(jet(2, [1, 1], 1)).p[1])
    assert sp.simplify(p1 - (2 - lam) / (2 * (lam - sp.Rational(3, 2)))) == 0


@given(st.integers(1, 4), st.lists(small, min_size=4, max_size=6))
@settings(max_examples=15, deadline=None)
def test_solution_annihilated_to_truncation_order(n, tail):
    m = jet(n, [1] + tail)
    sol = gz_solve(m)
    R = apply_D_lambda(sol.F, m)
    assert all(R[j].is_zero() for j in range(m.M + 1))


@given(st.integers(1, 4), st.lists(small, min_size=5, max_size=7))
@settings(max_examples=15, deadline=None)
def test_degree_bound_and_pole_locations(n, tail):
    sol = gz_solve(jet(n, [1] + tail))
    allowed = sp.Integer(1)
    for j in range(1, len(sol.p)):
        allowed *= (2 * lam - n - j)
        assert sol.p[j].degree <= j // 2
        for c in sol.p[j].coeffs:
            den = sum(sp.Rational(a.numerator, a.denominator) * lam**i for i, a in enumerate(c.den))
            assert sp.rem(sp.Poly(allowed, lam), sp.Poly(den, lam)).is_zero


def test_evenness_order_examples():
    assert evenness_order(XSeries([Fraction(c) for c in (1, 0, Fraction(-1, 2), 0, Fraction(1, 16))],
                                  10, zero=Fraction(0))) == math.inf
    assert evenness_order(XSeries([Fraction(c) for c in (1, 0, 0, 1)])) == 1
    assert evenness_order(XSeries([Fraction(1), Fraction(1)])) == 0


def test_evenness_kills_low_odd_terms():
    rng = random.Random(4)
    for k in (1, 2):
        w = [Fraction(1)] + [Fraction(0) if j % 2 and j < 2 * k + 1 else Fraction(rng.randint(-4, 4), 3)
                             for j in range(1, 2 * k + 4)]
        sol = gz_solve(jet(3, w))
        for l in range(k):
            assert sol.p[2 * l + 1].is_zero()


@pytest.mark.parametrize("n,k", [(2, 0), (2, 1), (3, 0), (3, 2), (4, 1)])
def test_residue_formulas(n, k):
    c = Fraction(3, 7)
    w = [Fraction(1)] + [Fraction(0)] * (2 * k + 3)
    w[2] = Fraction(-1, 2)
    w[2 * k + 1] += c
    rep = scattering_residues(jet(n, w), k)
    lk = lambda_l(n, k)
    entry = rep.entries[k]
    assert entry.residue == [n * c * (n - lk) / 4]
    L_coeff = laurent_coeff(gz_solve(jet(n, w)).p[2 * k + 3].coeff(1), lambda_l(n, k + 1), 1)
    assert L_coeff == -c * (n * (n - lk) - 2) / (4 * (2 * k + 3))
    assert rep.checks["p_2k+1_matches"] and rep.checks["p_2k+3_L_matches"]


def test_symbol_vanishing_case():
    # n(n - lam_k) = n(n-1)/2 - n k, which equals 2 for n = 4, k = 1
    w = [Fraction(1), 0, 0, Fraction(2), 0, 0]
    rep = scattering_residues(jet(4, w), 1)
    assert rep.checks["symbol_vanishes"] and rep.checks["vanishing_condition_holds"]


def test_not_even_enough():
    with pytest.raises(NotEvenEnough):
        scattering_residues(jet(2, [1, 1, 0, 0, 0, 0]), 1)


def test_report_marks_eigenprojection_unknown():
    rep = scattering_residues(jet(2, [1, 0, 0, 1, 0, 0]), 1).to_json()
    assert {r["eigenprojection"] for r in rep["residues"]} == {"not computed"}
    assert [r["lambda_l"] for r in rep["residues"]] == ["3/2", "5/2", "7/2"]


def test_metric_must_start_at_one():
    with pytest.raises(ValueError):
        jet(2, [2, 0, 1])
