"""Independent reference computations (sympy) used by the unit tests."""
from __future__ import annotations

from fractions import Fraction

import sympy as sp

lam, L, x, y = sp.symbols("lam L x y")


def to_sympy(f) -> sp.Expr:
    """RatFunc -> sympy rational function of lam."""
    num = sum(sp.Rational(c.numerator, c.denominator) * lam**i for i, c in enumerate(f.num))
    den = sum(sp.Rational(c.numerator, c.denominator) * lam**i for i, c in enumerate(f.den))
    return num / den


def op_to_sympy(op) -> sp.Expr:
    return sum(to_sympy(c) * L**i for i, c in enumerate(op.coeffs))


def gz_coefficients(n: int, w: list, M: int) -> list:
    """f_j (f_0 = 1) from (Delta_g - lam(n-lam)) x^(n-lam) F = O(x^(M+1+n-lam)).

    Delta_g = -x^2 d_x^2 + (n-1) x d_x - (n/2) x^2 (w'/w) d_x + x^2 w^-1 L
    for g = x^-2 (dx^2 + w h0), L = Delta_h0, solved order by order.
    """
    wx = sum(sp.Rational(Fraction(c).numerator, Fraction(c).denominator) * x**i for i, c in enumerate(w))
    f = [sp.Integer(1)]
    for j in range(1, M + 1):
        fj = sp.Symbol("fj")
        F = sum(fi * x**i for i, fi in enumerate(f)) + fj * x**j
        # u = x^(n-lam) F; divide the operator result by x^(n-lam) analytically
        s = n - lam
        dF = sp.diff(F, x)
        d2F = sp.diff(F, x, 2)
        u1 = s * F / x + dF                                      # (x^s F)' / x^s
        u2 = s * (s - 1) * F / x**2 + 2 * s * dF / x + d2F       # (x^s F)'' / x^s
        expr = (-x**2 * u2 + (n - 1) * x * u1 - sp.Rational(n, 2) * x**2 * sp.diff(wx, x) / wx * u1
                + x**2 * L * F / wx - lam * (n - lam) * F)
        coeff = sp.series(sp.expand(expr), x, 0, j + 1).removeO().coeff(x, j)
        sol = sp.solve(sp.Eq(coeff, 0), fj)[0]
        f.append(sp.factor(sp.simplify(sol)))
    return f
