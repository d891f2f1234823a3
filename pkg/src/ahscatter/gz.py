"""Formal boundary solution of (Delta_g - lam(n-lam)) x^(n-lam) F = O(x^inf).

The metric is the warped collar g = x^-2 (dx^2 + w(x) h0).  With that
restriction every boundary operator is a polynomial in the boundary
Laplacian L = Delta_{h0}, so the whole recursion runs in exact arithmetic
over rational functions of lam.  The odd-order Taylor coefficients of F
carry the residues of the scattering operator at lam_l = (n+1)/2 + l.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NotEvenEnough
from .ring import (
    BoundaryOp,
    RatFunc,
    XSeries,
    _pshift,
    laurent_coeff,
    parse_rational,
    series_reciprocal,
)

LAM = RatFunc.lam()


@dataclass(frozen=True)
class WarpedMetricJet:
    """Taylor jet of w in h(x) = w(x) h0, known modulo O(x^(M+1))."""

    n: int
    w: XSeries

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("boundary dimension n must be >= 1")
        if self.w.order < 0 or self.w[0] != 1:
            raise ValueError("w(0) must equal 1 (h(0) = h0)")

    @classmethod
    def from_coeffs(cls, n: int, coeffs: Sequence, M: int | None = None) -> "WarpedMetricJet":
        cs = [parse_rational(c) for c in coeffs]
        return cls(n, XSeries(cs, len(cs) - 1 if M is None else M, zero=Fraction(0)))

    @property
    def M(self) -> int:
        return self.w.order

    def trace_coefficient(self, j: int) -> Fraction:
        """Tr(h0^-1 h_j) = n w_j."""
        return self.n * self.w[j]


@dataclass(frozen=True)
class GZSolution:
    metric: WarpedMetricJet
    p: tuple  # p[j] = p_{j,lam} as BoundaryOp, p[0] = identity
    F: XSeries = field(repr=False)

    @property
    def M(self) -> int:
        return len(self.p) - 1


def trace_term(m: WarpedMetricJet) -> XSeries:
    """Tr(h^-1(x) dh/dx) = n w'/w, known to order M-1."""
    w = m.w
    return (w.derivative() * series_reciprocal(w).truncate(w.order - 1)) * m.n


def apply_D_lambda(F: XSeries, m: WarpedMetricJet) -> XSeries:
    """Conjugated operator x^(lam-n) (Delta_g - lam(n-lam)) x^(n-lam) applied to F.

    F has BoundaryOp coefficients (each F_j acting on the boundary datum f0).
    Implemented as composition of series operations, independently of the
    coefficient formula used inside :func:`gz_solve`.
    """
    n = m.n
    M = min(F.order, m.M)
    F = F.truncate(M)
    T = trace_term(m)                      # order M-1
    xT = T.shift(1)                        # order M
    inv_w = series_reciprocal(m.w.truncate(M))
    Fp = F.derivative()
    xFp = Fp.shift(1)                      # x F'
    x2Fpp = Fp.derivative().shift(2)       # x^2 F''
    LF = F.map(lambda c: BoundaryOp.L() * c)

    out = -x2Fpp
    out = out + xFp * (2 * LAM - n - 1)
    out = out - (xT * xFp) * Fraction(1, 2)
    out = out - (xT * F) * ((n - LAM) / 2)
    out = out + (inv_w * LF).shift(2)
    return out.truncate(M)


def _D_coefficient(coeffs: list, j: int, T: XSeries, inv_w: XSeries, n: int) -> BoundaryOp:
    """Coefficient of x^j in D_lam(sum_b coeffs[b] x^b), using coeffs[b] for b < j only.

    x^j coefficient = j(2lam-n-j) F_j - 1/2 sum_{a+b=j-1} T_a (b+n-lam) F_b
                      + sum_{a+b=j-2} (1/w)_a L F_b
    The F_j term is omitted: it is exactly what the recursion solves for.
    """
    acc = BoundaryOp()
    for b in range(j):
        Tb = T[j - 1 - b]
        if Tb and not coeffs[b].is_zero():
            acc = acc - coeffs[b] * ((b + n - LAM) * (Tb / 2))
    for b in range(j - 1):
        wa = inv_w[j - 2 - b]
        if wa and not coeffs[b].is_zero():
            acc = acc + (BoundaryOp.L() * coeffs[b]) * wa
    return acc


def gz_solve(m: WarpedMetricJet, M: int | None = None) -> GZSolution:
    """All p_{j,lam}, j <= M, with f_j = p_{j,lam} f0.

    f_j = -[x^j] D_lam(F_{j-1}) / (j (2 lam - n - j)), kept symbolic in lam.
    """
    M = m.M if M is None else min(M, m.M)
    if M < 1:
        raise ValueError("need truncation order M >= 1")
    n = m.n
    T = trace_term(m)
    inv_w = series_reciprocal(m.w)
    max_deg = math.ceil(M / 2)
    p = [BoundaryOp.identity()]
    for j in range(1, M + 1):
        rhs = _D_coefficient(p, j, T, inv_w, n)
        fj = rhs * (-1 / (j * (2 * LAM - n - j)))
        if fj.degree > max_deg:
            raise AssertionError(f"p_{j} has L-degree {fj.degree} > bound {max_deg}")
        p.append(fj)
    F = XSeries(p, M, zero=BoundaryOp())
    return GZSolution(m, tuple(p), F)


def evenness_order(w: XSeries):
    """Largest k with w even modulo O(x^(2k+1)); ``math.inf`` if no odd term up to M.

    w even mod O(x^(2k+1)) means w_1 = w_3 = ... = w_(2k-1) = 0.
    """
    for i in range(1, w.order + 1, 2):
        if w[i] != 0:
            return (i - 1) // 2
    return math.inf


def lambda_l(n: int, l: int) -> Fraction:
    return Fraction(n + 1, 2) + l


@dataclass
class ResidueEntry:
    l: int
    lambda_l: Fraction
    residue: list          # Res_{lambda_l} p_{2l+1,lam}, coefficients by power of L
    pole_order: int


@dataclass
class ResidueReport:
    n: int
    k: int
    K: Fraction            # Tr(h0^-1 h_{2k+1}) = n w_{2k+1}
    entries: list
    checks: dict

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "K": str(self.K),
            "residues": [
                {
                    "l": e.l,
                    "lambda_l": str(e.lambda_l),
                    "op_coefficients": [str(c) for c in e.residue],
                    "differential_part": [str(-c) for c in e.residue],
                    "eigenprojection": "not computed",
                    "pole_order": e.pole_order,
                }
                for e in self.entries
            ],
            "checks": self.checks,
        }


def _pole_order(f: RatFunc, lam0: Fraction) -> int:
    shifted = _pshift(f.den, lam0)
    q = 0
    while q < len(shifted) and shifted[q] == 0:
        q += 1
    return q


def scattering_residues(m: WarpedMetricJet, k: int, sol: GZSolution | None = None) -> ResidueReport:
    """Exact residues p_{2l+1} = Res_{lam_l} p_{2l+1,lam}, l = 0..k+1.

    Res_{lam_l} S(lam) = Pi_{lam_l} - p_{2l+1}; only the differential part
    -p_{2l+1} is computed here.
    """
    if evenness_order(m.w) < k:
        raise NotEvenEnough(f"w is only even modulo O(x^{2 * evenness_order(m.w) + 1}), need k={k}")
    if 2 * k + 3 > m.M:
        raise ValueError(f"need M >= 2k+3 = {2 * k + 3}, have M = {m.M}")
    sol = sol or gz_solve(m, 2 * k + 3)
    n = m.n
    entries = []
    for l in range(k + 2):
        lam_l = lambda_l(n, l)
        op = sol.p[2 * l + 1]
        res = [laurent_coeff(c, lam_l, 1) for c in op.coeffs]
        while res and res[-1] == 0:
            res.pop()
        order = max((_pole_order(c, lam_l) for c in op.coeffs), default=0)
        entries.append(ResidueEntry(l, lam_l, res, order))

    c = m.w[2 * k + 1]
    K = n * c
    lam_k = lambda_l(n, k)
    predicted_pk = (n - lam_k) / 4 * K
    predicted_L = -c * (n * (n - lam_k) - 2) / (4 * (2 * k + 3))
    ek, ek1 = entries[k], entries[k + 1]
    got_pk = ek.residue
    got_L = ek1.residue[1] if len(ek1.residue) > 1 else Fraction(0)
    checks = {
        "lower_odd_vanish": all(sol.p[2 * l + 1].is_zero() for l in range(k)),
        "p_2k+1_scalar": len(got_pk) <= 1,
        "p_2k+1": str(got_pk[0] if got_pk else Fraction(0)),
        "p_2k+1_predicted": str(predicted_pk),
        "p_2k+1_matches": (got_pk[0] if got_pk else Fraction(0)) == predicted_pk and len(got_pk) <= 1,
        "p_2k+3_L_coefficient": str(got_L),
        "p_2k+3_L_predicted": str(predicted_L),
        "p_2k+3_L_matches": got_L == predicted_L,
        "symbol_vanishes": got_L == 0,
        "vanishing_condition_holds": n * (n - lam_k) == 2 or K == 0,
        "sigma0_convention": "sigma0(L)(xi) = |xi|^2_{h0^-1}",
    }
    return ResidueReport(n, k, K, entries, checks)
