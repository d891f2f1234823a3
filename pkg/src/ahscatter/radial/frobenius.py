"""Frobenius series at the two singular endpoints of the mode equation.

Both endpoints are handled by one recursion for

    A(z) z^2 u'' + B(z) z u' + C(z) u = 0,   A, B, C polynomials,

with u = z^rho sum_m a_m z^m, a_0 = 1:

    a_m phi_0(m + rho) = -sum_{i>=1} phi_i(m - i + rho) a_{m-i},
    phi_i(mu) = A_i mu (mu - 1) + B_i mu + C_i.

All arithmetic is elementwise numpy, so the same code runs on complex128
batches of spectral parameters and on object arrays of mpmath numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from ..errors import IndicialCollision
from .profile import RadialProfile

DEFAULT_LATTICE_GUARD = 1e-3


@dataclass
class SeriesValue:
    """u = z^rho S0 and z du/dz = z^rho S1 at one point, plus diagnostics."""

    S0: np.ndarray
    S1: np.ndarray
    max_term: np.ndarray   # largest |a_m z^m|, for cancellation estimates
    terms: int
    coeffs: list


def _poly_list(c) -> list:
    return [float(x) for x in c]


def series_at(A, B, C, rho, z, *, tol=1e-18, min_terms=8, max_terms=2000, guard=None):
    """Sum the Frobenius series at the point z (|z| inside the radius of convergence).

    ``C`` entries may be arrays (they carry the spectral parameter).  When
    ``guard`` is set, IndicialCollision is raised if some |phi_0(m+rho)|/|A_0|
    falls below it.
    """
    deg = max(len(A), len(B), len(C)) - 1
    A = list(A) + [0] * (deg + 1 - len(A))
    B = list(B) + [0] * (deg + 1 - len(B))
    C = list(C) + [0] * (deg + 1 - len(C))
    one = rho * 0 + 1
    a = [one]
    S0 = one
    S1 = rho * one
    zm = z * one
    max_term = np.abs(one)
    small_run = 0
    m = 0
    while True:
        m += 1
        num = 0 * one
        for i in range(1, min(m, deg) + 1):
            mu = m - i + rho
            num = num + (mu * (mu - 1) * A[i] + mu * B[i] + C[i]) * a[m - i]
        mu = m + rho
        den = mu * (mu - 1) * A[0] + mu * B[0] + C[0]
        if guard is not None:
            scale = abs(A[0])
            if np.any(np.abs(den) <= guard * scale):
                raise IndicialCollision(
                    f"|phi_0(m+rho)| = {float(np.min(np.abs(den))):.3g} at m={m}: "
                    "spectral parameter within the lattice guard band")
        with np.errstate(divide="ignore", invalid="ignore"):
            am = -num / den
        if not isinstance(am, np.ndarray) or am.dtype != object:
            # an exactly vanishing numerator (parity) stays zero on the lattice
            am = np.where(num == 0, np.zeros_like(am), am)
        a.append(am)
        term = am * zm
        S0 = S0 + term
        S1 = S1 + mu * term
        zm = zm * z
        mag = np.abs(term)
        max_term = np.maximum(max_term, mag)
        if m >= min_terms and np.all(mag <= tol * np.abs(S0)) and np.all(
                np.abs(mu * term) <= tol * (np.abs(S1) + np.abs(S0))):
            small_run += 1
            if small_run >= 4:
                break
        else:
            small_run = 0
        if m >= max_terms:
            break
    return SeriesValue(S0, S1, max_term, m, a)


def boundary_polys(profile: RadialProfile, v, s):
    """A, B, C for the x = 0 endpoint (valid on the polynomial branch x <= a)."""
    n = profile.n
    d = profile.boundary_poly()
    A = d
    B = [-(n - 1) * di + 0.5 * n * i * di for i, di in enumerate(d)]
    C = [s * di for di in d]
    C[2] = C[2] - v
    return A, B, C


def center_polys(profile: RadialProfile, v, s):
    """A, B, C in t = 2 - x on the hyperbolic branch x >= b (d = t^2 (4-t)^2 / 16)."""
    n = profile.n
    two_t = [2.0, -1.0]
    four_t = [4.0, -1.0]
    t = [0.0, 1.0]
    q24 = P.polymul(two_t, four_t)
    A = P.polymul(q24, q24)
    inner = P.polyadd(P.polyadd((n - 1) * P.polymul(t, four_t), n * q24),
                      -n * P.polymul(t, two_t))
    B = P.polymul(q24, inner)
    v_part = -16.0 * P.polymul(two_t, two_t)
    s_part = P.polymul(P.polymul(t, t), P.polymul(four_t, four_t))
    deg = max(len(v_part), len(s_part))
    vp = list(v_part) + [0.0] * (deg - len(v_part))
    sp = list(s_part) + [0.0] * (deg - len(s_part))
    C = [v * a + s * b for a, b in zip(vp, sp)]
    return _poly_list(A), _poly_list(B), C


def frobenius_boundary(profile: RadialProfile, v, s, sigma, x, *, guard=DEFAULT_LATTICE_GUARD,
                       tol=1e-18, max_terms=2000):
    """Branch x^sigma (1 + a_1 x + ...) at the conformal boundary, evaluated at x.

    Returns (u, du/dx, SeriesValue).  Recursion denominators are -m(n - 2 sigma - m).
    """
    A, B, C = boundary_polys(profile, v, s)
    sv = series_at(A, B, C, sigma, x, tol=tol, max_terms=max_terms, guard=guard)
    xs = x ** sigma
    return xs * sv.S0, xs * sv.S1 / x, sv


def frobenius_center(profile: RadialProfile, v, s, l: int, t, *, tol=1e-18, max_terms=4000):
    """Center-regular solution (t/t)^l-normalised: returns (u, du/dt, SeriesValue) at t.

    The indicial roots at t = 0 are l and -(l + n - 1); the regular branch
    t^l (1 + ...) is returned divided by t^l so that magnitudes stay O(1).
    """
    A, B, C = center_polys(profile, v, s)
    sv = series_at(A, B, C, l + 0 * s, t, tol=tol, max_terms=max_terms)
    return sv.S0, sv.S1 / t, sv


def center_indicial_roots(n: int, l: int):
    """Roots of 64 (rho^2 + (n-1) rho - l(l+n-1)) = 0."""
    return np.sort(np.roots([1.0, n - 1.0, -l * (l + n - 1.0)]).real)[::-1]
