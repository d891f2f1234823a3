"""Connection coefficients A, B and the mode scattering coefficient S = B/A.

The center-regular solution u_reg is written at a match point x0 <= a as

    u_reg = A u_1 + B u_2,   u_1 ~ x^(n-lam),  u_2 ~ x^lam,

so A = W(u_reg, u_2)/W(u_1, u_2) and B = W(u_1, u_reg)/W(u_1, u_2).
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special

from ..errors import AtResonance, IllConditioned
from .frobenius import DEFAULT_LATTICE_GUARD, boundary_polys, frobenius_boundary, frobenius_center
from .ode import gbs_integrate, integrate_double, make_rhs
from .profile import CUT_A, CUT_B, RadialProfile

PRECISION_DPS = {"double": None, "dd": 32, "qd": 64}
PRECISION_EPS = {"double": np.finfo(float).eps, "dd": 1e-32, "qd": 1e-64}
ESCALATION = ("double", "dd", "qd")
CONDITION_LIMIT = 1e-8
DEFAULT_DELTA = 0.5
DEFAULT_RTOL = 3e-14   # DOP853 floor is 100 eps; the subdominant coefficient needs it


@dataclass(frozen=True)
class ModeParams:
    n: int
    l: int
    lam: complex

    @property
    def v(self) -> int:
        return self.l * (self.l + self.n - 1)

    @property
    def s(self) -> complex:
        return self.lam * (self.n - self.lam)

    @property
    def alpha(self) -> float:
        return (1 + self.v) ** -0.5


@dataclass
class ConnectionData:
    lam: complex
    l: int
    A: complex
    B: complex
    S: complex
    wronskian_defect: float
    condition_estimate: float
    precision: str
    x0: float
    S_high: object = field(default=None, repr=False, compare=False)  # mpmath value under dd/qd


def default_match_point(v) -> float:
    """Keeps e^(2 sqrt(v) x0), the growth between the two boundary branches, bounded."""
    return min(CUT_A / 2, 1.5 / math.sqrt(1 + v))


def _cond2(a, b, c, d) -> np.ndarray:
    """2-norm condition number of [[a, b], [c, d]] after column normalisation."""
    n1 = np.sqrt(np.abs(a) ** 2 + np.abs(c) ** 2)
    n2 = np.sqrt(np.abs(b) ** 2 + np.abs(d) ** 2)
    a, c, b, d = a / n1, c / n1, b / n2, d / n2
    fro2 = np.abs(a) ** 2 + np.abs(b) ** 2 + np.abs(c) ** 2 + np.abs(d) ** 2
    det = np.abs(a * d - b * c)
    # sigma_max/sigma_min from trace and determinant of M^H M
    disc = np.sqrt(np.maximum(fro2 * fro2 - 4 * det * det, 0))
    smax2 = (fro2 + disc) / 2
    with np.errstate(divide="ignore"):
        return np.where(det > 0, smax2 / det, np.inf)


class _Lib:
    """Numeric context: complex128 arrays, or mpmath object arrays at a given dps."""

    def __init__(self, precision: str):
        self.precision = precision
        self.dps = PRECISION_DPS[precision]
        self.eps = PRECISION_EPS[precision]

    @property
    def mp(self) -> bool:
        return self.dps is not None

    def array(self, values):
        if self.mp:
            return np.array([mpmath.mpc(complex(z)) for z in np.ravel(values)], dtype=object)
        return np.asarray(values, dtype=complex).ravel()

    def real(self, x):
        return mpmath.mpf(x) if self.mp else float(x)

    def to_complex(self, arr):
        return np.array([complex(z) for z in np.ravel(arr)], dtype=complex)

    def to_float(self, arr):
        return np.array([float(abs(z)) if not isinstance(z, (float, int)) else float(z)
                         for z in np.ravel(arr)], dtype=float)


def _connect(profile: RadialProfile, l: int, lam, x0, delta, rtol, guard, lib: _Lib, diagnostics):
    n = profile.n
    v = l * (l + n - 1)
    lam = lib.array(lam)
    s = lam * (n - lam)
    x0r, t_s = lib.real(x0), lib.real(delta)
    x_s = 2 - t_s
    vr = lib.real(v)
    series_tol = lib.eps * 1e-2

    uc, duc_dt, csv = frobenius_center(profile, vr, s, l, t_s, tol=series_tol)
    start = np.stack([uc, -duc_dt])[None]            # (1, 2, N), d/dx = -d/dt

    if lib.mp:
        tol = lib.eps * 1e3
        rhs = make_rhs(profile, vr, s, "mp")
        end, _ = gbs_integrate(rhs, x_s, x0r, start, tol)
    else:
        end, _ = integrate_double(profile, v, s, float(x_s), float(x0), start, rtol=rtol)
    ur, dur = end[0, 0], end[0, 1]

    u1, du1, sv1 = frobenius_boundary(profile, vr, s, n - lam, x0r, guard=guard, tol=series_tol)
    u2, du2, sv2 = frobenius_boundary(profile, vr, s, lam, x0r, guard=guard, tol=series_tol)
    W12 = u1 * du2 - du1 * u2
    A = (ur * du2 - dur * u2) / W12
    B = (u1 * dur - du1 * ur) / W12

    u1c, du1c = lib.to_complex(u1), lib.to_complex(du1) * float(x0)
    u2c, du2c = lib.to_complex(u2), lib.to_complex(du2) * float(x0)
    kappa = _cond2(u1c, u2c, du1c, du2c)
    cancel = np.maximum(lib.to_float(sv1.max_term) / np.abs(lib.to_complex(sv1.S0)),
                        lib.to_float(sv2.max_term) / np.abs(lib.to_complex(sv2.S0)))
    # the subdominant branch coefficient inherits the integration error times this ratio
    Ar, Br = np.abs(lib.to_complex(A) * u1c), np.abs(lib.to_complex(B) * u2c)
    with np.errstate(divide="ignore", invalid="ignore"):
        dominance = np.maximum(Ar, Br) / np.minimum(Ar, Br)
    cond = kappa * cancel * np.where(np.isfinite(dominance), dominance, np.inf)

    defect = np.full(cond.shape, np.nan)
    if diagnostics:
        defect = _wronskian_drift(profile, v, vr, s, x_s, x0r, uc, -duc_dt, ur, dur, rtol, lib)
    return A, B, defect, cond


def _scaled(profile, x, lib):
    d, _ = profile.evaluate(x, "mp" if lib.mp else "float")
    n = profile.n
    return x ** (1 - n) * d ** (lib.real(n) / 2)


def _wronskian_drift(profile, v, vr, s, x_s, x0, uc, duc, ur, dur, rtol, lib):
    """Relative change of W(u_reg, w) x^(1-n) d^(n/2) between the two ends.

    w is started at x0 with W(u_reg, w)(x0) = |u_reg|^2 + |u_reg'|^2 and
    integrated back toward the center, where it is the dominant branch; the
    two Wronskians are therefore computed without cancellation.
    """
    wb = np.conj(dur) * -1
    dwb = np.conj(ur)
    start = np.stack([wb, dwb])[None]
    if lib.mp:
        rhs = make_rhs(profile, vr, s, "mp")
        end, _ = gbs_integrate(rhs, x0, x_s, start, lib.eps * 1e3)
    else:
        end, _ = integrate_double(profile, v, s, float(x0), float(x_s), start, rtol=rtol)
    w_s, dw_s = end[0, 0], end[0, 1]
    W0 = (ur * dwb - dur * wb) * _scaled(profile, x0, lib)
    Ws = (uc * dw_s - duc * w_s) * _scaled(profile, x_s, lib)
    return lib.to_float(np.abs(Ws - W0) / np.abs(W0))


def connection_batch(profile: RadialProfile, l: int, lams, *, x0=None, delta=DEFAULT_DELTA,
                     rtol=DEFAULT_RTOL, tol=CONDITION_LIMIT, guard=DEFAULT_LATTICE_GUARD,
                     precision="double", escalate=True, diagnostics=True) -> list:
    """ConnectionData for every lam in ``lams`` (one integration per precision level).

    Lanes whose condition estimate times the working epsilon exceeds ``tol``
    are recomputed at the next precision level (double -> dd -> qd).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    v = l * (l + profile.n - 1)
    x0 = default_match_point(v) if x0 is None else x0
    if not 0 < x0 <= CUT_A or not 0 < delta <= 2 - CUT_B:
        raise ValueError("need 0 < x0 <= a and 0 < delta <= 2 - b")
    out: list = [None] * lams.size
    pending = np.arange(lams.size)
    levels = ESCALATION[ESCALATION.index(precision):]
    for i, level in enumerate(levels):
        lib = _Lib(level)
        if lib.mp:
            with mpmath.workdps(lib.dps):
                res = [_connect(profile, l, lams[j:j + 1], x0, delta, rtol, guard, lib, diagnostics)
                       for j in pending]
                A, B, D, C = (np.concatenate([r[i] for r in res]) for i in range(4))
                ratios = [b / a if a != 0 else complex("nan") for a, b in zip(A, B)]
        else:
            A, B, D, C = _connect(profile, l, lams[pending], x0, delta, rtol, guard, lib, diagnostics)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = B / A
        bad = []
        for idx, j in enumerate(pending):
            ok = C[idx] * lib.eps <= tol
            if ok or not escalate or i == len(levels) - 1:
                if not ok and escalate:
                    raise IllConditioned(
                        f"condition estimate {C[idx]:.3g} at lam={lams[j]} too large even in {level}",
                        condition=float(C[idx]))
                a, b, S = A[idx], B[idx], ratios[idx]
                out[j] = ConnectionData(complex(lams[j]), l, complex(a), complex(b), complex(S),
                                        float(D[idx]), float(C[idx]), level, float(x0),
                                        S_high=S if lib.mp else None)
            else:
                bad.append(j)
        pending = np.array(bad, dtype=int)
        if pending.size == 0:
            break
    return out


def connection_coeffs(profile: RadialProfile, params: ModeParams, x0=None, delta=DEFAULT_DELTA,
                      tol=CONDITION_LIMIT, **kw) -> ConnectionData:
    if params.n != profile.n:
        raise ValueError("mode parameters and profile disagree on n")
    return connection_batch(profile, params.l, [params.lam], x0=x0, delta=delta, tol=tol, **kw)[0]


def mode_scattering(profile: RadialProfile, params: ModeParams, *, at_resonance_tol=1e-12, **kw) -> complex:
    cd = connection_coeffs(profile, params, **kw)
    if abs(cd.A) <= at_resonance_tol * max(1.0, abs(cd.B)):
        raise AtResonance(f"|A| = {abs(cd.A):.3g} at lam = {params.lam}")
    return cd.S


def lattice_numerator(profile: RadialProfile, l: int, m: int) -> Fraction:
    """Exact right-hand side of the boundary recursion at order m for sigma = (n - m)/2.

    The recursion depends on sigma and s = sigma(n - sigma) only, so the same
    number decides both lattice points lam = (n - m)/2 (x^lam branch) and
    lam = (n + m)/2 (x^(n-lam) branch).  Nonzero means that branch has a simple
    pole there; zero means it continues analytically through the point.
    """
    n = profile.n
    sigma = Fraction(n - m, 2)
    v = l * (l + n - 1)
    d = [Fraction(c) for c in profile.boundary_poly()]
    A, B, C = d, [-(n - 1) * di + Fraction(n, 2) * i * di for i, di in enumerate(d)], \
        [sigma * (n - sigma) * di for di in d]
    C[2] -= v
    deg = len(A) - 1
    a = [Fraction(1)]
    for j in range(1, m + 1):
        num = Fraction(0)
        for i in range(1, min(j, deg) + 1):
            mu = j - i + sigma
            num += (A[i] * mu * (mu - 1) + B[i] * mu + C[i]) * a[j - i]
        if j == m:
            return num
        mu = j + sigma
        a.append(-num / (A[0] * mu * (mu - 1) + B[0] * mu + C[0]))
    return Fraction(0)


def c_lambda(n: int, lam):
    """2^(n - 2 lam) Gamma(n/2 - lam) / Gamma(lam - n/2)."""
    lam = np.asarray(lam, dtype=complex)
    return 2.0 ** (n - 2 * lam) * special.gamma(n / 2 - lam) * special.rgamma(lam - n / 2)


def accumulation_constant(n: int, k: int) -> float:
    """m_k = -c(n - lam_k) n (n - lam_k)/4 with lam_k = (n+1)/2 + k.

    The sign follows the scalar residue -n(n-lam_k)/4 of S at lam_k: the
    per-mode zero of S sits at lam_k - m_k alpha^(1+2k), so the resonance is
    at (n - lam_k) + m_k alpha^(1+2k).  For n=2, k=0 this is +1/4.
    """
    with mpmath.workdps(30):
        mu = mpmath.mpf(n - 1) / 2 - k
        half = mpmath.mpf(n) / 2
        c = mpmath.power(2, n - 2 * mu) * mpmath.gamma(half - mu) * mpmath.rgamma(mu - half)
        return float(-c * n * mu / 4)


def hyperbolic_scattering(n: int, l: int, lam, dps: int | None = None):
    """Gamma-ratio closed form for the unperturbed profile.

    S_l = 2^(n-2 lam) Gamma(n/2-lam) Gamma(lam+l) / (Gamma(lam-n/2) Gamma(n-lam+l)).
    """
    if dps is not None:
        with mpmath.workdps(dps):
            z = mpmath.mpc(lam)
            return (mpmath.power(2, n - 2 * z) * mpmath.gamma(mpmath.mpf(n) / 2 - z)
                    * mpmath.rgamma(z - mpmath.mpf(n) / 2)
                    * mpmath.exp(mpmath.loggamma(z + l) - mpmath.loggamma(n - z + l)))
    lam = np.asarray(lam, dtype=complex)
    return (2.0 ** (n - 2 * lam) * special.gamma(n / 2 - lam) * special.rgamma(lam - n / 2)
            * np.exp(special.loggamma(lam + l) - special.loggamma(n - lam + l)))
