"""Integration of the radial mode equation between the two Frobenius patches.

    u'' + p(x) u' + q(x) u = 0,
    p = -(n-1)/x + (n/2) d'/d,   q = -v/d + s/x^2.

Double precision uses scipy's DOP853 on a packed batch of spectral
parameters (all lanes share one step sequence).  Escalated precision uses a
Gragg-Bulirsch-Stoer extrapolation integrator written against numpy object
arrays of mpmath numbers.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import IntegratorFailure
from .profile import RadialProfile


def make_rhs(profile: RadialProfile, v, s, lib="float"):
    """Right-hand side on states shaped (R, 2, N): R solutions, N spectral lanes."""
    n = profile.n

    def rhs(x, Y):
        d, dp = profile.evaluate(x, lib)
        p = -(n - 1) / x + (n / 2) * dp / d
        q = -v / d + s / (x * x)
        u, up = Y[:, 0], Y[:, 1]
        out = np.empty_like(Y)
        out[:, 0] = up
        # array operand first: mpmath scalars try (slowly) to coerce ndarrays
        out[:, 1] = up * (-p) - u * q
        return out

    return rhs


def integrate_double(profile: RadialProfile, v, s, x_from, x_to, Y0, *, rtol=3e-14, atol=1e-30):
    """Propagate Y0 (R, 2, N complex) from x_from to x_to with DOP853."""
    Y0 = np.asarray(Y0, dtype=complex)
    shape = Y0.shape
    rhs = make_rhs(profile, v, np.asarray(s, dtype=complex))

    def f(x, y):
        return rhs(x, y.reshape(shape)).ravel()

    sol = solve_ivp(f, (x_from, x_to), Y0.ravel(), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegratorFailure(f"DOP853 failed between x={x_from} and x={x_to}: {sol.message}")
    return sol.y[:, -1].reshape(shape), sol.t.size


def _midpoint(f, x, y, H, nsteps):
    """Gragg's modified midpoint rule over [x, x+H] with nsteps substeps."""
    h = H / nsteps
    z0 = y
    z1 = y + f(x, y) * h
    for i in range(1, nsteps):
        z0, z1 = z1, z0 + f(x + i * h, z1) * (2 * h)
    return (z0 + z1 + f(x + H, z1) * h) / 2


def _max_abs(a):
    return max(abs(e) for e in np.ravel(a))


def gbs_integrate(f, x_from, x_to, y0, tol, *, levels=12, max_steps=20000):
    """Bulirsch-Stoer extrapolation with the step sequence 2, 4, 6, ...

    Works on object arrays (mpmath) as well as float arrays; the error test
    is relative to the current solution size.
    """
    x = x_from
    y = y0
    H = (x_to - x_from) / 8
    seq = [2 * (j + 1) for j in range(levels)]
    steps = 0
    while (x_to - x) * (1 if x_to > x_from else -1) > 0:
        if abs(H) > abs(x_to - x):
            H = x_to - x
        table = []
        accepted = False
        err = None
        for j, nj in enumerate(seq):
            row = [_midpoint(f, x, y, H, nj)]
            for kcol in range(1, j + 1):
                # integer weights keep the tableau free of binary rounding
                nj2, nk2 = seq[j] ** 2, seq[j - kcol] ** 2
                row.append(row[kcol - 1] + (row[kcol - 1] - table[j - 1][kcol - 1]) * nk2 / (nj2 - nk2))
            table.append(row)
            if j >= 2:
                scale = _max_abs(row[-1]) + tol
                err = _max_abs(row[-1] - row[-2]) / scale
                if err <= tol:
                    accepted = True
                    break
        if accepted:
            x = x + H
            y = table[-1][-1]
            steps += 1
            if j < levels // 2:
                H = H * 1.6
            elif j == levels - 1:
                H = H * 0.8
        else:
            H = H / 3
            if abs(H) < 1e-12 * (abs(x_to - x_from)):
                raise IntegratorFailure(f"step size underflow near x={float(x):.6g}")
        if steps > max_steps:
            raise IntegratorFailure("too many extrapolation steps")
    return y, steps
