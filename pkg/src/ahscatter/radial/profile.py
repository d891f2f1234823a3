"""Warping profile d(x) = (1 - x^2/4)^2 + c chi(x) x^(2k+1) on the collar (0, 2)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from ..errors import DomainError

CUT_A = 0.5
CUT_B = 1.0


def _eta(t, exp):
    return exp(-1 / t) if t > 0 else 0 * t


def smooth_step(t, exp=math.exp):
    """sigma(t) = eta(t) / (eta(t) + eta(1-t)) and its derivative."""
    if t <= 0:
        return 0 * t, 0 * t
    if t >= 1:
        return 0 * t + 1, 0 * t
    e0, e1 = _eta(t, exp), _eta(1 - t, exp)
    s = e0 + e1
    de0, de1 = e0 / (t * t), e1 / ((1 - t) * (1 - t))
    return e0 / s, (de0 * e1 + e0 * de1) / (s * s)


@dataclass(frozen=True)
class RadialProfile:
    n: int
    k: int
    c: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if 2 * self.k == self.n - 1 and self.c != 0:
            raise ValueError("2k = n-1 is excluded (the accumulation point would be lam = 0)")
        if self.c < 0:
            raise ValueError("perturbation amplitude must be >= 0")

    @property
    def hyperbolic(self) -> bool:
        return self.c == 0

    def chi(self, x, exp=math.exp):
        """Cutoff chi(x) = sigma(2(1-x)) and d chi / dx."""
        s, ds = smooth_step(2 * (1 - x), exp)
        return s, -2 * ds

    def boundary_poly(self) -> list:
        """Coefficients of d on [0, a], where chi = 1 (constant term first)."""
        deg = max(4, 2 * self.k + 1)
        d = [0.0] * (deg + 1)
        d[0], d[2], d[4] = 1.0, -0.5, 1.0 / 16
        d[2 * self.k + 1] += self.c
        return d

    def evaluate(self, x, lib: str = "float"):
        """(d(x), d'(x)); exact polynomial branches on (0, a] and [b, 2)."""
        if not 0 < x < 2:
            raise DomainError(f"x = {x} outside (0, 2)")
        exp = mpmath.exp if lib == "mp" else math.exp
        q = 1 - x * x / 4
        d = q * q
        dp = -x * q
        if self.c == 0 or x >= CUT_B:
            return d, dp
        p = 2 * self.k + 1
        xp = x ** p
        if x <= CUT_A:
            return d + self.c * xp, dp + self.c * p * x ** (p - 1)
        chi, dchi = self.chi(x, exp)
        return d + self.c * chi * xp, dp + self.c * (dchi * xp + chi * p * x ** (p - 1))


def profile_eval(p: RadialProfile, x: float):
    return p.evaluate(x)
