"""Jets of the change of geodesic boundary defining function on a surface.

For n = 1 (circle boundary, coordinate y) a second geodesic defining
function t = e^omega x solves

    2 d_x omega + x ((d_x omega)^2 + w^-1 (d_y omega)^2) = 0,

where x^2 g = dx^2 + w(x, y) dy^2.  Writing omega = sum_m omega_m(y) x^m the
x^m coefficient gives the explicit recursion

    omega_{m+1} = -[(d_x omega)^2 + w^-1 (d_y omega)^2]_{m-1} / (2 (m+1)),

with omega_1 = 0.  Each omega_m is a trigonometric polynomial of degree <= Q;
products are formed pointwise on 4Q+1 equispaced samples and projected back
with a direct DFT.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveMetric


@dataclass(frozen=True)
class FourierJet:
    """coeffs[m, q + Q] is the e^{i q y} coefficient of the x^m term."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[1] % 2 != 1:
            raise ValueError("coeffs must have shape (M+1, 2Q+1)")
        object.__setattr__(self, "coeffs", c)

    @property
    def M(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def Q(self) -> int:
        return (self.coeffs.shape[1] - 1) // 2

    @classmethod
    def zeros(cls, M: int, Q: int) -> "FourierJet":
        return cls(np.zeros((M + 1, 2 * Q + 1), dtype=complex))

    def reality_defect(self) -> float:
        """max |c(m, -q) - conj c(m, q)|; zero for real-valued jets."""
        return float(np.max(np.abs(self.coeffs[:, ::-1] - self.coeffs.conj()), initial=0.0))

    def odd_max(self, upto: int) -> float:
        """Largest Fourier modulus among odd x-orders 1, 3, ..., <= upto."""
        rows = [m for m in range(1, min(upto, self.M) + 1, 2)]
        if not rows:
            return 0.0
        return float(np.max(np.abs(self.coeffs[rows])))

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "Q": self.Q,
            "coeffs": [[[float(z.real), float(z.imag)] for z in row] for row in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FourierJet":
        rows = [[complex(re, im) for re, im in row] for row in data["coeffs"]]
        jet = cls(np.array(rows, dtype=complex))
        if "M" in data and data["M"] != jet.M or "Q" in data and data["Q"] != jet.Q:
            raise ValueError("declared M/Q do not match the coefficient table")
        return jet


class _Grid:
    """Equispaced samples y_p = 2 pi p / N with N = 4Q+1 and explicit DFT matrices."""

    def __init__(self, Q: int):
        self.Q = Q
        self.N = 4 * Q + 1
        y = 2 * np.pi * np.arange(self.N) / self.N
        q = np.arange(-Q, Q + 1)
        self.q = q
        self.synth = np.exp(1j * np.outer(y, q))          # coefficients -> samples
        self.analysis = self.synth.conj().T / self.N       # samples -> coefficients, |q| <= Q

    def values(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self.synth.T

    def project(self, values: np.ndarray) -> np.ndarray:
        return values @ self.analysis.T

    def dy(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs * (1j * self.q)


def _pad_Q(c: np.ndarray, Q: int) -> np.ndarray:
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    q_in = (c.shape[1] - 1) // 2
    if q_in == Q:
        return c
    out = np.zeros((c.shape[0], 2 * Q + 1), dtype=complex)
    if q_in < Q:
        out[:, Q - q_in:Q + q_in + 1] = c
    else:
        out[:] = c[:, q_in - Q:q_in + Q + 1]
    return out


def _reciprocal_samples(wvals: np.ndarray, M: int) -> np.ndarray:
    """x-series of 1/w at each sample point (rows = x-order)."""
    rows = wvals.shape[0]
    out = np.zeros((M + 1, wvals.shape[1]), dtype=complex)
    out[0] = 1 / wvals[0]
    for m in range(1, M + 1):
        acc = np.zeros(wvals.shape[1], dtype=complex)
        for i in range(1, min(m, rows - 1) + 1):
            acc += wvals[i] * out[m - i]
        out[m] = -acc * out[0]
    return out


def omega_jet(wjet: FourierJet, omega0, M: int) -> FourierJet:
    """Solve for omega_0..omega_M given w(x, y) and omega(0, y) = omega0.

    ``omega0`` is a coefficient vector of length 2Q'+1; the working degree is
    the larger of the two inputs' Fourier truncations.
    """
    omega0 = np.asarray(omega0, dtype=complex)
    Q = max(wjet.Q, (omega0.shape[-1] - 1) // 2)
    grid = _Grid(Q)
    wc = _pad_Q(wjet.coeffs, Q)
    wvals = grid.values(wc)
    if np.min(wvals[0].real) <= 0:
        raise NonPositiveMetric("w(0, y) is not positive on the sample grid")
    winv = _reciprocal_samples(wvals, M)

    om = np.zeros((M + 1, 2 * Q + 1), dtype=complex)
    om[0] = _pad_Q(omega0, Q)[0]
    # grid samples of d_x omega (index j -> coefficient of x^j) and d_y omega
    dx_vals = np.zeros((M + 1, grid.N), dtype=complex)
    dy_vals = np.zeros((M + 1, grid.N), dtype=complex)
    dy_vals[0] = grid.values(grid.dy(om[0]))
    for m in range(0, M):
        if m == 0:
            om[1] = 0
        else:
            sq = sum(dx_vals[i] * dx_vals[m - 1 - i] for i in range(m))
            yy = sum(dy_vals[i] * dy_vals[j] * winv[m - 1 - i - j]
                     for i in range(m) for j in range(m - i))
            om[m + 1] = -grid.project(sq + yy) / (2 * (m + 1))
        dx_vals[m] = grid.values((m + 1) * om[m + 1])
        dy_vals[m + 1] = grid.values(grid.dy(om[m + 1]))
    return FourierJet(om)


def residual(wjet: FourierJet, omega: FourierJet) -> np.ndarray:
    """Max modulus over the 4Q+1 samples of each x^m coefficient of the equation.

    Entry m is the x^m coefficient of 2 d_x omega + x(...) evaluated pointwise,
    for m = 0..M-1 (orders whose every ingredient is known).
    """
    Q = max(wjet.Q, omega.Q)
    grid = _Grid(Q)
    M = omega.M
    om = _pad_Q(omega.coeffs, Q)
    wvals = grid.values(_pad_Q(wjet.coeffs, Q))
    winv = _reciprocal_samples(wvals, M)
    dx = [grid.values((j + 1) * om[j + 1]) for j in range(M)]
    dy = [grid.values(grid.dy(om[j])) for j in range(M + 1)]
    out = np.zeros(M)
    for m in range(M):
        r = 2 * dx[m]
        if m >= 1:
            r = r + sum(dx[i] * dx[m - 1 - i] for i in range(m))
            r = r + sum(dy[i] * dy[j] * winv[m - 1 - i - j]
                        for i in range(m) for j in range(m - i))
        out[m] = np.max(np.abs(r))
    return out
