"""Zeros of analytic functions by the argument principle, and the resonance experiments.

Evaluators are vectorised: ``f(zs)`` takes a 1-d complex array and returns an
array of the same shape.  :func:`vectorize` adapts a scalar function.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from .errors import IndicialCollision, Unresolved, ZeroOnContour
from .radial.connection import DEFAULT_RTOL
from .radial import (
    DEFAULT_LATTICE_GUARD,
    RadialProfile,
    accumulation_constant,
    connection_batch,
    lattice_numerator,
)

Evaluator = Callable[[np.ndarray], np.ndarray]


def vectorize(f) -> Evaluator:
    def g(zs):
        return np.array([complex(f(z)) for z in np.ravel(zs)], dtype=complex)
    return g


@dataclass(frozen=True)
class ScanRegion:
    """Axis-aligned rectangle [re_min, re_max] x [im_min, im_max] in the lam plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    density: int = 24       # contour samples per edge before adaptive refinement
    depth: int = 10         # quadtree levels available to locate_zeros
    tol: float = 1e-11      # zero tolerance (absolute, in lam)

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("degenerate rectangle")
        if self.density < 2 or self.depth < 0 or self.tol <= 0:
            raise ValueError("density >= 2, depth >= 0 and tol > 0 required")

    @classmethod
    def around(cls, center: complex, half_width: float, **kw) -> "ScanRegion":
        return cls(center.real - half_width, center.real + half_width,
                   center.imag - half_width, center.imag + half_width, **kw)

    @property
    def center(self) -> complex:
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    @property
    def size(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.re_min - margin <= z.real <= self.re_max + margin
                and self.im_min - margin <= z.imag <= self.im_max + margin)

    def corners(self):
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def split(self, fx: float = 0.5, fy: float = 0.5):
        """Four children in lexicographic (re, im) order."""
        xm = self.re_min + fx * (self.re_max - self.re_min)
        ym = self.im_min + fy * (self.im_max - self.im_min)
        return [replace(self, re_min=a, re_max=b, im_min=c, im_max=d)
                for a, b in ((self.re_min, xm), (xm, self.re_max))
                for c, d in ((self.im_min, ym), (ym, self.im_max))]

    def lattice_clearance(self, n: int) -> float:
        """Distance from the contour to the nearest point with 2 lam - n in Z."""
        best = math.inf
        lo = math.floor(2 * self.re_min - n) - 1
        hi = math.ceil(2 * self.re_max - n) + 1
        for j in range(lo, hi + 1):
            p = (n + j) / 2
            best = min(best, _dist_to_boundary(self, complex(p, 0)))
        return best


def _dist_to_boundary(r: ScanRegion, z: complex) -> float:
    x = min(max(z.real, r.re_min), r.re_max)
    y = min(max(z.imag, r.im_min), r.im_max)
    if r.contains(z):
        return min(z.real - r.re_min, r.re_max - z.real, z.imag - r.im_min, r.im_max - z.imag)
    return abs(complex(x, y) - z)


class ZeroHit(NamedTuple):
    z: complex
    winding: int
    step: float        # size of the last secant correction

    @property
    def simple(self) -> bool:
        return self.winding == 1


def _contour_points(region: ScanRegion, density: int):
    pts = []
    c = region.corners()
    for a, b in zip(c, c[1:] + c[:1]):
        t = np.arange(density) / density
        pts.append(a + (b - a) * t)
    return np.concatenate(pts)


def winding_count(f: Evaluator, region: ScanRegion, *, density: int | None = None,
                  max_refine: int = 12, zero_tol: float = 1e-13) -> int:
    """Zeros (with multiplicity) inside ``region``; segments with |d arg| > pi/2 are bisected."""
    density = density or region.density
    z = _contour_points(region, density)
    w = f(z)
    scale = float(np.max(np.abs(w)))
    if not np.all(np.isfinite(w)):
        raise ZeroOnContour("non-finite evaluator value on the contour")
    total = 0.0
    zs = np.append(z, z[0])
    ws = np.append(w, w[0])
    # work list of segments (za, zb, wa, wb, level) processed in contour order
    stack = [(zs[i], zs[i + 1], ws[i], ws[i + 1], 0) for i in range(len(z))][::-1]
    while stack:
        za, zb, wa, wb, level = stack.pop()
        if min(abs(wa), abs(wb)) <= zero_tol * scale:
            raise ZeroOnContour(f"|f| ~ 0 on the contour near {za:.12g}")
        dphi = float(np.angle(wb / wa))
        if abs(dphi) <= math.pi / 2:
            total += dphi
            continue
        if level >= max_refine:
            raise ZeroOnContour(f"phase still jumps by {dphi:.3g} near {za:.12g} after refinement")
        zm = (za + zb) / 2
        wm = f(np.array([zm]))[0]
        stack.append((zm, zb, wm, wb, level + 1))
        stack.append((za, zm, wa, wm, level + 1))
    count = total / (2 * math.pi)
    k = int(round(count))
    if abs(count - k) > 1e-3:
        raise ZeroOnContour(f"accumulated phase {count:.6f} x 2pi is not an integer")
    return k


def _secant(f: Evaluator, region: ScanRegion, tol: float, max_iter: int = 60):
    z0 = region.center
    h = region.size / 10
    z1 = z0 + h
    f0, f1 = f(np.array([z0, z1]))
    step = math.inf
    for _ in range(max_iter):
        if f1 == f0:
            break
        z2 = z1 - f1 * (z1 - z0) / (f1 - f0)
        step = abs(z2 - z1)
        z0, f0 = z1, f1
        z1 = z2
        if not region.contains(z1, margin=region.size):
            return None, step
        if step < tol:
            break
        f1 = f(np.array([z1]))[0]
    return (z1, step) if step < tol else (None, step)


def _validated(f, z: complex, region: ScanRegion) -> int:
    box = ScanRegion.around(z, 5 * region.tol, density=8, tol=region.tol)
    return winding_count(f, box)


def locate_zeros(f: Evaluator, region: ScanRegion, *, winding: int | None = None) -> list:
    """All zeros inside ``region`` as ZeroHit(z, winding, step), sorted by (re, im).

    A zero whose validation box (side 10 tol) still winds more than once is
    reported once with that winding (non-simple).
    """
    w = winding_count(f, region) if winding is None else winding
    hits: list = []
    _locate(f, region, w, 0, hits)
    hits.sort(key=lambda h: (h.z.real, h.z.imag))
    return hits


def _children(f, region):
    # a zero on an internal edge makes a child's count fail; nudge the split point
    for fx, fy in ((0.5, 0.5), (0.5 + 1 / 17, 0.5 - 1 / 23), (0.5 - 1 / 13, 0.5 + 1 / 19)):
        kids = region.split(fx, fy)
        try:
            return kids, [winding_count(f, k) for k in kids]
        except ZeroOnContour:
            continue
    raise Unresolved("could not split the box without a zero on an edge", box=region)


def _locate(f, region: ScanRegion, w: int, level: int, hits: list):
    if w == 0:
        return
    if w == 1:
        z, step = _secant(f, region, region.tol)
        if z is not None and region.contains(z, margin=region.tol):
            wz = _validated(f, z, region)
            if wz == 1:
                hits.append(ZeroHit(complex(z), 1, float(step)))
                return
    elif region.size <= 10 * region.tol:
        z, step = _secant(f, region, region.tol)
        z = region.center if z is None else z
        hits.append(ZeroHit(complex(z), w, float(step)))
        return
    if level >= region.depth:
        if w > 1:
            # cluster that the quadtree could not separate: try to pin one multiple zero
            z, step = _secant(f, region, region.tol)
            if z is not None:
                wz = _validated(f, z, region)
                if wz == w:
                    hits.append(ZeroHit(complex(z), w, float(step)))
                    return
        raise Unresolved(f"refinement depth exhausted with winding {w}", box=region, winding=w)
    kids, ws = _children(f, region)
    if sum(ws) != w:
        raise Unresolved(f"children windings {ws} do not add up to {w}", box=region, winding=w)
    for kid, kw in zip(kids, ws):
        _locate(f, kid, kw, level + 1, hits)


# --- resonance evaluators -----------------------------------------------------------

def _removed_lattice_points(profile: RadialProfile, l: int, re_lo: float, re_hi: float) -> list:
    """Points lam = (n - m)/2 in [re_lo, re_hi] where A_l has a simple pole.

    There the x^lam branch picks up c/(lam - p) times the x^(n-lam) branch,
    which passes into W(u_reg, u_2) but cancels in W(u_1, u_2).  At the mirror
    points (n + m)/2 the singular part of u_1 is proportional to u_2, so A
    stays regular and the pole moves into B.
    """
    n = profile.n
    out = []
    m_max = int(2 * max(abs(re_lo), abs(re_hi)) + n) + 2
    for m in range(1, m_max + 1):
        p = (n - m) / 2
        if re_lo <= p <= re_hi and lattice_numerator(profile, l, m) != 0:
            out.append(p)
    return out


def mode_zero_function(profile: RadialProfile, l: int, re_range, *, exclusion: float = 1e-6,
                       rtol: float = DEFAULT_RTOL, x0=None) -> Evaluator:
    """A_l times (2 lam - 2p) for each lattice pole p near the strip of Re lam.

    The result is analytic on the strip, so its zeros are exactly the
    resonances (Re lam < n/2) and eigenvalues (Re lam > n/2) of mode l.
    Points within ``exclusion`` of a removed lattice point are replaced by the
    mean over a circle of radius 2*exclusion.
    """
    n = profile.n
    lat = np.array(_removed_lattice_points(profile, l, re_range[0] - 1, re_range[1] + 1))
    circle = 2 * exclusion * np.exp(0.5j * np.pi * np.arange(4))

    def factor(z):
        out = np.ones_like(z)
        for p in lat:
            out = out * (2 * z - 2 * p)
        return out

    def raw(zs):
        cds = connection_batch(profile, l, zs, x0=x0, rtol=rtol, guard=None,
                               escalate=False, diagnostics=False)
        return np.array([cd.A for cd in cds], dtype=complex) * factor(zs)

    def f(zs):
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        near = np.zeros(zs.shape, dtype=bool)
        for p in lat:
            near |= np.abs(zs - p) < exclusion
        if np.any(np.abs(zs - n / 2) < exclusion):
            raise IndicialCollision("lam = n/2 makes the two boundary branches coincide")
        pts = [zs[~near]] + [z + circle for z in zs[near]]
        vals = raw(np.concatenate(pts))
        out = np.empty(zs.shape, dtype=complex)
        k = int(np.count_nonzero(~near))
        out[~near] = vals[:k]
        out[near] = vals[k:].reshape(-1, 4).mean(axis=1)
        return out

    return f


# --- experiments ----------------------------------------------------------------------

@dataclass
class ResonanceHit:
    l: int
    v_l: int
    alpha_l: float
    lam: complex
    winding: int
    newton_residual: float
    predicted: complex
    ratio: complex


@dataclass
class AccumulationResult:
    n: int
    k: int
    c: float
    m_k: float
    hits: list
    misses: list
    slope: float
    slope_ci: tuple
    failures: list          # (l, message) for boxes that could not be resolved

    def fit_summary(self) -> dict:
        return {"slope": self.slope, "slope_ci": list(self.slope_ci),
                "m_k_used": self.m_k, "misses": list(self.misses)}


def accumulation_point(n: int, k: int) -> float:
    return (n - 1) / 2 - k


def predicted_resonance(n: int, k: int, l: int) -> tuple:
    """(predicted zero, eps_l) with eps_l = |m_k| alpha^(1+2k) / 2."""
    v = l * (l + n - 1)
    a = (1 + v) ** -0.5
    mk = accumulation_constant(n, k)
    shift = mk * a ** (1 + 2 * k)
    return complex(accumulation_point(n, k) + shift), abs(shift) / 2


def _scan_mode(args):
    profile, l, opts = args
    n, k = profile.n, profile.k
    v = l * (l + n - 1)
    alpha = (1 + v) ** -0.5
    pred, eps = predicted_resonance(n, k, l)
    half = opts["box_scale"] * eps
    region = ScanRegion.around(pred, half, density=opts["density"], tol=opts["tol"])
    f = mode_zero_function(profile, l, (region.re_min, region.re_max), exclusion=1e-3 * half,
                           rtol=opts["rtol"])
    try:
        zeros = locate_zeros(f, region)
    except (Unresolved, ZeroOnContour) as exc:
        return l, [], str(exc)
    mk = accumulation_constant(n, k)
    scale = mk * alpha ** (1 + 2 * k)
    hits = [ResonanceHit(l, v, alpha, z.z, z.winding, z.step, pred,
                         (z.z - accumulation_point(n, k)) / scale) for z in zeros]
    return l, hits, None


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))      # map preserves input order


def accumulation_experiment(profile: RadialProfile, l_range, *, tol: float = 1e-11, density: int = 24,
                            rtol: float = DEFAULT_RTOL, box_scale: float = 3.0, jobs: int = 1,
                            fit_from: int | None = None) -> AccumulationResult:
    """Scan one box per mode around the predicted resonance and fit the decay exponent.

    The fit is the least-squares slope of log|lam* - (n-1)/2 + k| against
    log(1 + v_l) over the l with a hit (and l >= ``fit_from`` if given).
    """
    n, k = profile.n, profile.k
    if 2 * k == n - 1:
        raise ValueError("2k = n-1: the accumulation point would be lam = 0")
    l_min, l_max = l_range
    opts = {"tol": tol, "density": density, "rtol": rtol, "box_scale": box_scale}
    results = _parallel_map(_scan_mode, [(profile, l, opts) for l in range(l_min, l_max + 1)], jobs)
    hits, misses, failures = [], [], []
    for l, hs, err in results:
        if err is not None:
            failures.append((l, err))
        if not hs:
            misses.append(l)
        hits.extend(hs)
    mu = accumulation_point(n, k)
    use = [h for h in hits if h.winding == 1 and (fit_from is None or h.l >= fit_from)]
    slope, ci = math.nan, (math.nan, math.nan)
    if len(use) >= 3:
        xs = np.log([1 + h.v_l for h in use])
        ys = np.log([abs(h.lam - mu) for h in use])
        reg = stats.linregress(xs, ys)
        t = stats.t.ppf(0.975, len(use) - 2)
        slope = float(reg.slope)
        ci = (float(reg.slope - t * reg.stderr), float(reg.slope + t * reg.stderr))
    return AccumulationResult(n, k, profile.c, accumulation_constant(n, k), hits, misses,
                              slope, ci, failures)


def resonance_scan(profile: RadialProfile, l: int, region: ScanRegion, *, rtol: float = DEFAULT_RTOL) -> list:
    """Zeros of the regularised A_l inside ``region`` (resonances if Re lam < n/2)."""
    f = mode_zero_function(profile, l, (region.re_min, region.re_max),
                           exclusion=1e-3 * region.size, rtol=rtol)
    return locate_zeros(f, region)


def eigenvalue_scan(profile: RadialProfile, l: int, interval, *, samples: int = 48,
                    guard: float = DEFAULT_LATTICE_GUARD, tol: float = 1e-11, rtol: float = DEFAULT_RTOL) -> list:
    """Real zeros of the regularised A_l on ``interval`` inside (n/2, n).

    Sign changes on a uniform grid are refined by bisection (brentq) and each
    root must have winding exactly 1 in a small complex box.
    """
    n = profile.n
    a, b = interval
    if not n / 2 < a < b < n:
        raise ValueError("interval must lie inside (n/2, n)")
    for end in (a, b):
        j = round(2 * end - n)
        if abs(2 * end - n - j) <= guard:
            raise IndicialCollision(f"interval endpoint {end} within the lattice guard")
    f = mode_zero_function(profile, l, (a, b), exclusion=1e-6, rtol=rtol)
    xs = np.linspace(a, b, samples)
    vals = f(xs.astype(complex)).real
    roots = []
    for i in range(samples - 1):
        if vals[i] == 0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(lambda x: f(np.array([complex(x)]))[0].real, xs[i], xs[i + 1],
                                xtol=tol, rtol=4 * np.finfo(float).eps))
    out = []
    for r in roots:
        half = min(1e-4, (b - a) / samples / 2)
        w = winding_count(f, ScanRegion.around(complex(r), half, density=8))
        if w != 1:
            raise Unresolved(f"eigenvalue candidate {r} has winding {w}", winding=w)
        out.append(r)
    return out
