"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line.  Run with
``pytest tests/test_acceptance.py -v`` (lines appear in the terminal output)
or ``python tests/test_acceptance.py``.
"""
import os
import random
import subprocess
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest

from ahscatter.gz import WarpedMetricJet, gz_solve
from ahscatter.normalform import FourierJet, omega_jet
from ahscatter.polescan import (
    ScanRegion,
    accumulation_experiment,
    eigenvalue_scan,
    mode_zero_function,
    winding_count,
)
from ahscatter.radial import RadialProfile, accumulation_constant, connection_batch, hyperbolic_scattering
from ahscatter.ring import laurent_coeff

JOBS = min(8, os.cpu_count() or 1)
_printer = None


@pytest.fixture(autouse=True)
def _report(capsys):
    global _printer

    def emit(line):
        with capsys.disabled():
            print("\n" + line)

    _printer = emit
    yield


def report(cid, ok, detail):
    line = f"[criterion {cid}] {'PASS' if ok else 'FAIL'}  {detail}"
    (_printer or print)(line)
    assert ok, line


def off_lattice(rng, n, count, clearance=0.1):
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-0.5, n + 0.5), rng.uniform(-2, 2))
        if abs(2 * z.real - n - round(2 * z.real - n)) / 2 > clearance or abs(z.imag) > clearance:
            out.append(z)
    return np.array(out)


# ------------------------------------------------------------------ 1 ----

def test_criterion_1_exact_residue_identities():
    rng = random.Random(101)
    bad = []
    for n in (2, 3, 4):
        for k in (0, 1, 2):
            lk = Fraction(n + 1, 2) + k
            lk1 = lk + 1
            for _ in range(20):
                c = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9))
                w = [Fraction(1)]
                for j in range(1, 2 * k + 4):
                    if j % 2 and j < 2 * k + 1:
                        w.append(Fraction(0))
                    elif j == 2 * k + 1:
                        w.append(c)
                    else:
                        w.append(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
                p = gz_solve(WarpedMetricJet.from_coeffs(n, w)).p
                lower = all(laurent_coeff(p[2 * l + 1].coeff(i), Fraction(n + 1, 2) + l, 1) == 0
                            for l in range(k) for i in range(p[2 * l + 1].degree + 1))
                res = [laurent_coeff(p[2 * k + 1].coeff(i), lk, 1) for i in range(p[2 * k + 1].degree + 1)]
                first = res == [n * c * (n - lk) / 4]
                Lc = laurent_coeff(p[2 * k + 3].coeff(1), lk1, 1)
                second = Lc == -c * (n * (n - lk) - 2) / (4 * (2 * k + 3))
                vanish = (Lc == 0) == (n * (n - lk) == 2)
                if not (lower and first and second and vanish):
                    bad.append((n, k, [str(x) for x in w]))
    report(1, not bad, f"180 random metrics, exact arithmetic, failures={len(bad)}")


# ------------------------------------------------------------------ 2 ----

def test_criterion_2_omega_oddness():
    rng = np.random.default_rng(202)
    Q, M = 8, 10
    worst = 0.0
    for k in (1, 2):
        for _ in range(20):
            c = np.zeros((M + 1, 2 * Q + 1), dtype=complex)
            for m in range(M + 1):
                if m % 2 and m < 2 * k + 1:
                    continue
                for q in range(1, 4):
                    z = (0.05 if m == 0 else 0.4) * complex(*rng.uniform(-1, 1, 2)) / q
                    c[m, Q + q], c[m, Q - q] = z, np.conj(z)
                c[m, Q] = rng.uniform(-0.3, 0.3)
            c[0, Q] = 1.0
            o0 = np.zeros(2 * Q + 1, dtype=complex)
            for q in (1, 2, 3):
                z = complex(*rng.uniform(-1, 1, 2))
                o0[Q + q], o0[Q - q] = z, np.conj(z)
            om = omega_jet(FourierJet(c), o0, M)
            odd = [m for m in range(1, 2 * k + 2, 2)]
            worst = max(worst, float(np.max(np.abs(om.coeffs[odd]))))
    report(2, worst < 1e-10, f"max odd omega coefficient {worst:.2e} (< 1e-10)")


# ------------------------------------------------------------------ 3 ----

def _fixture_check(args):
    n, l, lam = args
    cd = connection_batch(RadialProfile(n, 0, 0.0), l, [lam], precision="dd")[0]
    with mpmath.workdps(45):
        return float(abs(cd.S_high / hyperbolic_scattering(n, l, lam, dps=45) - 1))


def test_criterion_3_hyperbolic_oracle():
    from concurrent.futures import ProcessPoolExecutor

    rng = np.random.default_rng(303)
    pts = [(int(rng.integers(2, 4)), int(rng.integers(0, 11)), complex(off_lattice(rng, 2, 1)[0]))
           for _ in range(20)]
    with ProcessPoolExecutor(JOBS) as ex:
        fixture_err = max(ex.map(_fixture_check, pts))
    worst = 0.0
    for n in (2, 3):
        for l in range(11):
            lams = off_lattice(rng, n, 30)
            S = np.array([cd.S for cd in connection_batch(RadialProfile(n, 0, 0.0), l, lams)])
            worst = max(worst, float(np.max(np.abs(S / hyperbolic_scattering(n, l, lams) - 1))))
    ok = fixture_err < 1e-20 and worst < 1e-8
    report(3, ok, f"fixture vs dd pipeline {fixture_err:.1e} (20 pts); "
                  f"double vs fixture {worst:.1e} (< 1e-8)")


# ------------------------------------------------------------------ 4 ----

def test_criterion_4_structural_identities():
    rng = np.random.default_rng(404)
    match = recip = unit = drift = 0.0
    for n in (2, 3):
        for c in (0.0, 1.0):
            p = RadialProfile(n, 0, c)
            for l in (0, 3, 10):
                lams = off_lattice(rng, n, 10)
                runs = [connection_batch(p, l, lams, x0=x0) for x0 in (0.1, 0.2, 0.3)]
                for r in runs[1:]:
                    for a, b in zip(runs[0], r):
                        match = max(match, abs(b.A / a.A - 1), abs(b.B / a.B - 1))
                mirror = connection_batch(p, l, n - lams)
                recip = max(recip, max(abs(a.S * b.S - 1) for a, b in zip(runs[1], mirror)))
                line = connection_batch(p, l, n / 2 + 1j * np.linspace(0.5, 5, 8))
                unit = max(unit, max(abs(abs(cd.S) - 1) for cd in line))
                drift = max(drift, max(cd.wronskian_defect for g in (*runs, mirror, line) for cd in g))
    ok = match < 1e-8 and drift < 1e-10 and unit < 1e-8 and recip < 1e-8
    report(4, ok, f"match {match:.1e}, drift {drift:.1e}, |S|-1 {unit:.1e}, S(l)S(n-l)-1 {recip:.1e}")


# --------------------------------------------------------------- 5, 7 ----

@pytest.fixture(scope="module")
def accumulation():
    return {k: accumulation_experiment(RadialProfile(2, k, 1.0), (5, 40), jobs=JOBS) for k in (0, 1)}


def test_criterion_5_accumulation(accumulation):
    parts, ok = [], True
    for k, target, tol in ((0, -0.5, 0.05), (1, -1.5, 0.1)):
        res = accumulation[k]
        mu = 0.5 - k
        mk = accumulation_constant(2, k)
        by_l = {h.l: h for h in res.hits}
        missing = [l for l in range(10, 41) if l not in by_l]
        rouche = [h.l for h in res.hits
                  if not 0.5 <= abs(h.lam - mu) / (mk * h.alpha_l ** (1 + 2 * k)) <= 1.5]
        ls = [l for l in range(10, 41) if l in by_l]
        xs = np.log([1 + l * (l + 1) for l in ls])
        ys = np.log([abs(by_l[l].lam - mu) for l in ls])
        slope = float(np.polyfit(xs, ys, 1)[0])
        ratio_err = abs(by_l[40].ratio - 1) if 40 in by_l else np.inf
        good = not missing and not rouche and abs(slope - target) <= tol and ratio_err <= 0.25
        ok &= good
        parts.append(f"k={k}: slope {slope:.4f} (target {target}), |ratio-1|@40 {ratio_err:.4f}, "
                     f"missing {missing}, rouche-out {rouche}")
    report(5, ok, "; ".join(parts))


def test_criterion_6_hyperbolic_control():
    p = RadialProfile(2, 0, 0.0)
    region = ScanRegion(0.3, 0.7, -0.1, 0.1)
    windings = [winding_count(mode_zero_function(p, l, (0.3, 0.7), exclusion=1e-4), region)
                for l in range(21)]
    eig = [eigenvalue_scan(p, l, (1.05, 1.95)) for l in range(0, 21, 5)]
    ok = all(w == 0 for w in windings) and all(e == [] for e in eig)
    report(6, ok, f"windings l=0..20: {sorted(set(windings))}; eigenvalues found: {sum(map(len, eig))}")


def test_criterion_7_simplicity(accumulation):
    bad, total = [], 0
    for k, res in accumulation.items():
        f = None
        for h in res.hits:
            total += 1
            f = mode_zero_function(RadialProfile(2, k, 1.0), h.l, (h.lam.real - 1, h.lam.real + 1),
                                   exclusion=1e-12)
            half = 1e-3 * abs(h.lam - (0.5 - k))
            w = winding_count(f, ScanRegion.around(h.lam, half))
            if w != 1 or h.winding != 1:
                bad.append((k, h.l, w))
    report(7, not bad and total > 0, f"{total} zeros re-validated, non-simple: {bad}")


# ------------------------------------------------------------------ 8 ----

def test_criterion_8_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for jobs in (1, 8):
            out = Path(tmp) / f"jobs{jobs}"
            proc = subprocess.run([sys.executable, "-m", "ahscatter", "verify", "--jobs", str(jobs),
                                   "--out", str(out)], capture_output=True, text=True)
            assert proc.returncode == 0, proc.stdout + proc.stderr
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        same = outs[0] == outs[1]
        report(8, same, f"verify --jobs 1 vs --jobs 8: files {sorted(outs[0])} "
                        f"{'bit-identical' if same else 'DIFFER'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
