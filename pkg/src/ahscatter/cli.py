"""Command line front end: ``ahscatter <engine> --config run.json --out results/``.

Every engine reads one JSON config, writes JSON/CSV (and optionally SVG)
into ``--out`` and maps failures onto exit codes:

    0  success
    2  invalid configuration
    3  numerical failure that survived precision escalation
    4  a verify criterion failed
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalFailure
from .gz import WarpedMetricJet, evenness_order, scattering_residues
from .normalform import FourierJet, omega_jet, residual
from .polescan import (
    ScanRegion,
    _parallel_map,
    accumulation_experiment,
    accumulation_point,
    locate_zeros,
    mode_zero_function,
    predicted_resonance,
)
from .radial import RadialProfile, accumulation_constant, connection_batch
from .radial.connection import DEFAULT_RTOL, ESCALATION
from .ring import parse_rational

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

ENGINES = ("gz", "normalform", "modes", "resonances", "accumulate", "verify")

DEFAULT_TOLERANCES = {
    "ode_rtol": DEFAULT_RTOL,
    "zero_tol": 1e-11,
    "lattice_guard": 1e-3,
    "wronskian_tol": 1e-10,
}

MODE_COLUMNS = ["l", "v_l", "re_lambda", "im_lambda", "re_A", "im_A", "re_B", "im_B",
                "re_S", "im_S", "wronskian_defect", "precision_used"]
ZERO_COLUMNS = ["l", "v_l", "alpha_l", "re_zero", "im_zero", "winding", "predicted_re",
                "predicted_im", "ratio_re", "ratio_im", "newton_residual"]


# ---------------------------------------------------------------- config ----

def _require(cfg: dict, key: str, kind=None):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    value = cfg[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(f"{key!r} must be an integer")
    if kind is float and (isinstance(value, bool) or not isinstance(value, (int, float))):
        raise ConfigError(f"{key!r} must be a number")
    return value


def _int(cfg, key, default=None):
    if key not in cfg and default is not None:
        return default
    return _require(cfg, key, int)


def _float(cfg, key, default=None):
    if key not in cfg and default is not None:
        return float(default)
    return float(_require(cfg, key, float))


def tolerances(cfg: dict) -> dict:
    given = cfg.get("tolerances", {})
    if not isinstance(given, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown = set(given) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerances: {sorted(unknown)}")
    tol = {**DEFAULT_TOLERANCES, **given}
    for key, value in tol.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
            raise ConfigError(f"tolerance {key!r} must be a positive number")
    return {k: float(v) for k, v in tol.items()}


def _l_range(cfg: dict):
    lr = _require(cfg, "l_range")
    if (not isinstance(lr, list) or len(lr) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in lr)
            or not 0 <= lr[0] <= lr[1]):
        raise ConfigError("'l_range' must be [l_min, l_max] with 0 <= l_min <= l_max")
    return lr[0], lr[1]


def _profile(cfg: dict) -> RadialProfile:
    n = _int(cfg, "n")
    k = _int(cfg, "k", 0)
    c = _float(cfg, "c", 0.0)
    try:
        return RadialProfile(n, k, c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _complex_list(values, key) -> list:
    try:
        return [complex(float(re), float(im)) for re, im in values]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key!r} must be a list of [re, im] pairs") from exc


def _precision(cfg: dict, override: str | None) -> str:
    p = override or cfg.get("precision", "double")
    if p not in ESCALATION:
        raise ConfigError(f"precision must be one of {ESCALATION}")
    return p


# ---------------------------------------------------------------- output ----

def _plain(obj):
    """JSON-ready copy: complex -> [re, im], Fraction -> "p/q", non-finite -> null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(obj.real), _plain(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _num(x) -> str:
    return repr(float(x))


def csv_text(columns: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def zero_rows(hits) -> list:
    return [[h.l, h.v_l, h.alpha_l, h.lam.real, h.lam.imag, h.winding, h.predicted.real,
             h.predicted.imag, h.ratio.real, h.ratio.imag, h.newton_residual] for h in hits]


def scatter_svg(points, *, marks=(), vline=None, title="", size=480, pad=48) -> str:
    """Minimal SVG scatter of complex points (filled) and reference marks (open)."""
    allpts = [complex(z) for z in (*points, *marks)]
    if vline is not None:
        allpts.append(complex(vline))
    if not allpts:
        allpts = [0j]
    xs, ys = [z.real for z in allpts], [z.imag for z in allpts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    wx, wy = max(x1 - x0, 1e-12), max(y1 - y0, 1e-12)
    x0, x1, y0, y1 = x0 - 0.05 * wx, x1 + 0.05 * wx, y0 - 0.05 * wy, y1 + 0.05 * wy
    span = size - 2 * pad

    def px(z):
        return (pad + (z.real - x0) / (x1 - x0) * span, size - pad - (z.imag - y0) / (y1 - y0) * span)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" fill="none" stroke="#888"/>',
           f'<text x="{size / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle" '
           f'font-family="sans-serif" font-size="14">{title}</text>',
           f'<text x="{size / 2:.1f}" y="{size - 12}" text-anchor="middle" font-family="sans-serif" '
           f'font-size="12">Re lambda [{x0:.6g}, {x1:.6g}]</text>',
           f'<text x="14" y="{size / 2:.1f}" transform="rotate(-90 14 {size / 2:.1f})" text-anchor="middle" '
           f'font-family="sans-serif" font-size="12">Im lambda [{y0:.6g}, {y1:.6g}]</text>']
    if vline is not None:
        x, _ = px(complex(vline))
        out.append(f'<line x1="{x:.2f}" y1="{pad}" x2="{x:.2f}" y2="{size - pad}" '
                   f'stroke="#c33" stroke-dasharray="4 3"/>')
    for z in marks:
        x, y = px(complex(z))
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="none" stroke="#39c"/>')
    for z in points:
        x, y = px(complex(z))
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="#000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- engines ----

def run_gz(cfg: dict, args) -> tuple:
    n = _int(cfg, "n")
    M = _int(cfg, "M")
    raw = _require(cfg, "w")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'w' must be a non-empty list of rationals")
    try:
        w = [parse_rational(x) for x in raw]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rational in 'w': {exc}") from exc
    if w[0] != 1:
        raise ConfigError("w_0 must equal 1")
    if len(w) > M + 1:
        raise ConfigError("'w' has more coefficients than M+1")
    if M < 3:
        raise ConfigError("need M >= 3 for the residue report")
    m = WarpedMetricJet.from_coeffs(n, w + [Fraction(0)] * (M + 1 - len(w)), M)
    even = evenness_order(m.w)
    k = cfg.get("k")
    if k is None:
        k = int(min(even, (M - 3) // 2))
    elif isinstance(k, bool) or not isinstance(k, int) or k < 0:
        raise ConfigError("'k' must be a non-negative integer")
    report = scattering_residues(m, k).to_json()
    report["evenness_order"] = "inf" if even == math.inf else even
    report["M"] = M
    return {"gz_report.json": dumps(report)}, EXIT_OK


def run_normalform(cfg: dict, args) -> tuple:
    try:
        w = FourierJet.from_json(_require(cfg, "w"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'w' jet: {exc}") from exc
    om0 = np.array(_complex_list(_require(cfg, "omega0"), "omega0"))
    M = _int(cfg, "M")
    if om0.size % 2 == 0:
        raise ConfigError("'omega0' needs an odd number (2Q+1) of Fourier coefficients")
    if "Q" in cfg:
        # working Fourier degree; nonlinear terms fold back when it is too small
        extra = _int(cfg, "Q") - (om0.size - 1) // 2
        if extra < 0:
            raise ConfigError("'Q' is below the degree of omega0")
        om0 = np.pad(om0, extra)
    omega = omega_jet(w, om0, M)
    res = residual(w, omega)
    report = {"omega": omega.to_json(), "M": M, "Q": omega.Q,
              "residual_max": float(np.max(np.abs(res))) if np.size(res) else 0.0,
              "odd_max": omega.odd_max(M)}
    return {"normalform.json": dumps(report)}, EXIT_OK


def _modes_task(job):
    profile, l, lams, opts = job
    return connection_batch(profile, l, lams, rtol=opts["rtol"], guard=opts["guard"],
                            precision=opts["precision"])


def run_modes(cfg: dict, args) -> tuple:
    profile = _profile(cfg)
    l_min, l_max = _l_range(cfg)
    lams = _complex_list(_require(cfg, "lambdas"), "lambdas")
    if not lams:
        raise ConfigError("'lambdas' is empty")
    tol = tolerances(cfg)
    opts = {"rtol": tol["ode_rtol"], "guard": tol["lattice_guard"],
            "precision": _precision(cfg, args.precision)}
    per_l = _parallel_map(_modes_task, [(profile, l, lams, opts) for l in range(l_min, l_max + 1)],
                          args.jobs)
    rows = []
    for l, cds in zip(range(l_min, l_max + 1), per_l):
        v = l * (l + profile.n - 1)
        for cd in cds:
            if cd.wronskian_defect > tol["wronskian_tol"]:
                raise NumericalFailure(f"Wronskian drift {cd.wronskian_defect:.3g} at l={l}, "
                                       f"lam={cd.lam} exceeds wronskian_tol")
            rows.append([l, v, cd.lam.real, cd.lam.imag, cd.A.real, cd.A.imag, cd.B.real,
                         cd.B.imag, cd.S.real, cd.S.imag, cd.wronskian_defect, cd.precision])
    return {"modes.csv": csv_text(MODE_COLUMNS, rows)}, EXIT_OK


def _scan_precision(cfg, args):
    if _precision(cfg, args.precision) != "double":
        raise ConfigError("zero scans evaluate A in double precision only")


def _region(cfg: dict, zero_tol: float) -> ScanRegion:
    reg = _require(cfg, "region")
    try:
        (re0, re1), (im0, im1) = reg["re"], reg["im"]
        return ScanRegion(float(re0), float(re1), float(im0), float(im1),
                          density=_int(cfg, "density", 24), depth=_int(cfg, "depth", 10), tol=zero_tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"'region' must be {{\"re\": [a, b], \"im\": [c, d]}}: {exc}") from exc


def _resonance_task(job):
    profile, l, region, rtol = job
    f = mode_zero_function(profile, l, (region.re_min, region.re_max),
                           exclusion=1e-3 * region.size, rtol=rtol)
    return locate_zeros(f, region)


def run_resonances(cfg: dict, args) -> tuple:
    profile = _profile(cfg)
    n, k = profile.n, profile.k
    l_min, l_max = _l_range(cfg)
    tol = tolerances(cfg)
    _scan_precision(cfg, args)
    region = _region(cfg, tol["zero_tol"])
    found = _parallel_map(_resonance_task, [(profile, l, region, tol["ode_rtol"])
                                            for l in range(l_min, l_max + 1)], args.jobs)
    predictive = profile.c != 0 and 2 * k != n - 1
    rows, zeros, marks = [], [], []
    for l, hits in zip(range(l_min, l_max + 1), found):
        v = l * (l + n - 1)
        alpha = (1 + v) ** -0.5
        if predictive:
            pred, _ = predicted_resonance(n, k, l)
            scale = accumulation_constant(n, k) * alpha ** (1 + 2 * k)
            marks.append(pred)
        for h in hits:
            if predictive:
                ratio = (h.z - accumulation_point(n, k)) / scale
            else:
                pred = ratio = complex(math.nan, math.nan)
            rows.append([l, v, alpha, h.z.real, h.z.imag, h.winding, pred.real, pred.imag,
                         ratio.real, ratio.imag, h.step])
            zeros.append(h.z)
    files = {"resonances.csv": csv_text(ZERO_COLUMNS, rows)}
    if args.svg:
        files["resonances.svg"] = scatter_svg(zeros, marks=[m for m in marks if region.contains(m)],
                                              title=f"zeros of A_l, l={l_min}..{l_max}")
    return files, EXIT_OK


def run_accumulate(cfg: dict, args) -> tuple:
    n, k = _int(cfg, "n"), _int(cfg, "k")
    if 2 * k == n - 1:
        raise ConfigError("accumulate requires 2k != n-1")
    profile = _profile(cfg)
    if profile.c == 0:
        raise ConfigError("accumulate needs a nonzero odd coefficient c")
    l_range = _l_range(cfg)
    tol = tolerances(cfg)
    _scan_precision(cfg, args)
    res = accumulation_experiment(profile, l_range, tol=tol["zero_tol"], rtol=tol["ode_rtol"],
                                  density=_int(cfg, "density", 24), jobs=args.jobs,
                                  fit_from=cfg.get("fit_from"))
    summary = res.fit_summary()
    summary["failures"] = [[l, msg] for l, msg in res.failures]
    files = {"accumulate.csv": csv_text(ZERO_COLUMNS, zero_rows(res.hits)),
             "fit.json": dumps(summary)}
    if args.svg:
        files["accumulate.svg"] = scatter_svg([h.lam for h in res.hits],
                                              marks=[h.predicted for h in res.hits],
                                              vline=accumulation_point(n, k),
                                              title=f"n={n}, k={k}: zeros of A_l")
    return files, EXIT_OK


def run_verify_engine(cfg: dict, args) -> tuple:
    from .verify import CRITERIA, run_verify

    seed = _int(cfg, "seed", 0)
    criteria = cfg.get("criteria", list(CRITERIA))
    if not isinstance(criteria, list) or any(c not in CRITERIA for c in criteria):
        raise ConfigError(f"'criteria' must be a subset of {list(CRITERIA)}")
    l_max = _int(cfg, "l_max", 40)
    if l_max < 12:
        raise ConfigError("'l_max' must be at least 12")
    report, acc = run_verify(criteria, seed=seed, jobs=args.jobs, l_max=l_max)
    hits = [h for k in sorted(acc) for h in acc[k].hits]
    files = {"verify.json": dumps(report), "verify_hits.csv": csv_text(ZERO_COLUMNS, zero_rows(hits))}
    if args.svg and hits:
        files["verify.svg"] = scatter_svg([h.lam for h in hits], marks=[h.predicted for h in hits],
                                          title="accumulating zeros of A_l")
    for c in report["criteria"]:
        print(f"criterion {c['id']} ({c['name']}): {'PASS' if c['passed'] else 'FAIL'}")
    return files, EXIT_OK if report["all_passed"] else EXIT_VERIFY


RUNNERS = {
    "gz": run_gz,
    "normalform": run_normalform,
    "modes": run_modes,
    "resonances": run_resonances,
    "accumulate": run_accumulate,
    "verify": run_verify_engine,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ahscatter", description=__doc__.splitlines()[0])
    ap.add_argument("engine", choices=ENGINES)
    ap.add_argument("--config", type=Path, help="JSON run configuration (optional for verify)")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--svg", action="store_true", help="also write a scatter plot of zeros")
    ap.add_argument("--precision", choices=ESCALATION, help="starting precision for mode solves")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    return ap


def load_config(path: Path | None, engine: str) -> dict:
    if path is None:
        if engine == "verify":
            return {}
        raise ConfigError(f"{engine} needs --config")
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("engine", engine) != engine:
        raise ConfigError(f"config is for engine {cfg['engine']!r}, not {engine!r}")
    return cfg


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(args.config, args.engine)
        files, code = RUNNERS[args.engine](cfg, args)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (args.out / name).write_text(text)
    return code


def main() -> None:
    sys.exit(run())
