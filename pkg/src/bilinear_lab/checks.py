"""Acceptance checks shared by the command line and the test suite.

Each check returns a :class:`CheckResult` with the measured value, the
tolerance it is held to and the parameters that produced it.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exponents as ex
from .bochner_riesz import (br_bilinear, br_multiplier, dyadic_profile_decomposition,
                            kernel_decay_check, lo_square_function,
                            mixed_square_function, multiplier_partition_check,
                            pair_sum_oracle)
from .counterexamples import ScanRecord, fit_scaling_exponent, run_scan
from .grid import GridFunction, lp_norm
from .maximal import RadiusGrid, pointwise_domination_report
from .profiles import profile_corpus
from .spherical import direct_bilinear_average, sliced_bilinear_average

__all__ = [
    "CheckResult",
    "band_limited_function",
    "random_compact_function",
    "analytic_pairs",
    "check_slicing",
    "check_domination",
    "check_knapp",
    "check_annulus",
    "check_holder_scaling",
    "check_plancherel",
    "check_reconstruction",
    "check_partition",
    "check_kernel_decay",
    "check_exponents",
    "check_br_oracle",
    "check_mixed_slope",
    "ALL_CHECKS",
    "run_all",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: value={self.value:.6g} ({self.tolerance}), {self.seconds:.1f}s"

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "value": self.value,
                "tolerance": self.tolerance, "details": self.details}


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        limit = res.details.get("time_limit")
        if limit is not None and res.seconds > limit:
            res.passed = False
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- corpora ---------------------------------------------------------------
def band_limited_function(rng, d, n, box_length, kmax, real=False):
    """Random trigonometric polynomial with integer modes ``|k_i| <= kmax``."""
    k = np.fft.fftfreq(n, 1.0 / n)
    mask = np.ones((n,) * d, dtype=bool)
    for ax in range(d):
        shape = [1] * d
        shape[ax] = n
        mask &= (np.abs(k) <= kmax).reshape(shape)
    c = np.zeros((n,) * d, dtype=np.complex128)
    m = int(mask.sum())
    c[mask] = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    vals = np.fft.ifftn(c) * n ** d / m
    if real:
        vals = vals.real
    return GridFunction(vals, box_length, periodic=True)


def random_compact_function(rng, d, n, box_length, margin):
    """Nonnegative random values on the central nodes, zero within ``margin``
    nodes of the boundary."""
    vals = np.zeros((n,) * d)
    core = tuple(slice(margin, n - margin) for _ in range(d))
    vals[core] = rng.random(vals[core].shape)
    return GridFunction(vals, box_length)


def analytic_pairs(d, n, box_length):
    """Five smooth pairs: Gaussians, constants, plane waves and mixtures."""
    def gauss(c, s):
        return lambda *x: np.exp(-sum((xi - ci) ** 2 for xi, ci in zip(x, c)) / (2 * s * s))

    L = box_length

    def wave(kvec):
        return lambda *x: np.exp(2j * np.pi * sum(k * xi for k, xi in zip(kvec, x)) / L)

    z = [0.0] * d
    shift = [0.2] + [0.0] * (d - 1)
    one = [1] + [0] * (d - 1)
    two = [0] * (d - 1) + [2]

    def mk(fn):
        return GridFunction.from_function(fn, d, n, L, periodic=True)

    return [
        ("gauss-gauss", mk(gauss(z, 0.6)), mk(gauss(shift, 0.5))),
        ("const-const", GridFunction.constant(1.0, d, n, L), GridFunction.constant(1.0, d, n, L)),
        ("wave-wave", mk(wave(one)), mk(wave(two))),
        ("gauss-wave", mk(gauss(shift, 0.7)), mk(wave(one))),
        ("cos-sin", mk(lambda *x: np.cos(2 * np.pi * x[0] / L)),
         mk(lambda *x: np.sin(2 * np.pi * x[-1] / L) + 2)),
    ]


# -- individual checks ----------------------------------------------------
@_timed
def check_slicing(seed=0, d=2, n=64, order=12, box_length=8.0, kmax=2,
                  n_random=20, points_per_pair=3, tol=1e-6, time_limit=60.0):
    """Direct ``S^{2d-1}`` rule vs. ball-times-sphere slicing.

    The error is measured relative to the same average of ``|f|, |g|``.
    """
    rng = np.random.default_rng(seed)
    pairs = [(f"random-{i}", band_limited_function(rng, d, n, box_length, kmax),
              band_limited_function(rng, d, n, box_length, kmax)) for i in range(n_random)]
    pairs += analytic_pairs(d, n, box_length)
    worst, per_pair = 0.0, {}
    for name, f, g in pairs:
        err = 0.0
        for _ in range(points_per_pair):
            x = rng.uniform(-0.5, 0.5, d)
            t = rng.uniform(0.25, 1.0)
            a = direct_bilinear_average(f, g, x, t, order=order, method="spectral")
            b = sliced_bilinear_average(f, g, x, t, order=order, method="spectral")
            scale = direct_bilinear_average(f, g, x, t, order=order, method="spectral",
                                            absolute=True)
            err = max(err, abs(a - b) / scale)
        per_pair[name] = err
        worst = max(worst, err)
    return CheckResult("slicing identity", worst <= tol, worst, f"max rel <= {tol:g}",
                       {"d": d, "n": n, "order": order, "L": box_length, "kmax": kmax,
                        "n_pairs": len(pairs), "per_pair": per_pair, "seed": seed,
                        "time_limit": time_limit})


@_timed
def check_domination(seed=0, n_pairs=50, d=2, n=32, box_length=8.0, order=8,
                     time_limit=120.0):
    """``M(f,g) <= vol(B) Mf Sg`` and its mirror at every node."""
    rng = np.random.default_rng(seed)
    radii = RadiusGrid.global_dyadic(-3, 0, 8)
    margin = int(math.ceil(radii.max_radius / (box_length / n))) + 2
    worst = 0.0
    for _ in range(n_pairs):
        f = random_compact_function(rng, d, n, box_length, margin)
        g = random_compact_function(rng, d, n, box_length, margin)
        rep = pointwise_domination_report(f, g, radii, order)
        worst = max(worst, rep.max_ratio, rep.max_ratio_swapped)
    tol = 1 + 1e-12
    return CheckResult("pointwise domination", worst <= tol, worst, f"ratio <= {tol!r}",
                       {"d": d, "n": n, "L": box_length, "order": order,
                        "n_pairs": n_pairs, "n_radii": len(radii), "seed": seed,
                        "time_limit": time_limit})


_DELTAS = [2.0 ** -k for k in range(3, 7)]


@_timed
def check_knapp(deltas=None, d=2, target=3.0, tol=0.2):
    recs = run_scan("knapp", params=deltas or _DELTAS, d=d)
    fit = fit_scaling_exponent(recs)
    return CheckResult("knapp slope", abs(fit.slope - target) <= tol, fit.slope,
                       f"{target} +/- {tol}",
                       {"r_squared": fit.r_squared,
                        "ratios": [r.ratio for r in recs], **_grid_meta(recs)})


@_timed
def check_annulus(deltas=None, d=2, target=1.0, tol=0.15):
    recs = run_scan("annulus", params=deltas or _DELTAS, d=d)
    fit = fit_scaling_exponent(recs)
    return CheckResult("annulus slope", abs(fit.slope - target) <= tol, fit.slope,
                       f"{target} +/- {tol}",
                       {"r_squared": fit.r_squared,
                        "ratios": [r.ratio for r in recs], **_grid_meta(recs)})


def _grid_meta(recs):
    m = recs[0].meta
    return {k: m[k] for k in ("d", "n", "box_length", "C1") if k in m}


@_timed
def check_holder_scaling(seed=0, d=2, n=32, box_length=8.0, m_list=(-1, 0, 1, 2)):
    """Norm ratios under ``f -> f(2^m .)``: constant on the Hoelder line,
    slope ``d (ur - up - uq)`` against ``2^{-m}`` otherwise."""
    rng = np.random.default_rng(seed)
    radii = RadiusGrid.global_dyadic(-3, 0, 8)
    margin = int(math.ceil(radii.max_radius / (box_length / n))) + 2
    pair = (random_compact_function(rng, d, n, box_length, margin),
            random_compact_function(rng, d, n, box_length, margin))
    holder = ex.ExponentPoint(d, Fraction(1, 2), Fraction(1, 2), Fraction(1))
    off = ex.ExponentPoint(d, Fraction(1, 2), Fraction(1, 4), Fraction(1, 2))
    rec_h = run_scan("scaling", "bilinear", holder, m_list, base_pair=pair, radii=radii)
    rec_o = run_scan("scaling", "bilinear", off, m_list, base_pair=pair, radii=radii)
    r = np.array([x.ratio for x in rec_h])
    spread = float(np.max(np.abs(r / r[0] - 1)))
    fit = fit_scaling_exponent(rec_o)
    expect = float(d * (off.ur - off.up - off.uq))
    slope_err = abs(fit.slope - expect)
    ok = spread <= 1e-10 and slope_err <= 1e-6
    return CheckResult("hoelder scaling", ok, max(spread, slope_err),
                       "spread <= 1e-10, |slope - d*delta| <= 1e-6",
                       {"spread": spread, "slope": fit.slope, "expected_slope": expect,
                        "m": list(m_list), "n": n, "L": box_length, "seed": seed})


@_timed
def check_plancherel(seed=0, n_f=20, d=2, n=32, box_length=8.0, deltas=None):
    """``||S_delta f||_2 <= sqrt(2 delta) ||f||_2`` over corpus and inputs."""
    rng = np.random.default_rng(seed)
    deltas = deltas or [2.0 ** -k for k in range(2, 8)]
    fs = [GridFunction(rng.standard_normal((n,) * d), box_length, periodic=True)
          for _ in range(n_f)]
    worst, violations, total = 0.0, 0, 0
    for phi in profile_corpus():
        for f in fs:
            nf = lp_norm(f, 0.5)
            for delta in deltas:
                s = lo_square_function(f, phi, delta)
                ratio = lp_norm(s, 0.5) / (math.sqrt(2 * delta) * nf)
                worst = max(worst, ratio)
                violations += ratio > 1
                total += 1
    return CheckResult("plancherel square bound", violations == 0, worst,
                       "max ratio <= 1, zero violations",
                       {"violations": violations, "cases": total, "n": n,
                        "L": box_length, "seed": seed})


@_timed
def check_reconstruction(alphas=(0.5, 1.0, 2.0), J=10):
    worst = 0.0
    res = {}
    ok = True
    for a in alphas:
        dec = dyadic_profile_decomposition(a, J)
        res[str(a)] = dec.residual
        ok &= dec.residual <= 2 * 2.0 ** (-J * a)
        worst = max(worst, dec.residual / 2.0 ** (-J * a))
    return CheckResult("profile reconstruction", bool(ok), worst,
                       "residual <= 2 * 2^(-J alpha)", {"J": J, "residuals": res})


@_timed
def check_partition(delta=0.125, eps=0.25, n=32, tol=1e-10):
    rep = multiplier_partition_check(delta, eps, n=n)
    ok = rep.sup_error <= tol and rep.active_cells <= rep.cell_bound
    return CheckResult("multiplier partition", ok, rep.sup_error, f"sup <= {tol:g}",
                       {"active_cells": rep.active_cells, "cell_bound": rep.cell_bound,
                        "max_cells_per_pair": rep.max_cells_per_pair, "n": n,
                        "lam": rep.lam})


@_timed
def check_kernel_decay(deltas=None, d=2):
    deltas = deltas or [2.0 ** -k for k in range(3, 7)]
    phi = profile_corpus()[0]
    consts = [kernel_decay_check(phi, dl, d=d).constant for dl in deltas]
    ratios = [b / a for a, b in zip(consts, consts[1:])]
    worst = max(max(r, 1 / r) for r in ratios)
    return CheckResult("kernel decay", worst <= 4, worst, "consecutive ratio in [1/4, 4]",
                       {"constants": consts, "d": d})


def _thm_global(pt):
    """Strong bound per the global characterization: True/False."""
    d = pt.d
    excluded = (pt.up, pt.uq) in ((1, 0), (0, 1)) and pt.ur == 1
    return pt.up + pt.uq == pt.ur and pt.ur < Fraction(2 * d - 1, d) and not excluded


def _thm_local(pt):
    """True (holds), False (fails) or None (not decided) per the localized theorem."""
    d, s, ur = pt.d, pt.up + pt.uq, pt.ur
    cap = min(Fraction(2 * d - 1, d), 1 + d * ur)
    if ur == 0:
        return s <= 1
    if s < ur or s > cap:
        return False
    if (ur >= Fraction(1, d) or ur <= Fraction(d - 2, d * (d - 1))) and s < cap:
        return True
    return None


@_timed
def check_exponents():
    issues = []
    for d in range(2, 9):
        v = ex.alpha_star(Fraction(1, 2), Fraction(1, 2), 1 / ex.p_s(d), d).value
        if v != 1:
            issues.append(f"alpha*(2,2) = {v} at d = {d}")
    for d, want in ((2, Fraction(4)), (3, Fraction(10, 3)), (4, Fraction(3))):
        if ex.p_s(d) != want:
            issues.append(f"p_s({d}) = {ex.p_s(d)}")
    vals = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3),
            Fraction(3, 4), Fraction(1)]
    urs = sorted(set(vals + [Fraction(4, 3), Fraction(3, 2), Fraction(5, 3), Fraction(2),
                             Fraction(5, 4), Fraction(7, 4)]))
    n_points = 0
    for d in (2, 3, 4):
        for up in vals:
            for uq in vals:
                for ur in sorted(set(urs + [up + uq])):
                    pt = ex.ExponentPoint(d, up, uq, ur)
                    n_points += 1
                    g = ex.global_region(pt)
                    if g != ex.global_region(pt.swapped()):
                        issues.append(f"global asymmetric at {pt}")
                    thm = _thm_global(pt)
                    if thm and g.status != ex.BOUNDED:
                        issues.append(f"global {g.status} where bound holds: {pt}")
                    if not thm and g.status == ex.BOUNDED:
                        issues.append(f"global Bounded where bound fails: {pt}")
                    loc = ex.localized_region(pt)
                    tl = _thm_local(pt)
                    if tl is True and loc.status == ex.UNBOUNDED:
                        issues.append(f"local Unbounded where bound holds: {pt}")
                    if tl is False and loc.status == ex.BOUNDED:
                        issues.append(f"local Bounded where bound fails: {pt}")
                    if g.status == ex.BOUNDED and loc.status != ex.BOUNDED:
                        issues.append(f"global Bounded but local {loc.status}: {pt}")
    return CheckResult("exponent calculus", not issues, float(len(issues)),
                       "zero contradictions",
                       {"grid_points": n_points, "issues": issues[:20]})


@_timed
def check_br_oracle(seed=0, d=2, n=32, box_length=8.0, kmax=6, alpha=1.0,
                    lams=(0.3, 0.6, 1.0), n_points=8, tol=1e-9):
    rng = np.random.default_rng(seed)
    f = band_limited_function(rng, d, n, box_length, kmax)
    g = band_limited_function(rng, d, n, box_length, kmax)
    worst = 0.0
    for lam in lams:
        h = br_bilinear(f, g, alpha, lam)
        idx = rng.integers(0, n, (n_points, d))
        ref = pair_sum_oracle(f, g, br_multiplier(alpha, lam), idx)
        got = h.values[tuple(idx.T)]
        worst = max(worst, float(np.max(np.abs(got - ref) / np.abs(ref))))
    return CheckResult("bilinear BR oracle", worst <= tol, worst, f"rel <= {tol:g}",
                       {"n": n, "L": box_length, "alpha": alpha, "lams": list(lams),
                        "seed": seed})


@_timed
def check_mixed_slope(seed=0, d=2, n=32, box_length=8.0, deltas=None, floor=-0.1):
    rng = np.random.default_rng(seed)
    deltas = deltas or [2.0 ** -k for k in range(3, 8)]
    f = GridFunction(rng.standard_normal((n,) * d), box_length, periodic=True)
    nf = lp_norm(f, 0.5)
    slopes = {}
    for phi in profile_corpus():
        recs = [ScanRecord(dl, lp_norm(mixed_square_function(f, phi, dl).sup, 0.5) / nf)
                for dl in deltas]
        slopes[phi.name] = fit_scaling_exponent(recs).slope
    worst = min(slopes.values())
    return CheckResult("mixed square slope", worst >= floor, worst, f"slope >= {floor}",
                       {"slopes": slopes, "n": n, "L": box_length, "seed": seed})


ALL_CHECKS = {
    "slicing": check_slicing,
    "domination": check_domination,
    "knapp": check_knapp,
    "annulus": check_annulus,
    "holder": check_holder_scaling,
    "plancherel": check_plancherel,
    "reconstruction": check_reconstruction,
    "partition": check_partition,
    "kernel": check_kernel_decay,
    "exponents": check_exponents,
    "br-oracle": check_br_oracle,
    "mixed-slope": check_mixed_slope,
}

_SEEDED = {"slicing", "domination", "holder", "plancherel", "br-oracle", "mixed-slope"}


def run_all(seed=0, names=None):
    out = []
    for name in names or ALL_CHECKS:
        fn = ALL_CHECKS[name]
        out.append(fn(seed=seed) if name in _SEEDED else fn())
    return out


def results_json(results):
    return json.dumps({"passed": all(r.passed for r in results),
                       "checks": [r.to_dict() for r in results]},
                      sort_keys=True, default=str)
