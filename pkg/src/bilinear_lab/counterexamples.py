"""Indicator families that witness sharp exponents, and the scan driver.

Two families probe the localized bilinear maximal function:

* ``knapp``: ``f = chi_{B(0, delta)}``, ``g = chi_{B(0, C1 delta)}``, probed on
  the annulus ``1/sqrt(2) <= |x| <= 1/sqrt(2) + eps0`` at ``t = sqrt(2)|x|``;
  the statistic decays like ``delta^{2d-1}``.
* ``annulus``: thin annuli around radius ``1/sqrt(2)``, probed on
  ``|x| <= delta`` at ``t = 1``; the statistic decays like ``delta``.

Supports are a few cells wide, so a fixed-order rule would miss them.  The
probe statistic is therefore evaluated with :func:`adapted_bilinear_average`,
which integrates over the support of ``f`` directly and aims the sphere
nodes at the support of ``g``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .grid import GridFunction, lp_norm, rescale, sample_many
from .maximal import RadiusGrid, bilinear_maximal

__all__ = [
    "Family",
    "ScanRecord",
    "FitResult",
    "knapp_family",
    "annulus_family",
    "scaling_family",
    "adapted_bilinear_average",
    "probe_statistic",
    "run_scan",
    "fit_scaling_exponent",
    "scan_to_csv",
    "scan_summary",
]

INV_SQRT2 = 1 / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class Family:
    """An (f, g) pair with its probe points and the radius used at each."""

    name: str
    d: int
    delta: float
    f: GridFunction
    g: GridFunction
    probes: np.ndarray
    meta: dict = field(default_factory=dict)

    def probe_radius(self, x):
        if self.name == "knapp":
            return math.sqrt(2) * float(np.linalg.norm(x))
        return 1.0


def _default_n(d):
    return 1024 if d == 2 else 128


def _check_resolution(delta, box_length, n):
    h = box_length / n
    if delta < 4 * h - 1e-15:
        raise ValueError(f"delta={delta} under-resolved: need delta >= 4h = {4 * h}")


def _radius_grid(d, n, box_length):
    gf = GridFunction.zeros(d, n, box_length)
    return np.sqrt(sum(m * m for m in gf.mesh()))


def _directions(d, count):
    if d == 2:
        th = 2 * np.pi * (np.arange(count) + 0.125) / count
        return np.stack([np.cos(th), np.sin(th)], 1)
    i = np.arange(count) + 0.5
    z = 1 - 2 * i / count
    phi = np.pi * (1 + 5 ** 0.5) * i
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], 1)


def knapp_constants(eps0):
    """Constants of the Knapp construction for a given ``eps0``.

    ``C3`` bounds ``|sqrt(1 - |y|^2) - 1/sqrt(2)| / delta`` over the
    admissible ``y`` (a Lipschitz bound of ``r -> sqrt(1 - r^2)`` near
    ``1/sqrt(2)``), ``C2 = C3`` and ``C1 = 3 C2 + 1 > 3 C2``.
    """
    scale = 1 + math.sqrt(2) * eps0
    e = eps0 / scale
    r = INV_SQRT2 + e
    if r >= 1:
        raise ValueError("eps0 too large")
    lip = r / math.sqrt(1 - r * r)
    c3 = lip / scale
    c2 = c3
    return {"eps0": eps0, "C3": c3, "C2": c2, "C1": 3 * c2 + 1}


def knapp_family(d, delta, eps0=0.125, box_length=4.0, n=None, n_angles=8,
                 n_radii=3):
    """Ball pair ``chi_{B(0,delta)}, chi_{B(0,C1 delta)}`` and annulus probes."""
    n = n or _default_n(d)
    if not 0 < delta <= eps0:
        raise ValueError("need 0 < delta <= eps0")
    _check_resolution(delta, box_length, n)
    c = knapp_constants(eps0)
    rad = _radius_grid(d, n, box_length)
    f = GridFunction((rad <= delta).astype(float), box_length)
    g = GridFunction((rad <= c["C1"] * delta).astype(float), box_length)
    radii = INV_SQRT2 + eps0 * np.linspace(0, 1, n_radii)
    dirs = _directions(d, n_angles)
    probes = (radii[:, None, None] * dirs[None]).reshape(-1, d)
    meta = {"family": "knapp", "d": d, "n": n, "box_length": box_length, **c}
    return Family("knapp", d, delta, f, g, probes, meta)


def annulus_constants(eps, C1=None):
    """``C2 = 1`` and ``C1`` inside ``(C2 + 1, 2^{-3/2} / eps)``."""
    c2 = 1.0
    hi = 2 ** -1.5 / eps
    if not c2 + 1 < hi:
        raise ValueError("eps too large for an admissible C1")
    if C1 is None:
        C1 = (c2 + 1 + hi) / 2
    if not c2 + 1 < C1 < hi:
        raise ValueError(f"C1 must lie in ({c2 + 1}, {hi})")
    return {"eps": eps, "C2": c2, "C1": float(C1), "C1_upper": hi}


def annulus_family(d, delta, eps=0.125, C1=None, box_length=4.0, n=None,
                   n_angles=4):
    """Thin annuli of widths ``4 delta`` and ``2 C1 delta`` around ``1/sqrt(2)``."""
    n = n or _default_n(d)
    if not 0 < delta <= eps:
        raise ValueError("need 0 < delta <= eps")
    _check_resolution(delta, box_length, n)
    c = annulus_constants(eps, C1)
    rad = _radius_grid(d, n, box_length)
    f = GridFunction((np.abs(rad - INV_SQRT2) <= 2 * delta).astype(float), box_length)
    g = GridFunction((np.abs(rad - INV_SQRT2) <= c["C1"] * delta).astype(float),
                     box_length)
    dirs = _directions(d, n_angles)
    probes = np.concatenate([np.zeros((1, d)), 0.5 * delta * dirs, delta * dirs])
    meta = {"family": "annulus", "d": d, "n": n, "box_length": box_length, **c}
    return Family("annulus", d, delta, f, g, probes, meta)


def scaling_family(f, g, m_list):
    """Pairs ``(f(2^m .), g(2^m .))`` for each ``m``."""
    return [(rescale(f, m), rescale(g, m)) for m in m_list]


# -- support-adapted evaluation ------------------------------------------
def _support_cells(f):
    """Cells (lower-corner indices) on which the interpolant of f is nonzero."""
    a = np.abs(f.values) > 0
    m = a.copy()
    for ax in range(f.d):
        m = m | np.roll(m, -1, axis=ax)
    return np.argwhere(m)


def _sphere_nodes_toward(d, x, s, center, rho, spacing):
    """Nodes and unit-sphere weights on the directions ``w`` with
    ``|x - s w - center| <= rho``, for each radius in ``s``.

    Returns ``(nodes, weights, owner)`` where ``owner`` indexes ``s``.
    """
    v = np.asarray(x) - center
    dist = float(np.linalg.norm(v))
    axis = v / dist if dist > 0 else np.eye(d)[0]
    if d == 3:
        e1 = np.cross(axis, [1.0, 0, 0] if abs(axis[0]) < 0.9 else [0, 1.0, 0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
    nodes, weights, owner = [], [], []
    for i, si in enumerate(s):
        if si <= 0:
            continue
        if dist == 0:
            cosb = -1.0 if si <= rho else 2.0
        else:
            cosb = (dist * dist + si * si - rho * rho) / (2 * dist * si)
        if cosb > 1:
            continue
        beta = math.pi if cosb <= -1 else math.acos(cosb)
        step = spacing / si
        if d == 2:
            m = max(8, int(math.ceil(2 * beta / step)))
            th = math.atan2(axis[1], axis[0]) + beta * (2 * (np.arange(m) + 0.5) / m - 1)
            nodes.append(np.stack([np.cos(th), np.sin(th)], 1))
            weights.append(np.full(m, 2 * beta / m))
            owner.append(np.full(m, i))
            continue
        mt = max(4, int(math.ceil(beta / step)))
        for tj in beta * (np.arange(mt) + 0.5) / mt:
            mp = max(8, int(math.ceil(2 * math.pi * math.sin(tj) / step)))
            ph = 2 * np.pi * np.arange(mp) / mp
            ring = (math.cos(tj) * axis[None]
                    + math.sin(tj) * (np.cos(ph)[:, None] * e1 + np.sin(ph)[:, None] * e2))
            nodes.append(ring)
            weights.append(np.full(mp, 2 * np.pi * math.sin(tj) * (beta / mt) / mp))
            owner.append(np.full(mp, i))
    if not nodes:
        return np.zeros((0, d)), np.zeros(0), np.zeros(0, dtype=int)
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(owner)


def _support_ball(g):
    idx = np.argwhere(np.abs(g.values) > 0)
    if idx.size == 0:
        return None, 0.0
    lo = g.axis[idx.min(0)]
    hi = g.axis[idx.max(0)]
    center = (lo + hi) / 2
    rho = float(np.linalg.norm(hi - lo) / 2 + 2 * g.h)
    return center, rho


def sphere_average_adapted(g, x, s, spacing=None):
    """``int_{S^{d-1}} g(x - s w) d sigma(w)`` for each radius in ``s``,
    with nodes only on the directions that can reach the support of g."""
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    out = np.zeros(s.size)
    center, rho = _support_ball(g)
    if center is None:
        return out
    spacing = spacing or g.h / 4
    nodes, w, owner = _sphere_nodes_toward(g.d, x, s, center, rho, spacing)
    if w.size == 0:
        return out
    pts = np.asarray(x)[None, :] - s[owner][:, None] * nodes
    vals = sample_many(g, pts).real
    np.add.at(out, owner, w * vals)
    return out


def adapted_bilinear_average(f, g, x, t, sub=2, s_step=None):
    """Sliced bilinear average of ``|f|, |g|`` at one point and radius.

    With ``u = x - t y`` the outer ball integral becomes an integral over
    the support of ``f``:

        A = t^{-d} int f(u) (1 - |y|^2)^{(d-2)/2} G(x, t sqrt(1 - |y|^2)) du,

    where ``G(x, s)`` is the sphere average of ``g``.  The ``u`` integral
    uses ``sub^d`` midpoints per cell, which integrates the multilinear
    interpolant of ``f`` exactly on each cell; ``G`` is tabulated in ``s``
    and interpolated linearly.
    """
    d = f.d
    x = np.asarray(x, dtype=np.float64)
    cells = _support_cells(f)
    if cells.size == 0:
        return 0.0
    sub_off = (np.arange(sub) + 0.5) / sub
    grid = np.stack(np.meshgrid(*([sub_off] * d), indexing="ij"), -1).reshape(-1, d)
    u_cells = (cells[:, None, :] + grid[None]).reshape(-1, d)
    u = -f.box_length / 2 + u_cells * f.h
    y = (x[None, :] - u) / t
    r2 = np.sum(y * y, axis=1)
    keep = r2 < 1
    u, r2 = u[keep], r2[keep]
    if u.size == 0:
        return 0.0
    fu = np.abs(sample_many(f, u).real)
    nz = fu > 0
    u, r2, fu = u[nz], r2[nz], fu[nz]
    if fu.size == 0:
        return 0.0
    c = np.sqrt(1 - r2)
    s = t * c
    s_step = s_step or f.h / 8
    s_lo, s_hi = float(s.min()), float(s.max())
    m = max(2, int(math.ceil((s_hi - s_lo) / s_step)) + 1)
    s_tab = np.linspace(s_lo, s_hi, m) if s_hi > s_lo else np.array([s_lo, s_lo + 1e-12])
    g_abs = g.abs()
    G_tab = sphere_average_adapted(g_abs, x, s_tab)
    G = np.interp(s, s_tab, G_tab)
    weight = c ** (d - 2) if d != 2 else 1.0
    vol = (f.h / sub) ** d
    return float(np.sum(fu * weight * G) * vol / t ** d)


def probe_statistic(family, sub=2):
    """Minimum of the adapted average over the probe set; also per probe."""
    vals = np.array([adapted_bilinear_average(family.f, family.g, x,
                                              family.probe_radius(x), sub)
                     for x in family.probes])
    return float(vals.min()), vals


# -- scans ----------------------------------------------------------------
@dataclass(frozen=True)
class ScanRecord:
    """One row of a sweep: parameter value, measured ratio and provenance."""

    parameter: float
    ratio: float
    meta: dict = field(default_factory=dict)
    norm_p: float | None = None
    norm_q: float | None = None

    def __post_init__(self):
        if not self.parameter > 0:
            raise ValueError("parameter must be positive")
        if not self.ratio >= 0:
            raise ValueError("ratio must be nonnegative")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    stderr: float = 0.0

    def __iter__(self):
        return iter((self.slope, self.intercept, self.r_squared))

    def ci95(self, n_points):
        if n_points <= 2:
            return (self.slope, self.slope)
        q = stats.t.ppf(0.975, n_points - 2)
        return (self.slope - q * self.stderr, self.slope + q * self.stderr)


def fit_scaling_exponent(records):
    """Least-squares slope of ``log(ratio)`` against ``log(parameter)``."""
    if len(records) < 3:
        raise ValueError("need at least 3 records")
    p = np.array([r.parameter for r in records], dtype=float)
    q = np.array([r.ratio for r in records], dtype=float)
    if np.any(q <= 0):
        raise ValueError("ratios must be positive")
    lx, ly = np.log(p), np.log(q)
    if np.ptp(ly) == 0:
        return FitResult(0.0, float(ly[0]), 1.0, 0.0)
    res = stats.linregress(lx, ly)
    return FitResult(float(res.slope), float(res.intercept), float(res.rvalue ** 2),
                     float(res.stderr))


def _exp_meta(exponents):
    if exponents is None:
        return None
    return {"d": exponents.d, "up": str(exponents.up), "uq": str(exponents.uq),
            "ur": str(exponents.ur)}


def run_scan(family, operator="probe", exponents=None, params=(), base_pair=None,
             radii=None, order=8, **family_kw):
    """Sweep a family over ``params`` and return one :class:`ScanRecord` each.

    Parameters
    ----------
    family : {"knapp", "annulus", "scaling"}
    operator : str
        ``"probe"`` for the lower-bound statistic of the indicator families;
        ``"bilinear"`` for the norm ratio of the maximal function in a
        scaling scan.
    exponents : ExponentPoint, optional
        Lebesgue exponents for norm ratios (required for ``"scaling"``).
    params : sequence
        ``delta`` values, or dyadic powers ``m`` for ``"scaling"`` (the
        recorded parameter is the length scale ``2^{-m}``).
    base_pair : (GridFunction, GridFunction)
        Unscaled pair for ``"scaling"``.
    radii : RadiusGrid
        Radius grid at ``m = 0`` for ``"scaling"``; rescaled by ``2^{-m}``.
    """
    params = list(params)
    if not params:
        return []
    records = []
    if family in ("knapp", "annulus"):
        if operator != "probe":
            raise ValueError("indicator families support the 'probe' operator")
        make = knapp_family if family == "knapp" else annulus_family
        d = family_kw.pop("d", 2)
        for delta in params:
            fam = make(d, float(delta), **family_kw)
            stat, _ = probe_statistic(fam)
            meta = dict(fam.meta)
            meta["exponents"] = _exp_meta(exponents)
            nf = lp_norm(fam.f, exponents.up) if exponents else None
            ng = lp_norm(fam.g, exponents.uq) if exponents else None
            records.append(ScanRecord(float(delta), stat, meta, nf, ng))
        return records
    if family == "scaling":
        if exponents is None or base_pair is None or radii is None:
            raise ValueError("scaling scans need exponents, base_pair and radii")
        f0, g0 = base_pair
        for m, (f, g) in zip(params, scaling_family(f0, g0, params)):
            rg = radii.scaled(math.ldexp(1.0, -int(m)))
            if operator != "bilinear":
                raise ValueError("scaling scans support the 'bilinear' operator")
            out = bilinear_maximal(f, g, rg, order).values
            nf, ng = lp_norm(f, exponents.up), lp_norm(g, exponents.uq)
            ratio = lp_norm(out, exponents.ur) / (nf * ng)
            meta = {"family": "scaling", "d": f0.d, "n": f0.n,
                    "box_length": f0.box_length, "order": order,
                    "exponents": _exp_meta(exponents)}
            records.append(ScanRecord(math.ldexp(1.0, -int(m)), ratio, meta, nf, ng))
        return records
    raise ValueError(f"unknown family {family!r}")


def scan_to_csv(records, fit=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "d", "param", "statistic", "norm_p", "norm_q", "n", "L"])
    for r in records:
        w.writerow([r.meta.get("family"), r.meta.get("d"), repr(r.parameter),
                    repr(r.ratio), "" if r.norm_p is None else repr(r.norm_p),
                    "" if r.norm_q is None else repr(r.norm_q), r.meta.get("n"),
                    r.meta.get("box_length")])
    if fit is not None:
        buf.write(f"# slope={fit.slope!r},intercept={fit.intercept!r},"
                  f"r_squared={fit.r_squared!r}\n")
    return buf.getvalue()


def scan_summary(records, fit):
    lo, hi = fit.ci95(len(records))
    meta = dict(records[0].meta) if records else {}
    return json.dumps({"slope": fit.slope, "intercept": fit.intercept,
                       "r_squared": fit.r_squared, "ci95": [lo, hi],
                       "n_records": len(records), "meta": meta},
                      sort_keys=True, default=str)

