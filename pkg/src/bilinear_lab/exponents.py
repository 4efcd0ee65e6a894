"""Exponent calculus and boundedness classifiers.

Everything is in reciprocal form (``up = 1/p``, so ``p = inf`` is ``0``) and
uses :class:`fractions.Fraction` so that boundary points are decided
exactly.  Floats are accepted but converted exactly; pass strings such as
``"3/2"`` to avoid binary rounding.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "ExponentPoint",
    "RegionVerdict",
    "AlphaStar",
    "BOUNDED",
    "UNBOUNDED",
    "WEAK_LORENTZ",
    "OPEN",
    "to_fraction",
    "reciprocal",
    "alpha_critical",
    "alpha_star",
    "p_s",
    "global_region",
    "localized_region",
    "delta_region",
    "delta_vertices",
    "br_maximal_necessity",
    "sufficient_alpha",
]

BOUNDED = "Bounded"
UNBOUNDED = "Unbounded"
WEAK_LORENTZ = "WeakLorentz"
OPEN = "Open"

CITE_GLOBAL = "Theorem 1.1"
CITE_LOCAL = "Theorem 3.1"
CITE_LOCAL_SUFF = "Proposition 3.2"
CITE_LOCAL_NEC = "Proposition 3.3"
CITE_DELTA = "Theorem 3.4"
CITE_BR = "Bochner-Riesz maximal necessity"


def to_fraction(x):
    """Exact rational from an int, Fraction, float or string like ``"3/2"``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "oo"):
            raise ValueError("infinite value has no rational form")
        return Fraction(s)
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("infinite value has no rational form")
    return Fraction(x)


def reciprocal(p):
    """``1/p`` with ``p = inf`` (or ``"inf"``) mapped to 0."""
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "oo"):
        return Fraction(0)
    if isinstance(p, float) and math.isinf(p):
        return Fraction(0)
    p = to_fraction(p)
    if p <= 0:
        raise ValueError("exponent must be positive")
    return 1 / p


@dataclass(frozen=True)
class ExponentPoint:
    """Dimension plus reciprocal exponents ``up, uq, ur``."""

    d: int
    up: Fraction
    uq: Fraction
    ur: Fraction
    lorentz_s: Fraction | None = None
    lorentz_t: Fraction | None = None
    lorentz_u: Fraction | None = None

    def __post_init__(self):
        for name in ("up", "uq", "ur"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if not (0 <= self.up <= 1 and 0 <= self.uq <= 1):
            raise ValueError("up and uq must lie in [0, 1]")
        if self.ur < 0:
            raise ValueError("ur must be nonnegative")

    @classmethod
    def from_exponents(cls, d, p, q, r):
        """Build from ``p, q, r`` themselves (``"inf"`` allowed)."""
        return cls(int(d), reciprocal(p), reciprocal(q), reciprocal(r))

    @property
    def holder(self):
        return abs(self.up + self.uq - self.ur) <= Fraction(1, 10 ** 12)

    @property
    def total(self):
        return self.up + self.uq

    def swapped(self):
        return ExponentPoint(self.d, self.uq, self.up, self.ur,
                             self.lorentz_t, self.lorentz_s, self.lorentz_u)


@dataclass(frozen=True)
class RegionVerdict:
    status: str
    case_tag: str | None = None
    citation: str | None = None
    lorentz: dict | None = field(default=None, compare=False)

    def to_dict(self):
        return {"status": self.status, "case_tag": self.case_tag,
                "citation": self.citation, "lorentz": self.lorentz}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def alpha_critical(up, d):
    """``max(d |up - 1/2| - 1/2, 0)``."""
    up = to_fraction(up)
    if not 0 <= up <= 1:
        raise ValueError("up must lie in [0, 1]")
    return max(d * abs(up - Fraction(1, 2)) - Fraction(1, 2), Fraction(0))


@dataclass(frozen=True)
class AlphaStar:
    value: Fraction
    region: str
    tie: bool = False
    branches: dict = field(default_factory=dict, compare=False)


def alpha_star(up, uq, nu, d):
    """Piecewise threshold over ``[0, 1/2]^2`` split by ``nu``.

    ``D1 = {u, v <= nu}``, ``D2 = {u, v >= nu}`` and ``D3`` the rest.  When a
    point lies in both ``D1`` and ``D2`` (``u = v = nu``) the tie flag is set and
    both branch values are reported; the returned value is the ``D1`` one.
    """
    up, uq, nu = to_fraction(up), to_fraction(uq), to_fraction(nu)
    half = Fraction(1, 2)
    if not (0 <= up <= half and 0 <= uq <= half):
        raise ValueError("up and uq must lie in [0, 1/2]")
    if not 0 <= nu <= Fraction(d - 1, 2 * d):
        raise ValueError("nu must lie in [0, (d-1)/(2d)]")
    a_nu = alpha_critical(nu, d)
    in1 = up <= nu and uq <= nu
    in2 = up >= nu and uq >= nu
    branches = {}
    if in1:
        branches["D1"] = d * (1 - up - uq)
    if in2:
        branches["D2"] = 1 + 2 * (1 - up - uq) * a_nu / (1 - 2 * nu)
    if not (in1 or in2):
        branches["D3"] = (1 + max(alpha_critical(up, d), alpha_critical(uq, d))
                          + a_nu * min((1 - 2 * up), (1 - 2 * uq)) / (1 - 2 * nu))
    region = "D1" if in1 else ("D2" if in2 else "D3")
    return AlphaStar(branches[region], region, in1 and in2, branches)


def p_s(d):
    """``min(p0(d), 2(d+2)/d)`` with ``p0 = 2 + 12/(4d - 6 - k)``, ``k = d mod 3``;
    a nonpositive denominator makes ``p0`` infinite."""
    if d < 2:
        raise ValueError("d must be at least 2")
    k = d % 3
    den = 4 * d - 6 - k
    second = Fraction(2 * (d + 2), d)
    if den <= 0:
        return second
    return min(2 + Fraction(12, den), second)


def _sym(pt, test):
    return test(pt.up, pt.uq) or test(pt.uq, pt.up)


def global_region(pt):
    """Strong-type ``L^p x L^q -> L^r`` verdict for the full maximal operator.

    Strong bounds hold exactly for Hoelder triples with ``ur < (2d-1)/d``
    minus ``(1, inf, 1)`` and ``(inf, 1, 1)``.  At those two triples and on
    the critical line ``ur = (2d-1)/d`` the weak Lorentz estimates known in
    the literature are attached; the strong bound still fails.
    """
    d = pt.d
    crit = Fraction(2 * d - 1, d)
    if not pt.holder:
        return RegionVerdict(UNBOUNDED, "holder", CITE_GLOBAL)
    if _sym(pt, lambda a, b: a == 1 and b == 0):
        lor = {"s": 1, "t": "inf", "u": "inf"} if pt.up == 1 else \
              {"s": "inf", "t": 1, "u": "inf"}
        return RegionVerdict(UNBOUNDED, "a", CITE_GLOBAL, lor)
    if pt.ur < crit:
        return RegionVerdict(BOUNDED, None, CITE_GLOBAL)
    if pt.ur == crit and d >= 3:
        q_b = Fraction(d - 1, d)
        if _sym(pt, lambda a, b: a == 1 and b == q_b):
            return RegionVerdict(WEAK_LORENTZ, "b", CITE_GLOBAL,
                                 {"s": 1, "t": 1, "u": "inf"})
        if _sym(pt, lambda a, b: q_b < a < 1):
            return RegionVerdict(WEAK_LORENTZ, "c", CITE_GLOBAL,
                                 {"u": "inf", "constraint": f"1/s + 1/t = {crit}, s, t > 0"})
    if pt.ur == crit:
        return RegionVerdict(UNBOUNDED, "critical", CITE_GLOBAL, {"status": OPEN})
    return RegionVerdict(UNBOUNDED, "r<=d/(2d-1)", CITE_GLOBAL)


def _prop_sufficient(pt):
    d, s, ur = pt.d, pt.total, pt.ur
    if d == 2:
        strict = ur < Fraction(3, 2) and ur <= s < min(1 + ur, Fraction(3, 2))
        equal = s == 1 + ur and ur < Fraction(1, 2)
    else:
        strict = (ur < Fraction(2 * d - 1, d) and ur <= s
                  < min(1 + d * ur, Fraction(2 * d - 1, d), ur + Fraction(2 * (d - 1), d)))
        equal = s == 1 + ur and ur == 0
    return strict, equal


def localized_region(pt):
    """Verdict for the maximal operator with radii restricted to ``[1, 2]``."""
    d, s, ur = pt.d, pt.total, pt.ur
    crit = Fraction(2 * d - 1, d)
    if ur == 0:
        status = BOUNDED if s <= 1 else UNBOUNDED
        return RegionVerdict(status, "r=inf", CITE_LOCAL)
    if s < ur or s > min(crit, 1 + d * ur):
        return RegionVerdict(UNBOUNDED, None, CITE_LOCAL_NEC)
    strict, equal = _prop_sufficient(pt)
    if strict or equal:
        return RegionVerdict(BOUNDED, "equality" if equal and not strict else None,
                             CITE_LOCAL_SUFF)
    r_ok = ur >= Fraction(1, d) or ur <= Fraction(d - 2, d * (d - 1))
    if r_ok and s < min(crit, 1 + d * ur):
        return RegionVerdict(BOUNDED, None, CITE_LOCAL)
    return RegionVerdict(OPEN, None, CITE_LOCAL)


def delta_vertices(d):
    """Vertices ``V1..V4`` of the region for the localized linear operator."""
    return (
        (Fraction(0), Fraction(0)),
        (Fraction(d - 1, d), Fraction(d - 1, d)),
        (Fraction(d - 1, d), Fraction(1, d)),
        (Fraction(d * d - d, d * d + 1), Fraction(d - 1, d * d + 1)),
    )


def _in_polygon(pts, p):
    n = len(pts)
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if a == b:
            continue
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cross < 0:
            return False
    return True


def delta_region(d, u, v):
    """``L^p -> L^q`` verdict for the localized linear spherical maximal
    operator at ``(u, v) = (1/p, 1/q)``."""
    u, v = to_fraction(u), to_fraction(v)
    if not (0 <= u <= 1 and 0 <= v <= 1):
        raise ValueError("u and v must lie in [0, 1]")
    v1, v2, v3, v4 = delta_vertices(d)
    poly = [v1, v4, v3, v2]
    p = (u, v)
    if not _in_polygon(poly, p):
        return RegionVerdict(UNBOUNDED, "outside", CITE_DELTA)
    if p == v2:
        if d >= 3:
            return RegionVerdict(WEAK_LORENTZ, "V2", CITE_DELTA, {"type": "restricted weak"})
        return RegionVerdict(UNBOUNDED, "V2", CITE_DELTA)
    if p == v3:
        return RegionVerdict(WEAK_LORENTZ, "V3", CITE_DELTA, {"type": "restricted weak"})
    if p == v4:
        return RegionVerdict(WEAK_LORENTZ, "V4", CITE_DELTA, {"type": "restricted weak"})
    return RegionVerdict(BOUNDED, "Delta(d)", CITE_DELTA)


def br_maximal_necessity(alpha, ur, d):
    """Unbounded when ``alpha < (2d-1) ur / 2 - (2d-1)/2``; Open otherwise."""
    alpha, ur = to_fraction(alpha), to_fraction(ur)
    if ur <= 0:
        raise ValueError("ur must be positive")
    thr = Fraction(2 * d - 1, 2) * ur - Fraction(2 * d - 1, 2)
    status = UNBOUNDED if alpha < thr else OPEN
    return RegionVerdict(status, f"threshold={thr}", CITE_BR)


def sufficient_alpha(up, uq, d):
    """``min(alpha*_{p_s}(p, q), d - 1/2)``."""
    a = alpha_star(up, uq, 1 / p_s(d), d).value
    return min(a, Fraction(2 * d - 1, 2))
