"""Positive-weight quadrature on spheres ``S^{k-1}`` and balls ``B^d``.

Sphere rules are hyperspherical product rules: Gauss-Jacobi in
``u = cos(theta)`` for every polar angle (the Jacobi weight absorbs the
``sin^m`` Jacobian) and the trapezoid rule in the azimuth.  Ball rules use
``y = sin(phi) * omega`` with Gauss-Legendre in ``phi``, which keeps the
factor ``(1 - |y|^2)^{(d-2)/2} = cos(phi)^{d-2}`` smooth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre

__all__ = [
    "SphereRule",
    "BallRule",
    "sphere_rule",
    "ball_rule",
    "integrate_sphere",
    "integrate_ball",
    "sphere_area",
    "ball_volume",
]

SUPPORTED_SPHERE_DIMS = (2, 3, 4, 6)


def sphere_area(k):
    """Surface area of ``S^{k-1}`` in ``R^k``."""
    return 2 * math.pi ** (k / 2) / math.gamma(k / 2)


def ball_volume(d):
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes on ``S^{k-1}`` with positive weights."""

    k: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __len__(self):
        return self.weights.size

    def to_csv(self):
        cols = ",".join(f"x{i}" for i in range(self.k))
        rows = [f"{cols},weight"]
        for x, w in zip(self.nodes, self.weights):
            rows.append(",".join(repr(float(c)) for c in x) + f",{float(w)!r}")
        return "\n".join(rows) + "\n"


@dataclass(frozen=True, eq=False)
class BallRule:
    """Nodes in ``B^d`` with positive weights.

    Attributes
    ----------
    weight_exponent : float or None
        Exponent ``e`` of the factor ``(1 - |y|^2)^e`` already folded into
        ``weights``; None when no factor is folded in.
    inner : ndarray
        ``sqrt(1 - |y|^2) = cos(phi)`` for each node.
    radial_index : ndarray of int
        Which radial (``phi``) node each point belongs to.  Nodes sharing
        an index share ``inner`` exactly.
    """

    d: int
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    inner: np.ndarray
    radial_index: np.ndarray
    radial_inner: np.ndarray
    weight_exponent: float | None = None
    angular: SphereRule | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("nodes", "weights", "inner", "radial_inner"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        ri = np.ascontiguousarray(self.radial_index, dtype=np.int64)
        ri.setflags(write=False)
        object.__setattr__(self, "radial_index", ri)

    def __len__(self):
        return self.weights.size

    @property
    def n_radial(self):
        return self.radial_inner.size


def _trapezoid_circle(npts):
    theta = 2 * np.pi * np.arange(npts) / npts
    return theta, np.full(npts, 2 * np.pi / npts)


@lru_cache(maxsize=None)
def _sphere_rule_cached(k, order):
    n_azi = order + 1
    if k == 2:
        theta, w = _trapezoid_circle(n_azi)
        return SphereRule(2, order, np.stack([np.cos(theta), np.sin(theta)], 1), w)
    n_pol = (order + 2) // 2
    # polar angles theta_1..theta_{k-2}; theta_i carries sin^{k-1-i}
    nodes = np.ones((1, 0))
    weights = np.ones(1)
    sines = np.ones(1)
    for i in range(1, k - 1):
        m = k - 1 - i
        a = (m - 1) / 2
        u, wu = roots_jacobi(n_pol, a, a) if a != 0 else roots_legendre(n_pol)
        # next coordinate is (running sine product) * u
        new_nodes = np.concatenate(
            [np.repeat(nodes, u.size, axis=0),
             (np.repeat(sines, u.size) * np.tile(u, sines.size))[:, None]], axis=1)
        weights = np.repeat(weights, u.size) * np.tile(wu, weights.size)
        sines = np.repeat(sines, u.size) * np.tile(np.sqrt(1 - u * u), sines.size)
        nodes = new_nodes
    theta, wt = _trapezoid_circle(n_azi)
    last = np.stack([np.cos(theta), np.sin(theta)], 1)
    nodes = np.concatenate(
        [np.repeat(nodes, theta.size, axis=0),
         np.repeat(sines, theta.size)[:, None] * np.tile(last, (sines.size, 1))], axis=1)
    weights = np.repeat(weights, theta.size) * np.tile(wt, weights.size)
    return SphereRule(k, order, nodes, weights)


def sphere_rule(k, order):
    """Product rule on ``S^{k-1}`` exact for polynomials of degree <= order.

    Parameters
    ----------
    k : {2, 3, 4, 6}
        Ambient dimension.
    order : int
        Polynomial exactness degree, at least 4.
    """
    if k not in SUPPORTED_SPHERE_DIMS:
        raise ValueError(f"sphere rules are available for k in {SUPPORTED_SPHERE_DIMS}")
    if order < 4:
        raise ValueError("order must be at least 4")
    return _sphere_rule_cached(int(k), int(order))


def _n_phi(order):
    return order + 2


@lru_cache(maxsize=None)
def _ball_rule_cached(d, order, exponent):
    phi, wphi = roots_legendre(_n_phi(order))
    phi = (phi + 1) * np.pi / 4
    wphi = wphi * np.pi / 4
    r = np.sin(phi)
    c = np.cos(phi)
    radial_w = wphi * r ** (d - 1) * c
    if exponent is not None:
        radial_w = radial_w * c ** (2 * exponent)
    ang = sphere_rule(d, order)
    na = len(ang)
    nodes = (r[:, None, None] * ang.nodes[None, :, :]).reshape(-1, d)
    weights = (radial_w[:, None] * ang.weights[None, :]).ravel()
    inner = np.repeat(c, na)
    radial_index = np.repeat(np.arange(r.size), na)
    return BallRule(d, order, nodes, weights, inner, radial_index, c,
                    exponent, ang)


def ball_rule(d, order, with_slicing_weight=False, weight_exponent=None):
    """Polar rule on the unit ball ``B^d``.

    Parameters
    ----------
    d : {2, 3}
    order : int
        Angular exactness degree; ``order + 2`` Gauss-Legendre nodes in ``phi``.
    with_slicing_weight : bool
        Fold ``(1 - |y|^2)^{(d-2)/2}`` into the weights.
    weight_exponent : float, optional
        Fold ``(1 - |y|^2)^e`` with an explicit exponent instead (used by the
        k-linear recursion).  Overrides ``with_slicing_weight``.
    """
    if d not in (2, 3):
        raise ValueError("ball rules are available for d in (2, 3)")
    if order < 4:
        raise ValueError("order must be at least 4")
    if weight_exponent is None and with_slicing_weight:
        weight_exponent = (d - 2) / 2
    if weight_exponent is not None:
        weight_exponent = float(weight_exponent)
    return _ball_rule_cached(int(d), int(order), weight_exponent)


def integrate_sphere(rule, F):
    """``sum_i w_i F(node_i)``; ``F`` maps an (N, k) array to N values."""
    return np.sum(rule.weights * np.asarray(F(rule.nodes)))


def integrate_ball(rule, F):
    return np.sum(rule.weights * np.asarray(F(rule.nodes)))


def sphere_monomial_moment(alpha):
    """Exact ``int_{S^{k-1}} x^alpha d sigma`` for a multi-index ``alpha``."""
    alpha = np.asarray(alpha)
    if np.any(alpha % 2):
        return 0.0
    b = (alpha + 1) / 2
    return float(2 * np.exp(np.sum(gammaln(b)) - gammaln(np.sum(b))))
