"""Bilinear and k-linear spherical averages at a point.

Two routes are provided for the bilinear average

    A_t(f, g)(x) = int_{S^{2d-1}} f(x - t y) g(x - t z) d sigma(y, z):

* direct quadrature on ``S^{2d-1}``, splitting each node into ``(y, z)``;
* slicing, which writes the sphere integral as a ball integral of
  lower-dimensional sphere integrals,

    int_{S^{2d-1}} F = int_{B^d} (1 - |y|^2)^{(d-2)/2}
                       int_{S^{d-1}} F(y, sqrt(1 - |y|^2) z) d sigma(z) dy.

Applying the slicing step once per factor gives the k-linear average.
"""
from __future__ import annotations

import numpy as np

from .grid import sample_relative
from .quadrature import ball_rule, sphere_rule

__all__ = [
    "direct_bilinear_average",
    "direct_multilinear_average",
    "sliced_bilinear_average",
    "multilinear_average",
    "linear_spherical_average",
]


def _samples(f, x, t, vecs, method, absolute):
    """``f(x - t * v)`` for every row ``v`` of ``vecs``; ``t`` may be an array."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    offs = -(t[:, None, None] * vecs[None, :, :]) / f.h
    vals = sample_relative(f, x, offs.reshape(-1, f.d), method, absolute)
    return vals.reshape(t.size, vecs.shape[0])


def _check_dims(fs):
    d = fs[0].d
    if any(f.d != d for f in fs):
        raise ValueError("all functions must share the dimension")
    return d


def direct_multilinear_average(fs, x, t, rule=None, order=12, method="linear",
                               absolute=False):
    """Direct quadrature on ``S^{kd-1}`` of ``prod_i f_i(x - t y_i)``.

    Each node of the ``kd``-dimensional rule is split into ``k`` consecutive
    blocks of ``d`` coordinates.
    """
    d = _check_dims(fs)
    k = len(fs)
    rule = rule or sphere_rule(k * d, order)
    if rule.k != k * d:
        raise ValueError(f"need a rule on S^{k * d - 1}")
    prod = np.ones(len(rule), dtype=np.complex128)
    for i, f in enumerate(fs):
        block = rule.nodes[:, i * d:(i + 1) * d]
        prod = prod * _samples(f, x, t, block, method, absolute)[0]
    val = np.sum(rule.weights * prod)
    return val.real if not np.any(prod.imag) else val


def direct_bilinear_average(f, g, x, t, rule=None, order=12, method="linear",
                            absolute=False):
    """Bilinear spherical average by quadrature on ``S^{2d-1}``.

    Parameters
    ----------
    f, g : GridFunction
    x : array_like, shape (d,)
    t : float
        Radius.
    rule : SphereRule, optional
        Rule on ``S^{2d-1}``; built from ``order`` when omitted.
    method : {"linear", "spectral"}
        Off-grid interpolation.
    absolute : bool
        Use ``|f|`` and ``|g|``.
    """
    return direct_multilinear_average([f, g], x, t, rule, order, method, absolute)


def _sliced(fs, x, radii, order, method, absolute):
    d = fs[0].d
    f = fs[0]
    if len(fs) == 1:
        sph = sphere_rule(d, order)
        return _samples(f, x, radii, sph.nodes, method, absolute) @ sph.weights
    k = len(fs)
    ball = ball_rule(d, order, weight_exponent=((k - 1) * d - 2) / 2)
    outer = _samples(f, x, radii, ball.nodes, method, absolute)
    inner_r = (radii[:, None] * ball.radial_inner[None, :]).ravel()
    inner = _sliced(fs[1:], x, inner_r, order, method, absolute)
    inner = inner.reshape(radii.size, ball.n_radial)[:, ball.radial_index]
    return (outer * inner) @ ball.weights


def multilinear_average(fs, x, t, order=12, method="linear", absolute=False):
    """k-linear spherical average by recursive slicing.

    The first factor is integrated over ``B^d`` with weight
    ``(1 - |y|^2)^{((k-1)d - 2)/2}`` and the remaining ``k - 1`` factors are
    averaged over the sphere of radius ``t sqrt(1 - |y|^2)``.  With ``k = 2``
    this is exactly :func:`sliced_bilinear_average`.
    """
    _check_dims(fs)
    if len(fs) < 2:
        raise ValueError("need at least two functions")
    val = _sliced(list(fs), x, np.array([float(t)]), order, method, absolute)[0]
    return val.real if np.isrealobj(val) or val.imag == 0 else val


def sliced_bilinear_average(f, g, x, t, order=12, method="linear", absolute=False):
    """Bilinear spherical average through the ball-times-sphere slicing."""
    return multilinear_average([f, g], x, t, order, method, absolute)


def linear_spherical_average(f, x, t, order=16, signed=False, method="linear"):
    """``int_{S^{d-1}} |f(x - t z)| d sigma(z)`` (no modulus if ``signed``)."""
    sph = sphere_rule(f.d, order)
    vals = _samples(f, x, t, sph.nodes, method, not signed)[0] @ sph.weights
    return vals.real if np.isrealobj(vals) or vals.imag == 0 else vals
