"""Grid maximal operators and the pointwise domination report.

Every operator takes the supremum over a finite :class:`RadiusGrid` and
returns the maximizing radius per point alongside the values.  All inner
sums run through :func:`kernels.shift_sum`, so a given (radius, node)
combination always produces the same bits regardless of which operator
asked for it.  The exact inequalities below rely on that.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .grid import GridFunction
from .quadrature import ball_rule, sphere_rule

__all__ = [
    "RadiusGrid",
    "MaximalResult",
    "hl_maximal",
    "spherical_maximal",
    "bilinear_maximal",
    "strong_bilinear_maximal",
    "pointwise_domination_report",
    "DominationReport",
]


@dataclass(frozen=True, eq=False)
class RadiusGrid:
    """Finite set of radii for a grid supremum.

    ``global`` grids are ``{2^k (1 + j/n_local)}``, ``j < n_local``;
    ``local`` grids sample ``[1, 2]`` at ``1 + j/n_local``, ``j = 0..n_local``.
    """

    kind: str
    radii: np.ndarray
    k_range: tuple = (0, 0)
    n_local: int = 0

    def __post_init__(self):
        r = np.unique(np.asarray(self.radii, dtype=np.float64))
        if r.size == 0 or r[0] <= 0:
            raise ValueError("radii must be positive and nonempty")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    @classmethod
    def global_dyadic(cls, k_min=-6, k_max=2, n_local=16):
        lam = 1 + np.arange(n_local) / n_local
        radii = np.concatenate([np.ldexp(lam, k) for k in range(k_min, k_max + 1)])
        return cls("global", radii, (k_min, k_max), n_local)

    @classmethod
    def local_unit(cls, n_local=32):
        return cls("local", 1 + np.arange(n_local + 1) / n_local, (0, 0), n_local)

    @classmethod
    def explicit(cls, radii, kind="explicit"):
        return cls(kind, radii)

    def scaled(self, c):
        return RadiusGrid(self.kind, self.radii * c, self.k_range, self.n_local)

    def union(self, other):
        return RadiusGrid("explicit", np.concatenate([self.radii, other.radii]))

    @property
    def max_radius(self):
        return float(self.radii[-1])

    def __len__(self):
        return self.radii.size


@dataclass(frozen=True, eq=False)
class MaximalResult:
    values: GridFunction
    argmax: np.ndarray

    def __iter__(self):
        return iter((self.values, self.argmax))


@lru_cache(maxsize=8)
def _indices(n, d):
    idx = kernels.grid_indices(n, d)
    idx.setflags(write=False)
    return idx


def _abs_real(f):
    return np.ascontiguousarray(np.abs(f.values))


def _grid_sum(vals, f, r, vecs, weights):
    """``sum_k w_k vals(x - r v_k)`` at every node."""
    offs = -(r * vecs) / f.h
    out = kernels.shift_sum(vals, _indices(f.n, f.d), offs, weights)
    return out.reshape(vals.shape)


def _sup(stack_iter, shape, radii):
    best = np.full(shape, -np.inf)
    arg = np.zeros(shape)
    for r, vals in zip(radii, stack_iter):
        better = vals > best
        best = np.where(better, vals, best)
        arg = np.where(better, r, arg)
    return best, arg


def _guard(f, radius):
    f.require_clear_boundary(radius / f.h)


def _wrap(f, vals, arg):
    return MaximalResult(GridFunction(vals, f.box_length, f.periodic), arg)


def ball_sums(f, radii, order=8, normalized=True):
    """Ball averages ``sum_j w_j |f|(x - t y_j)`` (divided by ``sum w`` if
    ``normalized``) for each radius; yields arrays."""
    ball = ball_rule(f.d, order)
    vals = _abs_real(f)
    scale = 1.0 / ball.weights.sum() if normalized else 1.0
    for t in radii:
        yield _grid_sum(vals, f, t, ball.nodes, ball.weights) * scale


def hl_maximal(f, radii, order=8, normalized=True):
    """Hardy-Littlewood maximal function over the radius grid.

    The ball average uses the polar ball rule; ``normalized`` divides by
    the rule's total weight so constants map to themselves.
    """
    _guard(f, radii.max_radius)
    vals, arg = _sup(ball_sums(f, radii.radii, order, normalized), (f.n,) * f.d,
                     radii.radii)
    return _wrap(f, vals, arg)


def _sphere_sums(f, radii, order):
    sph = sphere_rule(f.d, order)
    vals = _abs_real(f)
    for t in radii:
        yield _grid_sum(vals, f, t, sph.nodes, sph.weights)


def spherical_maximal(f, radii, order=16):
    """Spherical maximal function ``sup_t int_{S^{d-1}} |f(x - t z)|``."""
    _guard(f, radii.max_radius)
    vals, arg = _sup(_sphere_sums(f, radii.radii, order), (f.n,) * f.d, radii.radii)
    return _wrap(f, vals, arg)


def _ball_groups(d, order):
    ball = ball_rule(d, order, with_slicing_weight=True)
    groups = [np.flatnonzero(ball.radial_index == a) for a in range(ball.n_radial)]
    return ball, groups


def _outer_tables(f, radii, order):
    """F[t][a] = sum over radial group a of w_j |f|(x - t y_j)."""
    ball, groups = _ball_groups(f.d, order)
    vals = _abs_real(f)
    return [[_grid_sum(vals, f, t, ball.nodes[g], ball.weights[g]) for g in groups]
            for t in radii]


def _inner_tables(g, radii, order, sphere_order):
    """G[s][a] = int_{S^{d-1}} |g|(x - s c_a z), c_a = sqrt(1 - |y|^2) on group a."""
    ball, _ = _ball_groups(g.d, order)
    sph = sphere_rule(g.d, sphere_order)
    vals = _abs_real(g)
    return [[_grid_sum(vals, g, s * c, sph.nodes, sph.weights)
             for c in ball.radial_inner] for s in radii]


def _combine(Ft, Gs):
    acc = np.zeros_like(Ft[0])
    for Fa, Ga in zip(Ft, Gs):
        acc = acc + Fa * Ga
    return acc


def bilinear_maximal(f, g, radii, order=8, sphere_order=None):
    """Bilinear spherical maximal function via slicing.

    At each radius ``t`` the average is ``sum_a F_a(t) G_a(t c_a)``, where
    ``F_a`` is the weighted ball sum over the radial group ``a`` and ``G_a``
    the sphere average of ``|g|`` at the induced radius.  A ``local`` radius
    grid gives the localized operator.
    """
    sphere_order = sphere_order or order
    _guard(f, radii.max_radius)
    _guard(g, radii.max_radius)
    F = _outer_tables(f, radii.radii, order)
    G = _inner_tables(g, radii.radii, order, sphere_order)
    vals, arg = _sup((_combine(F[i], G[i]) for i in range(len(radii))),
                     (f.n,) * f.d, radii.radii)
    return _wrap(f, vals, arg)


@dataclass(frozen=True, eq=False)
class StrongResult:
    values: GridFunction
    argmax_t: np.ndarray
    argmax_s: np.ndarray


def strong_bilinear_maximal(f, g, radii_t, radii_s, order=8, sphere_order=None):
    """Maximal function with independent radii for the two slots.

    Restricting to ``t = s`` reproduces :func:`bilinear_maximal` exactly.
    """
    sphere_order = sphere_order or order
    _guard(f, radii_t.max_radius)
    _guard(g, radii_s.max_radius)
    F = _outer_tables(f, radii_t.radii, order)
    G = _inner_tables(g, radii_s.radii, order, sphere_order)
    shape = (f.n,) * f.d
    best = np.full(shape, -np.inf)
    at = np.zeros(shape)
    as_ = np.zeros(shape)
    for i, t in enumerate(radii_t.radii):
        for j, s in enumerate(radii_s.radii):
            v = _combine(F[i], G[j])
            better = v > best
            best = np.where(better, v, best)
            at = np.where(better, t, at)
            as_ = np.where(better, s, as_)
    return StrongResult(GridFunction(best, f.box_length, f.periodic), at, as_)


@dataclass(frozen=True, eq=False)
class DominationReport:
    """Per-point check of ``M(f,g) <= vol(B) * Mf * Sg`` and its mirror."""

    max_ratio: float
    max_ratio_swapped: float
    bilinear: np.ndarray
    bilinear_swapped: np.ndarray
    argmax: np.ndarray
    ratio: np.ndarray
    ratio_swapped: np.ndarray
    ball_volume: float
    local_ratio: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.max_ratio <= 1 + 1e-12 and self.max_ratio_swapped <= 1 + 1e-12

    def to_csv(self):
        lines = ["index,value,argmax_t,ratio,ratio_swapped"]
        for idx in np.ndindex(self.ratio.shape):
            lines.append(",".join([
                ":".join(str(i) for i in idx), repr(float(self.bilinear[idx])),
                repr(float(self.argmax[idx])), repr(float(self.ratio[idx])),
                repr(float(self.ratio_swapped[idx]))]))
        return "\n".join(lines) + "\n"


def _ratio(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                     np.where(num > 0, np.inf, 0.0))
    return r


def _one_side(f, g, radii, order, sphere_order):
    F = _outer_tables(f, radii.radii, order)
    G = _inner_tables(g, radii.radii, order, sphere_order)
    shape = (f.n,) * f.d
    M, arg = _sup((_combine(F[i], G[i]) for i in range(len(radii))), shape,
                  radii.radii)
    ball, _ = _ball_groups(f.d, order)
    induced = np.unique((radii.radii[:, None] * ball.radial_inner[None, :]).ravel())
    S = spherical_maximal(g, RadiusGrid.explicit(induced), sphere_order).values.real
    for Gt in G:
        for Ga in Gt:
            if np.any(Ga > S):
                raise RuntimeError("induced radius set does not cover an inner radius")
    plain = ball_rule(f.d, order)
    vol = float(plain.weights.sum())
    Mf = hl_maximal(f, radii, order, normalized=True).values.real
    return M, arg, _ratio(M, vol * Mf * S), vol, Mf, S


def pointwise_domination_report(f, g, radii, order=8, sphere_order=None):
    """Check ``M(f,g)(x) <= vol(B^d) * Mf(x) * Sg(x)`` at every node.

    ``vol(B^d)`` is the total weight of the (unweighted) ball rule, ``Mf``
    the normalized ball-average maximal function over ``radii`` and ``Sg``
    the spherical maximal function over the induced radii ``t * c_a``.  The
    mirrored inequality with the roles of ``f`` and ``g`` exchanged is
    checked as well.  For a local radius grid the ratio against
    ``(|f| * chi_{B(0,2)}) * Sg`` is reported (not asserted).
    """
    sphere_order = sphere_order or order
    for h in (f, g):
        if np.any(h.values.real < 0) or np.any(h.values.imag != 0):
            raise ValueError("domination report needs nonnegative inputs")
    _guard(f, radii.max_radius)
    _guard(g, radii.max_radius)
    M, arg, ratio, vol, _, S = _one_side(f, g, radii, order, sphere_order)
    M2, _, ratio2, _, _, _ = _one_side(g, f, radii, order, sphere_order)
    local = None
    if radii.kind == "local":
        conv = _ball_convolution(f, 2.0)
        local = float(np.max(_ratio(M, conv * S)))
    return DominationReport(float(ratio.max()), float(ratio2.max()), M, M2, arg,
                            ratio, ratio2, vol, local,
                            {"order": order, "sphere_order": sphere_order,
                             "n_radii": len(radii), "n": f.n, "L": f.box_length})


def _ball_convolution(f, radius):
    """``|f| * chi_{B(0, radius)}`` on the grid (cell sums)."""
    mesh = np.meshgrid(*([np.fft.fftfreq(f.n, 1.0 / f.n) * f.h] * f.d), indexing="ij")
    chi = (sum(m * m for m in mesh) <= radius * radius).astype(float)
    conv = np.fft.ifftn(np.fft.fftn(np.abs(f.values)) * np.fft.fftn(chi)).real
    return np.maximum(conv, 0.0) * f.cell_volume


def bilinear_value_at_radius(f, g, t, order=8, sphere_order=None):
    """Sliced bilinear average at one radius on the whole grid (abs values)."""
    sphere_order = sphere_order or order
    F = _outer_tables(f, [t], order)
    G = _inner_tables(g, [t], order, sphere_order)
    return _combine(F[0], G[0])

