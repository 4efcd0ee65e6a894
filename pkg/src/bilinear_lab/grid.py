"""Sampled functions on a periodic cube and the operations on them.

Nodes sit at ``x_i = -L/2 + i*h`` with ``h = L/n``.  The Fourier transform
follows the ``e^{-2 pi i x.xi}`` convention,

    f^(xi) = h^d * sum_x f(x) exp(-2 pi i x.xi),   xi in (1/L) Z^d,

so that ``f(x) = L^{-d} sum_xi f^(xi) exp(2 pi i x.xi)`` on the grid.
"""
from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels

__all__ = [
    "GridFunction",
    "WrapAroundError",
    "CommensurabilityError",
    "lp_norm",
    "lorentz_norm",
    "sample",
    "sample_many",
    "rescale",
    "fourier_transform",
    "frequencies",
    "frequency_sq",
    "apply_fourier_multiplier",
    "save_snapshot",
    "load_snapshot",
]


class WrapAroundError(ValueError):
    """Raised when an evaluation would read through the periodic seam."""


class CommensurabilityError(ValueError):
    """Raised when a rescaling cannot be represented on a dyadic grid."""


def _is_pow2(n):
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples of a function on ``[-L/2, L/2)^d``.

    Parameters
    ----------
    values : array_like, shape (n,)*d
        Samples at the grid nodes, row-major axis order.
    box_length : float
        Side length ``L`` of the periodic cell.
    periodic : bool
        True for genuinely periodic data (trigonometric polynomials,
        constants).  Non-periodic data is read as the zero extension of
        the box and every off-grid evaluation is guarded against reading
        through the seam.
    """

    values: np.ndarray
    box_length: float
    periodic: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.ndim not in (2, 3):
            raise ValueError("only d = 2 and d = 3 grids are stored")
        n = v.shape[0]
        if any(s != n for s in v.shape) or not _is_pow2(n):
            raise ValueError("values must be a cube with power-of-two side")
        if not (self.box_length > 0 and math.isfinite(self.box_length)):
            raise ValueError("box_length must be positive and finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "box_length", float(self.box_length))

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_function(cls, func, d, n, box_length, periodic=False):
        """Sample ``func(x_1, ..., x_d)`` (vectorized) at the nodes."""
        h = box_length / n
        axis = -box_length / 2 + h * np.arange(n)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        vals = np.broadcast_to(func(*mesh), (n,) * d)
        return cls(vals, box_length, periodic)

    @classmethod
    def constant(cls, c, d, n, box_length):
        return cls(np.full((n,) * d, c, dtype=np.complex128), box_length, True)

    @classmethod
    def zeros(cls, d, n, box_length):
        return cls.constant(0.0, d, n, box_length)

    def with_values(self, values, periodic=None):
        return GridFunction(values, self.box_length,
                            self.periodic if periodic is None else periodic)

    # -- geometry ---------------------------------------------------------
    @property
    def d(self):
        return self.values.ndim

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def h(self):
        return self.box_length / self.n

    @property
    def cell_volume(self):
        return self.h ** self.d

    @property
    def axis(self):
        return -self.box_length / 2 + self.h * np.arange(self.n)

    def mesh(self):
        return np.meshgrid(*([self.axis] * self.d), indexing="ij")

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.values.imag) <= 1e-12))

    @property
    def real(self):
        return np.ascontiguousarray(self.values.real)

    def abs(self):
        return self.with_values(np.abs(self.values))

    def translate(self, shift):
        """Translate by an integer number of cells per axis (exact)."""
        shift = tuple(int(s) for s in shift)
        return self.with_values(np.roll(self.values, shift, axis=tuple(range(self.d))))

    def __add__(self, other):
        _check_same_grid(self, other)
        return GridFunction(self.values + other.values, self.box_length,
                            self.periodic and other.periodic)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    # -- seam guard -------------------------------------------------------
    def require_clear_boundary(self, excursion_cells):
        """Check the boundary layer needed for reads up to ``excursion_cells``
        beyond the box.  Periodic data is exempt."""
        if self.periodic or excursion_cells <= 0:
            return
        width = int(math.ceil(excursion_cells)) + 1
        n = self.n
        if 2 * width >= n:
            raise WrapAroundError(
                f"excursion of {excursion_cells:.3g} cells does not fit in n={n}")
        a = np.abs(self.values)
        for ax in range(self.d):
            lo = np.take(a, np.arange(width), axis=ax)
            hi = np.take(a, np.arange(n - width, n), axis=ax)
            if lo.max() > 0 or hi.max() > 0:
                raise WrapAroundError(
                    f"function does not vanish within {width} cells of the "
                    f"boundary (axis {ax}); enlarge the box")


def _check_same_grid(a, b):
    if a.d != b.d or a.n != b.n or a.box_length != b.box_length:
        raise ValueError("grid functions live on different grids")


# -- norms ----------------------------------------------------------------
def lp_norm(f, up):
    """Discrete L^p norm with reciprocal exponent ``up = 1/p``.

    ``up = 0`` is the sup norm; ``up > 1`` gives the quasi-norm for p < 1.
    """
    up = float(up)
    if up < 0:
        raise ValueError("reciprocal exponent must be nonnegative")
    a = np.abs(f.values).ravel()
    if up == 0:
        return float(a.max())
    return float((f.cell_volume * np.sum(a ** (1.0 / up))) ** up)


def lorentz_norm(f, up, us):
    """Lorentz quasi-norm ``||f||_{L^{p,s}}`` with ``up = 1/p``, ``us = 1/s``.

    Each cell carries measure ``h^d``; the decreasing rearrangement is a
    step function and ``int t^{s/p - 1} dt`` is integrated exactly on each
    step.  ``us = 0`` is the weak norm ``sup_t t^{1/p} f*(t)``.
    """
    up = float(up)
    us = float(us)
    if up <= 0:
        raise ValueError("L^{inf,s} is not supported (up must be > 0)")
    if us < 0:
        raise ValueError("us must be nonnegative")
    a = np.sort(np.abs(f.values).ravel())[::-1]
    a = a[a > 0]
    if a.size == 0:
        return 0.0
    mu = f.cell_volume * np.arange(1, a.size + 1, dtype=np.float64)
    if us == 0:
        return float(np.max(mu ** up * a))
    e = up / us
    mu_prev = np.concatenate(([0.0], mu[:-1]))
    pieces = a ** (1.0 / us) * (mu ** e - mu_prev ** e) / e
    return float(np.sum(pieces) ** us)


# -- point evaluation ------------------------------------------------------
def _cells(f, x):
    u = (np.asarray(x, dtype=np.float64) + f.box_length / 2) / f.h
    base = np.floor(u)
    return base.astype(np.int64), u - base


def locate(f, x):
    """Integer cell and in-cell fraction of point ``x`` (cells)."""
    return _cells(f, x)


def sample_relative(f, x, offsets, method="linear", abs_values=False):
    """Samples at ``x + offsets`` where ``offsets`` (shape (P, d)) are in cells.

    The integer part of ``x`` is carried separately from the fractional
    parts so that translating ``x`` and ``f`` by whole cells is exact.
    """
    offsets = np.atleast_2d(np.asarray(offsets, dtype=np.float64))
    bx, fx = _cells(f, x)
    rel = fx + offsets
    ip = np.floor(rel)
    fr = rel - ip
    ipos = bx + ip.astype(np.int64)
    hi = ipos + (fr > 0)
    exc = max(-int(ipos.min()), int(hi.max()) - (f.n - 1), 0)
    f.require_clear_boundary(exc)
    vals = np.abs(f.values) if abs_values else f.values
    if method == "linear":
        return kernels.sample_points(vals, ipos, fr)
    if method == "spectral":
        return _spectral_eval(vals, ipos + fr)
    raise ValueError(f"unknown sampling method {method!r}")


def _spectral_eval(values, u):
    """Trigonometric interpolant at cell coordinates ``u`` (shape (P, d))."""
    n = values.shape[0]
    d = values.ndim
    c = np.fft.fftn(values) / n ** d
    k = np.fft.fftfreq(n, 1.0 / n)
    mats = []
    for ax in range(d):
        e = np.exp(2j * np.pi * np.outer(u[:, ax], k) / n)
        e[:, n // 2] = np.cos(np.pi * u[:, ax])
        mats.append(e)
    if d == 2:
        out = np.einsum("ab,pa,pb->p", c, mats[0], mats[1], optimize=True)
    else:
        out = np.einsum("abc,pa,pb,pc->p", c, *mats, optimize=True)
    if not np.iscomplexobj(values) or not np.any(np.imag(values)):
        return out.real
    return out


def sample(f, x, method="linear"):
    """Value at a point by periodic multilinear (or trigonometric) interpolation."""
    val = sample_relative(f, x, np.zeros((1, f.d)), method)[0]
    return complex(val) if np.iscomplexobj(val) else float(val)


def sample_many(f, points, method="linear"):
    """Values at many points, shape (P,)."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    u = (points + f.box_length / 2) / f.h
    base = np.floor(u)
    fr = u - base
    ipos = base.astype(np.int64)
    exc = max(-int(ipos.min()), int((ipos + (fr > 0)).max()) - (f.n - 1), 0)
    f.require_clear_boundary(exc)
    if method == "linear":
        return kernels.sample_points(f.values, ipos, fr)
    if method == "spectral":
        return _spectral_eval(f.values, u)
    raise ValueError(f"unknown sampling method {method!r}")


# -- rescaling -------------------------------------------------------------
def rescale(f, m):
    """Grid representation of ``x -> f(2^m x)``.

    The samples are unchanged and the box shrinks to ``L / 2^m``, which is
    an exact relabeling for every integer ``m``.
    """
    if int(m) != m:
        raise CommensurabilityError("rescaling power must be an integer")
    return GridFunction(f.values, math.ldexp(f.box_length, -int(m)), f.periodic)


# -- Fourier side ----------------------------------------------------------
def frequencies(f):
    """Broadcastable frequency components ``xi_j`` in FFT order."""
    xi = np.fft.fftfreq(f.n, d=f.h)
    out = []
    for ax in range(f.d):
        shape = [1] * f.d
        shape[ax] = f.n
        out.append(xi.reshape(shape))
    return out


def integer_frequency_sq(f):
    """``|k|^2`` for the integer lattice labels (exact integers)."""
    k = np.fft.fftfreq(f.n, 1.0 / f.n).astype(np.int64)
    total = np.zeros((f.n,) * f.d, dtype=np.int64)
    for ax in range(f.d):
        shape = [1] * f.d
        shape[ax] = f.n
        total = total + (k ** 2).reshape(shape)
    return total


def frequency_sq(f):
    """``|xi|^2`` on the lattice, FFT order."""
    return integer_frequency_sq(f) / f.box_length ** 2


def _phase(f):
    k = np.fft.fftfreq(f.n, 1.0 / f.n).astype(np.int64)
    total = np.zeros((f.n,) * f.d, dtype=np.int64)
    for ax in range(f.d):
        shape = [1] * f.d
        shape[ax] = f.n
        total = total + k.reshape(shape)
    return np.where(total % 2 == 0, 1.0, -1.0)


def fourier_transform(f):
    """``f^(xi) = h^d sum_x f(x) e^{-2 pi i x.xi}`` in FFT order."""
    return f.cell_volume * _phase(f) * np.fft.fftn(f.values)


def inverse_fourier_transform(fhat, like):
    """Inverse of :func:`fourier_transform` onto the grid of ``like``."""
    vals = np.fft.ifftn(fhat * _phase(like)) / like.cell_volume
    return GridFunction(vals, like.box_length, True)


def apply_fourier_multiplier(f, m):
    """Apply the multiplier ``m`` on the frequency lattice.

    ``m`` is either an array in FFT order or a callable receiving the
    broadcastable components ``xi_1, ..., xi_d``.
    """
    mult = m(*frequencies(f)) if callable(m) else np.asarray(m)
    mult = np.broadcast_to(mult, (f.n,) * f.d)
    vals = np.fft.ifftn(np.fft.fftn(f.values) * mult)
    return GridFunction(vals, f.box_length, True)


# -- snapshots -------------------------------------------------------------
_HEADER = struct.Struct("<qqd")


def save_snapshot(f, path, provenance=None):
    """Write the binary snapshot and its JSON sidecar (``path + '.json'``)."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.d, f.n, f.box_length))
        fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())
    side = {"d": f.d, "n": f.n, "box_length": f.box_length,
            "periodic": f.periodic, "provenance": provenance or {}}
    Path(str(path) + ".json").write_text(json.dumps(side, indent=2, sort_keys=True))
    return path


def load_snapshot(path):
    path = Path(path)
    raw = path.read_bytes()
    d, n, L = _HEADER.unpack_from(raw)
    vals = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if vals.size != n ** d:
        raise ValueError("snapshot payload size does not match header")
    side = Path(str(path) + ".json")
    periodic = False
    if side.exists():
        periodic = bool(json.loads(side.read_text()).get("periodic", False))
    return GridFunction(vals.reshape((n,) * d), L, periodic)
