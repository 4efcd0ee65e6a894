"""Backend selection for the interpolation kernels.

The compiled module is used when it imports; setting the environment
variable ``BILINEAR_LAB_BACKEND=python`` forces the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("BILINEAR_LAB_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def split_offsets(offsets):
    """Split real offsets (in cells) into floor indices and fractions."""
    offsets = np.asarray(offsets, dtype=np.float64)
    ip = np.floor(offsets)
    fr = offsets - ip
    return np.ascontiguousarray(ip.astype(np.int64)), np.ascontiguousarray(fr)


def _real_parts(values):
    values = np.asarray(values)
    if np.iscomplexobj(values) and np.any(values.imag):
        return np.ascontiguousarray(values.real), np.ascontiguousarray(values.imag)
    return np.ascontiguousarray(np.real(values), dtype=np.float64), None


def shift_sum(values, base, offsets, weights, impl=None):
    """Weighted sum of interpolated samples at ``base[p] + offsets[k]``.

    Parameters
    ----------
    values : ndarray, shape (n,)*d
        Periodic samples; real or complex.
    base : ndarray of int, shape (P, d)
        Integer anchor cell per output point.
    offsets : ndarray, shape (K, d)
        Real offsets in cells, shared by every anchor.
    weights : ndarray, shape (K,)

    Returns
    -------
    ndarray, shape (P,)
    """
    impl = impl or _impl
    base = np.ascontiguousarray(base, dtype=np.int64)
    ip, fr = split_offsets(offsets)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    re, im = _real_parts(values)
    out = impl.shift_sum(re, base, ip, fr, w)
    if im is not None:
        out = out + 1j * impl.shift_sum(im, base, ip, fr, w)
    return np.asarray(out)


def sample_points(values, ipos, frac, impl=None):
    """Interpolated samples at ``ipos[p] + frac[p]`` (cells, periodic)."""
    impl = impl or _impl
    ipos = np.ascontiguousarray(ipos, dtype=np.int64)
    frac = np.ascontiguousarray(frac, dtype=np.float64)
    re, im = _real_parts(values)
    out = impl.sample_points(re, ipos, frac)
    if im is not None:
        out = out + 1j * impl.sample_points(im, ipos, frac)
    return np.asarray(out)


def grid_indices(n, d):
    """All grid indices in row-major order, shape (n**d, d)."""
    axes = np.meshgrid(*([np.arange(n, dtype=np.int64)] * d), indexing="ij")
    return np.ascontiguousarray(np.stack([a.ravel() for a in axes], axis=1))
