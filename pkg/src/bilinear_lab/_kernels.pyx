# cython: language_level=3
"""Compiled multilinear-interpolation kernels.

Both entry points mirror ``_kernels_py`` operation for operation so the two
backends agree to rounding.  Indices wrap with ``& (n - 1)`` (n is a power
of two).
"""
import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()


cdef inline double _lerp2(const double[:, ::1] v, int64_t i, int64_t j,
                          double fx, double fy, int64_t m) noexcept nogil:
    cdef int64_t i1 = (i + 1) & m
    cdef int64_t j1 = (j + 1) & m
    return ((1.0 - fx) * ((1.0 - fy) * v[i, j] + fy * v[i, j1])
            + fx * ((1.0 - fy) * v[i1, j] + fy * v[i1, j1]))


cdef inline double _lerp3(const double[:, :, ::1] v, int64_t i, int64_t j,
                          int64_t k, double fx, double fy, double fz,
                          int64_t m) noexcept nogil:
    cdef int64_t i1 = (i + 1) & m
    cdef int64_t j1 = (j + 1) & m
    cdef int64_t k1 = (k + 1) & m
    cdef double c00 = (1.0 - fz) * v[i, j, k] + fz * v[i, j, k1]
    cdef double c01 = (1.0 - fz) * v[i, j1, k] + fz * v[i, j1, k1]
    cdef double c10 = (1.0 - fz) * v[i1, j, k] + fz * v[i1, j, k1]
    cdef double c11 = (1.0 - fz) * v[i1, j1, k] + fz * v[i1, j1, k1]
    cdef double c0 = (1.0 - fy) * c00 + fy * c01
    cdef double c1 = (1.0 - fy) * c10 + fy * c11
    return (1.0 - fx) * c0 + fx * c1


def shift_sum(values, const int64_t[:, ::1] base, const int64_t[:, ::1] ip,
              const double[:, ::1] fr, const double[::1] w):
    """out[p] = sum_k w[k] * interp(values, base[p] + ip[k] + fr[k])."""
    cdef Py_ssize_t P = base.shape[0]
    cdef Py_ssize_t K = ip.shape[0]
    cdef Py_ssize_t p, k
    cdef int64_t m = values.shape[0] - 1
    cdef int64_t a0, a1, a2
    cdef double f0, f1, f2, wk
    out_arr = np.zeros(P, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef const double[:, ::1] v2
    cdef const double[:, :, ::1] v3
    if values.ndim == 2:
        v2 = values
        with nogil:
            for k in range(K):
                a0 = ip[k, 0]
                a1 = ip[k, 1]
                f0 = fr[k, 0]
                f1 = fr[k, 1]
                wk = w[k]
                for p in range(P):
                    out[p] = out[p] + wk * _lerp2(
                        v2, (base[p, 0] + a0) & m, (base[p, 1] + a1) & m,
                        f0, f1, m)
    elif values.ndim == 3:
        v3 = values
        with nogil:
            for k in range(K):
                a0 = ip[k, 0]
                a1 = ip[k, 1]
                a2 = ip[k, 2]
                f0 = fr[k, 0]
                f1 = fr[k, 1]
                f2 = fr[k, 2]
                wk = w[k]
                for p in range(P):
                    out[p] = out[p] + wk * _lerp3(
                        v3, (base[p, 0] + a0) & m, (base[p, 1] + a1) & m,
                        (base[p, 2] + a2) & m, f0, f1, f2, m)
    else:
        raise ValueError("only 2-D and 3-D grids are supported")
    return out_arr


def sample_points(values, const int64_t[:, ::1] ipos, const double[:, ::1] frac):
    """out[p] = interp(values, ipos[p] + frac[p])."""
    cdef Py_ssize_t P = ipos.shape[0]
    cdef Py_ssize_t p
    cdef int64_t m = values.shape[0] - 1
    out_arr = np.empty(P, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef const double[:, ::1] v2
    cdef const double[:, :, ::1] v3
    if values.ndim == 2:
        v2 = values
        with nogil:
            for p in range(P):
                out[p] = _lerp2(v2, ipos[p, 0] & m, ipos[p, 1] & m,
                                frac[p, 0], frac[p, 1], m)
    elif values.ndim == 3:
        v3 = values
        with nogil:
            for p in range(P):
                out[p] = _lerp3(v3, ipos[p, 0] & m, ipos[p, 1] & m,
                                ipos[p, 2] & m, frac[p, 0], frac[p, 1],
                                frac[p, 2], m)
    else:
        raise ValueError("only 2-D and 3-D grids are supported")
    return out_arr
