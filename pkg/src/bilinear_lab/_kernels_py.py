"""Pure numpy fallback for the interpolation kernels.

Evaluation order matches the compiled module: the outer loop runs over
offsets and each point accumulates in that order.
"""
import numpy as np


def _lerp2(v, i, j, fx, fy, m):
    i1 = (i + 1) & m
    j1 = (j + 1) & m
    return ((1.0 - fx) * ((1.0 - fy) * v[i, j] + fy * v[i, j1])
            + fx * ((1.0 - fy) * v[i1, j] + fy * v[i1, j1]))


def _lerp3(v, i, j, k, fx, fy, fz, m):
    i1 = (i + 1) & m
    j1 = (j + 1) & m
    k1 = (k + 1) & m
    c00 = (1.0 - fz) * v[i, j, k] + fz * v[i, j, k1]
    c01 = (1.0 - fz) * v[i, j1, k] + fz * v[i, j1, k1]
    c10 = (1.0 - fz) * v[i1, j, k] + fz * v[i1, j, k1]
    c11 = (1.0 - fz) * v[i1, j1, k] + fz * v[i1, j1, k1]
    c0 = (1.0 - fy) * c00 + fy * c01
    c1 = (1.0 - fy) * c10 + fy * c11
    return (1.0 - fx) * c0 + fx * c1


def shift_sum(values, base, ip, fr, w):
    """out[p] = sum_k w[k] * interp(values, base[p] + ip[k] + fr[k])."""
    m = values.shape[0] - 1
    out = np.zeros(base.shape[0], dtype=np.float64)
    if values.ndim == 2:
        for k in range(ip.shape[0]):
            i = (base[:, 0] + ip[k, 0]) & m
            j = (base[:, 1] + ip[k, 1]) & m
            out = out + w[k] * _lerp2(values, i, j, fr[k, 0], fr[k, 1], m)
    elif values.ndim == 3:
        for k in range(ip.shape[0]):
            i = (base[:, 0] + ip[k, 0]) & m
            j = (base[:, 1] + ip[k, 1]) & m
            kk = (base[:, 2] + ip[k, 2]) & m
            out = out + w[k] * _lerp3(values, i, j, kk, fr[k, 0], fr[k, 1],
                                      fr[k, 2], m)
    else:
        raise ValueError("only 2-D and 3-D grids are supported")
    return out


def sample_points(values, ipos, frac):
    """out[p] = interp(values, ipos[p] + frac[p])."""
    m = values.shape[0] - 1
    if values.ndim == 2:
        return _lerp2(values, ipos[:, 0] & m, ipos[:, 1] & m,
                      frac[:, 0], frac[:, 1], m)
    if values.ndim == 3:
        return _lerp3(values, ipos[:, 0] & m, ipos[:, 1] & m, ipos[:, 2] & m,
                      frac[:, 0], frac[:, 1], frac[:, 2], m)
    raise ValueError("only 2-D and 3-D grids are supported")
