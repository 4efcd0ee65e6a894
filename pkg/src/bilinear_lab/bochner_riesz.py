"""Linear and bilinear Bochner-Riesz means on the discrete frequency lattice.

Grid functions are trigonometric polynomials ``f(x_j) = sum_k c_k e_k(x_j)``
with ``c = fftn(f) / N``.  A bilinear multiplier ``m(xi, eta)`` acts by the
pair sum

    H[(k + l) mod n] += m(xi_k, eta_l) c_k d_l,

followed by one inverse transform.  At the nodes the wrap of ``k + l`` is
invisible, so the result equals the defining double sum exactly.

All bilinear multipliers here are radial in each slot and are passed as
functions of ``a = |xi|^2`` and ``b = |eta|^2``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from .grid import (GridFunction, _check_same_grid, apply_fourier_multiplier,
                   frequency_sq, integer_frequency_sq, inverse_fourier_transform)
from .profiles import BumpProfile, dyadic_psi, dyadic_psi0, partition_phi

__all__ = [
    "BudgetError",
    "UncertifiedProfileError",
    "UnderResolvedError",
    "BilinearMultiplier",
    "br_multiplier",
    "br_linear",
    "br_bilinear",
    "br_bilinear_maximal",
    "pair_sum",
    "pair_sum_oracle",
    "DyadicDecomposition",
    "dyadic_profile_decomposition",
    "profile_partial_sum",
    "annular_bilinear",
    "smooth_part",
    "reconstruction_check",
    "s_op",
    "lo_square_function",
    "MixedSquareResult",
    "mixed_square_function",
    "KernelReport",
    "kernel_decay_check",
    "PartitionReport",
    "multiplier_partition_check",
    "BridgeReport",
    "ftc_bridge_check",
]

PAIR_BUDGET = {2: 64, 3: 16}


class BudgetError(ValueError):
    """The ``n^{2d}`` pair sum exceeds the allowed grid size."""


class UncertifiedProfileError(ValueError):
    pass


class UnderResolvedError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BilinearMultiplier:
    """``m(a, b)`` with ``a = |xi|^2``, ``b = |eta|^2``."""

    func: object
    symmetric: bool = True
    support: str = ""

    def __call__(self, a, b):
        return self.func(a, b)


def _br_profile(x, alpha):
    x = np.asarray(x, dtype=np.float64)
    pos = 1 - x
    if alpha == 0:
        return np.where(pos > 0, 1.0, 0.0)
    return np.where(pos > 0, np.maximum(pos, 0.0) ** alpha, 0.0)


def br_multiplier(alpha, lam):
    """``(1 - |lam xi|^2 - |lam eta|^2)^alpha_+``."""
    l2 = lam * lam
    return BilinearMultiplier(lambda a, b: _br_profile(l2 * (a + b), alpha), True,
                              "|lam xi|^2 + |lam eta|^2 < 1")


def br_linear(f, alpha, lam):
    """``(1 - |lam xi|^2)^alpha_+`` applied to ``f``."""
    if alpha < 0 or lam <= 0:
        raise ValueError("need alpha >= 0 and lam > 0")
    return apply_fourier_multiplier(f, _br_profile(lam * lam * frequency_sq(f), alpha))


def _check_budget(f):
    cap = PAIR_BUDGET.get(f.d)
    if cap is None or f.n > cap:
        raise BudgetError(f"pair sum limited to n <= {cap} at d = {f.d}")


def pair_sum(f, g, m):
    """Bilinear multiplier ``m(|xi|^2, |eta|^2)`` applied to ``(f, g)``."""
    _check_same_grid(f, g)
    _check_budget(f)
    N = f.values.size
    c = np.fft.fftn(f.values) / N
    dcoef = np.fft.fftn(g.values) / N
    a = frequency_sq(f)
    H = np.zeros_like(c)
    axes = tuple(range(f.d))
    nz = np.abs(c) > 0
    for k in np.ndindex(c.shape):
        if not nz[k]:
            continue
        row = np.asarray(m(a[k], a), dtype=np.float64)
        H += np.roll(c[k] * row * dcoef, k, axis=axes)
    return GridFunction(np.fft.ifftn(H) * N, f.box_length, True)


def pair_sum_oracle(f, g, m, index_points):
    """Defining double sum at grid nodes, with unwrapped frequency sums.

    ``index_points`` is an ``(P, d)`` integer array of node indices.  Cost
    ``O(P n^{2d})``; meant as a test oracle.
    """
    _check_same_grid(f, g)
    n, d = f.n, f.d
    N = f.values.size
    c = (np.fft.fftn(f.values) / N).ravel()
    dcoef = (np.fft.fftn(g.values) / N).ravel()
    a = frequency_sq(f).ravel()
    M = np.asarray(m(a[:, None], a[None, :]), dtype=np.float64)
    k = np.fft.fftfreq(n, 1.0 / n)
    labels = np.stack(np.meshgrid(*([k] * d), indexing="ij"), -1).reshape(-1, d)
    out = []
    for j in np.atleast_2d(index_points):
        e = np.exp(2j * np.pi * (labels @ j) / n)
        out.append((c * e) @ M @ (dcoef * e))
    return np.array(out)


def br_bilinear(f, g, alpha, lam):
    """Bilinear Bochner-Riesz mean by pair summation."""
    if alpha < 0 or lam <= 0:
        raise ValueError("need alpha >= 0 and lam > 0")
    return pair_sum(f, g, br_multiplier(alpha, lam))


def br_bilinear_maximal(f, g, alpha, lam_grid):
    """Pointwise ``max |B_lam(f, g)|`` over the radii of ``lam_grid``."""
    lams = np.asarray(getattr(lam_grid, "radii", lam_grid), dtype=np.float64)
    out = None
    for lam in lams:
        v = np.abs(br_bilinear(f, g, alpha, float(lam)).values)
        out = v if out is None else np.maximum(out, v)
    return GridFunction(out, f.box_length, True)


# -- dyadic decomposition of (1 - t)^alpha_+ ------------------------------
@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    alpha: float
    J: int
    psi: BumpProfile
    psi0: BumpProfile
    residual: float
    residual_resolved: float
    bound: float

    def to_json(self):
        return json.dumps({"check": "br-reconstruct", "alpha": self.alpha, "J": self.J,
                           "sup_error": self.residual,
                           "sup_error_resolved": self.residual_resolved,
                           "constants": {"bound": self.bound}}, sort_keys=True)


def profile_partial_sum(t, alpha, J, psi=None, psi0=None):
    """``sum_{j=2}^J 2^{-j alpha} psi(2^j (1 - t)) + psi0(t)``."""
    psi = psi or dyadic_psi(alpha)
    psi0 = psi0 or dyadic_psi0(alpha)
    t = np.asarray(t, dtype=np.float64)
    s = 1 - t
    acc = np.zeros(t.shape)
    for j in range(2, J + 1):
        acc = acc + 2.0 ** (-j * alpha) * psi(2.0 ** j * s)
    return acc + psi0(t)


def dyadic_profile_decomposition(alpha, J=10, samples=2 ** 16):
    """Build ``psi``/``psi0`` and measure the truncation residual.

    The residual is taken over a uniform sample of ``[0, 1)`` together with a
    geometric sample of ``1 - t`` down to ``2^{-J-4}``.  Raises
    ``RuntimeError`` if it exceeds ``2^{-J alpha}`` globally or ``1e-10`` where
    ``1 - t >= 2^{-J}``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if J < 4:
        raise ValueError("J must be at least 4")
    psi, psi0 = dyadic_psi(alpha), dyadic_psi0(alpha)
    t = np.concatenate([np.linspace(0, 1, samples, endpoint=False),
                        1 - np.geomspace(2.0 ** (-J - 4), 1, samples)])
    exact = np.maximum(1 - t, 0) ** alpha
    err = np.abs(exact - profile_partial_sum(t, alpha, J, psi, psi0))
    resolved = (1 - t) >= 2.0 ** -J
    res = float(err.max())
    res_far = float(err[resolved].max())
    bound = 2.0 ** (-J * alpha)
    if res > bound or res_far > 1e-10:
        raise RuntimeError(f"reconstruction residual {res:.3e} exceeds {bound:.3e}")
    return DyadicDecomposition(alpha, J, psi, psi0, res, res_far, bound)


def _require_annular(psi):
    lo, hi = psi.support
    if lo < 0.5 or hi > 2:
        raise ValueError("annular profile must be supported in [1/2, 2]")


def annular_bilinear(f, g, delta, lam, psi):
    """``psi((1 - |lam xi|^2 - |lam eta|^2) / delta)`` by pair summation."""
    if not 0 < delta <= 0.25:
        raise ValueError("delta must lie in (0, 1/4]")
    _require_annular(psi)
    l2 = lam * lam

    def m(a, b):
        x = (1 - l2 * (a + b)) / delta
        return psi(x)

    return pair_sum(f, g, m)


def smooth_part(f, g, alpha, lam, psi0=None):
    """The ``psi0(|lam xi|^2 + |lam eta|^2)`` piece."""
    psi0 = psi0 or dyadic_psi0(alpha)
    l2 = lam * lam
    return pair_sum(f, g, lambda a, b: psi0(l2 * (a + b)))


def reconstruction_check(alpha, lam, like, J=10):
    """Lattice sup of the multiplier gap between the Bochner-Riesz symbol and
    ``sum_{delta >= 2^{-J}} delta^alpha psi((1 - .)/delta) + psi0``."""
    psi, psi0 = dyadic_psi(alpha), dyadic_psi0(alpha)
    s = np.unique(frequency_sq(like))
    x = lam * lam * (s[:, None] + s[None, :])
    exact = _br_profile(x, alpha)
    approx = psi0(x)
    for j in range(2, J + 1):
        delta = 2.0 ** -j
        approx = approx + delta ** alpha * psi((1 - x) / delta)
    return float(np.max(np.abs(exact - approx)))


# -- square functions ------------------------------------------------------
def _require_certified(phi):
    if phi.certified_cn is None or not phi.in_class(phi.order):
        raise UncertifiedProfileError(f"profile {phi.name!r} is not certified")


def s_op(f, phi, rho, delta, lam=1.0):
    """``phi((rho - |lam xi|^2) / delta)`` applied to ``f``."""
    _require_certified(phi)
    m = phi((rho - lam * lam * frequency_sq(f)) / delta)
    return apply_fourier_multiplier(f, m)


def _uniform(ts, lo, hi):
    ts = np.asarray(ts, dtype=np.float64)
    if ts.ndim != 1 or ts.size < 2:
        return False
    dt = np.diff(ts)
    return (abs(ts[0] - lo) < 1e-12 and abs(ts[-1] - hi) < 1e-12
            and np.allclose(dt, dt[0], rtol=1e-9, atol=0))


def _trapezoid_weights(ts):
    ts = np.asarray(ts, dtype=np.float64)
    w = np.zeros(ts.size)
    dt = np.diff(ts)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w


def lo_square_function(f, phi, delta, t_samples=None, chunk=64):
    """``(int_{1/2}^2 |phi((t - |D|^2)/delta) f|^2 dt)^{1/2}``, trapezoid in t."""
    _require_certified(phi)
    if t_samples is None:
        t_samples = np.linspace(0.5, 2.0, int(math.ceil(12 / delta)) + 1)
    t_samples = np.asarray(t_samples, dtype=np.float64)
    if not _uniform(t_samples, 0.5, 2.0) or t_samples.size < 8 / delta:
        raise UnderResolvedError("t grid must be uniform on [1/2, 2] with >= 8/delta points")
    w = _trapezoid_weights(t_samples)
    chat = np.fft.fftn(f.values)
    s = frequency_sq(f)
    axes = tuple(range(1, f.d + 1))
    acc = np.zeros(f.values.shape)
    for i in range(0, t_samples.size, chunk):
        tt = t_samples[i:i + chunk].reshape((-1,) + (1,) * f.d)
        mult = phi((tt - s[None]) / delta)
        active = np.any(mult != 0, axis=axes)
        if not np.any(active):
            continue
        out = np.fft.ifftn(mult[active] * chat[None], axes=axes)
        acc += np.tensordot(w[i:i + chunk][active], np.abs(out) ** 2, axes=1)
    return GridFunction(np.sqrt(acc), f.box_length, True)


@dataclass(frozen=True, eq=False)
class MixedSquareResult:
    sup: GridFunction
    slices: dict
    meta: dict = field(default_factory=dict)


def _shells(f):
    """Split ``f`` into pieces ``F_s`` carried by the frequency shells ``|k|^2 = s``."""
    chat = np.fft.fftn(f.values)
    ks = integer_frequency_sq(f)
    keep = np.abs(chat) > 0
    shells = np.unique(ks[keep])
    pieces = np.empty((shells.size,) + f.values.shape, dtype=np.complex128)
    for i, s in enumerate(shells):
        pieces[i] = np.fft.ifftn(np.where(ks == s, chat, 0))
    return shells / f.box_length ** 2, pieces


def _gram(phi, s_phys, rho, lams, w, scale, delta):
    """``Gamma = Phi diag(w) Phi^T`` with
    ``Phi[s, (i, j)] = phi((rho_i - scale lam_j^2 s) / delta)`` (sparse)."""
    S, R, T = s_phys.size, rho.size, lams.size
    u = scale * (lams[None, :] ** 2) * s_phys[:, None]
    base = np.floor(u / delta).astype(np.int64)
    rows, cols, vals = [], [], []
    jj = np.broadcast_to(np.arange(T)[None, :], (S, T))
    ss = np.broadcast_to(np.arange(S)[:, None], (S, T))
    for off in (-1, 0, 1, 2):
        i = base + off
        ok = (i >= 0) & (i < R)
        v = np.zeros(u.shape)
        v[ok] = phi((rho[i[ok]] - u[ok]) / delta)
        ok &= v != 0
        rows.append(ss[ok])
        cols.append(i[ok] * T + jj[ok])
        vals.append(v[ok] * np.sqrt(w[jj[ok]]))
    Phi = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows),
                                                    np.concatenate(cols))),
                            shape=(S, R * T))
    return (Phi @ Phi.T).toarray()


def mixed_square_function(f, phi, delta, k_range=(-2, -1, 0, 1), lam_samples=None):
    """``sup_k (sum_{rho in delta Z cap [0,2]} int_1^2 |S_{rho,delta,2^k lam} f|^2 dlam)^{1/2}``.

    Each slice is evaluated through the shell Gram matrix: writing
    ``f = sum_s F_s`` over frequency shells, the slice squared equals
    ``Re sum_{s,s'} Gamma_{s s'} F_s conj(F_{s'})``.
    """
    _require_certified(phi)
    if not 0 < delta <= 0.25:
        raise ValueError("delta must lie in (0, 1/4]")
    if lam_samples is None:
        lam_samples = np.linspace(1.0, 2.0, int(math.ceil(32 / delta)) + 1)
    lam_samples = np.asarray(lam_samples, dtype=np.float64)
    if not _uniform(lam_samples, 1.0, 2.0) or lam_samples.size < 8 / delta:
        raise UnderResolvedError("lambda grid must be uniform on [1, 2] with >= 8/delta points")
    w = _trapezoid_weights(lam_samples)
    rho = delta * np.arange(int(math.floor(2 / delta + 1e-9)) + 1)
    s_phys, pieces = _shells(f)
    flat = pieces.reshape(pieces.shape[0], -1)
    slices = {}
    sup = np.zeros(f.values.shape)
    for k in k_range:
        if s_phys.size == 0:
            val = np.zeros(f.values.shape)
        else:
            G = _gram(phi, s_phys, rho, lam_samples, w, 4.0 ** k, delta)
            sq = np.real(np.sum(np.conj(flat) * (G @ flat), axis=0))
            val = np.sqrt(np.maximum(sq, 0)).reshape(f.values.shape)
        slices[k] = GridFunction(val, f.box_length, True)
        sup = np.maximum(sup, val)
    meta = {"delta": delta, "k_range": list(k_range), "n_lambda": lam_samples.size,
            "n_rho": rho.size}
    return MixedSquareResult(GridFunction(sup, f.box_length, True), slices, meta)


# -- kernel decay ----------------------------------------------------------
@dataclass(frozen=True)
class KernelReport:
    delta: float
    rho: float
    d: int
    n: int
    box_length: float
    constant: float
    edge_ratio: float

    def to_json(self):
        return json.dumps({"check": "kernel", **asdict(self)}, sort_keys=True)


def kernel_decay_check(phi, delta, rho=None, d=2, n=512, edge_tol=1e-3,
                       return_kernel=False):
    """``sup_x |K(x)| delta^{-d/2} (1 + delta^{1/2}|x|)^{d+1}`` for the kernel
    of ``phi((rho - |xi|^2)/delta)`` on a box of side ``64/sqrt(delta)``."""
    _require_certified(phi)
    if phi.order < d + 1:
        raise UncertifiedProfileError(f"need a C^{d + 1} certificate")
    rho = 4 * delta if rho is None else rho
    if rho > 4 * delta + 1e-15:
        raise ValueError("need rho <= 4 delta")
    L = 64 / math.sqrt(delta)
    like = GridFunction.zeros(d, n, L)
    m = phi((rho - frequency_sq(like)) / delta)
    K = inverse_fourier_transform(m, like)
    r = np.sqrt(sum(c * c for c in like.mesh()))
    absK = np.abs(K.values)
    top = absK.max()
    if top == 0:
        rep = KernelReport(delta, rho, d, n, L, 0.0, 0.0)
        return (rep, K) if return_kernel else rep
    edge = np.zeros(absK.shape, dtype=bool)
    for c in like.mesh():
        edge |= np.abs(c) >= 0.45 * L
    edge_ratio = float(absK[edge].max() / top)
    if edge_ratio > edge_tol:
        raise UnderResolvedError(f"kernel tail at box edge is {edge_ratio:.2e} of the peak")
    const = float(np.max(absK * delta ** (-d / 2) * (1 + math.sqrt(delta) * r) ** (d + 1)))
    rep = KernelReport(delta, rho, d, n, L, const, edge_ratio)
    return (rep, K) if return_kernel else rep


# -- multiplier partition --------------------------------------------------
@dataclass(frozen=True)
class PartitionReport:
    delta: float
    eps: float
    lam: float
    sup_error: float
    partition_error: float
    active_cells: int
    cell_bound: float
    max_cells_per_pair: int
    n_pairs: int
    n_in_shell: int

    def to_json(self):
        return json.dumps({"check": "partition", **asdict(self)}, sort_keys=True)


def multiplier_partition_check(delta=0.125, eps=0.25, lam=1.6, d=2, n=32,
                               box_length=32.0, psi=None, phi=None):
    """Split ``psi((1 - a - b)/delta)`` over ``(varrho, rho)`` cells of side
    ``delta^{1+eps}`` and compare with the unsplit multiplier on the lattice.

    The multiplier depends on a pair only through ``(|xi|^2, |eta|^2)``, so the
    comparison runs over all distinct pairs of lattice shells.
    """
    psi = psi or dyadic_psi(1.0)
    phi = phi or partition_phi()
    tt = np.linspace(-3, 3, 60001)
    part_err = float(np.max(np.abs(sum(phi(tt + k) for k in range(-5, 6)) - 1)))
    if part_err > 1e-12:
        raise ValueError("profile is not a partition of unity")
    dt = delta ** (1 + eps)
    like = GridFunction.zeros(d, n, box_length)
    s = lam * lam * np.unique(frequency_sq(like))
    rho = dt * np.arange(0, int(math.floor(2 / dt + 1e-9)) + 1)
    lo = int(math.ceil((1 - 4 * delta) / dt - 1e-9))
    hi = int(math.floor((1 + 2 * delta) / dt + 1e-9))
    vrho = dt * np.arange(lo, hi + 1)
    A = s[:, None]
    B = s[None, :]
    lhs = psi((1 - A - B) / delta)
    # P[a, i] = phi((rho_i - a)/dt), Q[i, b, v] = phi((vrho_v - rho_i - b)/dt)
    P = phi((rho[None, :] - s[:, None]) / dt)
    Q = phi((vrho[None, None, :] - rho[:, None, None] - s[None, :, None]) / dt)
    rhs = lhs * np.einsum("ai,ibv->ab", P, Q)
    shell = lhs != 0
    err = float(np.max(np.abs(lhs - rhs)))
    cell_pair = (P[:, :, None, None] != 0) & (Q[None] != 0) & shell[:, None, :, None]
    active = int(np.count_nonzero(np.any(cell_pair, axis=(0, 2))))
    per_pair = int(np.max(np.sum(cell_pair, axis=(1, 3)))) if np.any(shell) else 0
    bound = (6 * delta / dt + 2) * (2 / dt + 2)
    return PartitionReport(delta, eps, lam, err, part_err, active, bound, per_pair,
                           s.size ** 2, int(np.count_nonzero(shell)))


# -- fundamental theorem bridge -------------------------------------------
@dataclass(frozen=True, eq=False)
class BridgeReport:
    lhs: np.ndarray
    rhs: np.ndarray
    max_excess: float

    @property
    def passed(self):
        return self.max_excess <= 0


def ftc_bridge_check(f, g, delta, psi=None, block=(1.0, 2.0), samples=129):
    """Check ``max_t |F(t)| <= mean_t |F| + int |dF/dt|`` pointwise, where
    ``F(t) = annular_bilinear(f, g, delta, t, psi)`` and ``dF/dt`` is applied
    as the multiplier ``-2 t (a + b) / delta * psi'((1 - t^2 (a + b))/delta)``.
    """
    psi = psi or dyadic_psi(1.0)
    _require_annular(psi)
    a0, a1 = block
    ts = np.linspace(a0, a1, samples)
    w = _trapezoid_weights(ts)
    Fs, Ds = [], []
    for t in ts:
        Fs.append(np.abs(annular_bilinear(f, g, delta, t, psi).values))

        def mt(a, b, t=t):
            x = a + b
            return -2 * t * x / delta * psi.derivative((1 - t * t * x) / delta, 1)

        Ds.append(np.abs(pair_sum(f, g, mt).values))
    Fs, Ds = np.array(Fs), np.array(Ds)
    lhs = Fs.max(axis=0)
    rhs = np.tensordot(w, Fs, axes=1) / (a1 - a0) + np.tensordot(w, Ds, axes=1)
    excess = float(np.max(lhs - rhs * (1 + 1e-9) - 1e-300))
    return BridgeReport(lhs, rhs, excess)

