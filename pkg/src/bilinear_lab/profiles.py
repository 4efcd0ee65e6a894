"""Compactly supported profiles with certified derivative bounds.

The smooth step ``B(s) = h(2 - s) / (h(2 - s) + h(s - 1))`` with
``h(x) = exp(-1/x)`` equals 1 on ``s <= 1`` and 0 on ``s >= 2``; all the
dyadic pieces below are built from it, so their sums telescope exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.special import expit

__all__ = [
    "BumpProfile",
    "smooth_step",
    "smooth_step_derivative",
    "dyadic_chi",
    "dyadic_psi",
    "dyadic_psi0",
    "partition_phi",
    "profile_corpus",
    "CERT_SAMPLES",
]

CERT_SAMPLES = 2 ** 14
_FD4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def smooth_step(s):
    """``B(s)``: 1 for ``s <= 1``, 0 for ``s >= 2``, smooth in between."""
    s = np.asarray(s, dtype=np.float64)
    out = np.where(s <= 1, 1.0, 0.0)
    mid = (s > 1) & (s < 2)
    sm = s[mid]
    out[mid] = expit(1 / (sm - 1) - 1 / (2 - sm))
    return out if out.ndim else float(out)


def smooth_step_derivative(s):
    """``B'(s) = -B (1 - B) (1/(2-s)^2 + 1/(s-1)^2)`` on ``(1, 2)``, else 0."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    mid = (s > 1) & (s < 2)
    sm = s[mid]
    b = expit(1 / (sm - 1) - 1 / (2 - sm))
    out[mid] = -b * (1 - b) * (1 / (2 - sm) ** 2 + 1 / (sm - 1) ** 2)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class BumpProfile:
    """A real profile vanishing outside ``support = (lo, hi)``.

    Attributes
    ----------
    func : callable
        Vectorized evaluation on points strictly inside the support.
    derivatives : tuple of callable
        Closed-form derivatives ``phi', phi'', ...`` when known.
    certified_cn : ndarray
        ``max |phi^(n)|`` for ``n = 0..N`` on a dense sample.
    """

    name: str
    func: object
    support: tuple
    derivatives: tuple = ()
    certified_cn: np.ndarray = field(default=None, repr=False)

    def __call__(self, t):
        return self._eval(self.func, t)

    def _eval(self, fn, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros(t.shape)
        lo, hi = self.support
        inside = (t > lo) & (t < hi)
        if np.any(inside):
            out[inside] = fn(t[inside])
        return out if out.ndim else float(out)

    def derivative(self, t, n=1):
        """``phi^(n)(t)``; closed form when available, else differences."""
        if n == 0:
            return self(t)
        if n <= len(self.derivatives):
            return self._eval(self.derivatives[n - 1], t)
        t = np.asarray(t, dtype=np.float64)
        step = (self.support[1] - self.support[0]) / CERT_SAMPLES
        acc = np.zeros(t.shape)
        base = n - 1
        for c, k in zip(_FD4, range(-2, 3)):
            if c:
                acc = acc + c * np.asarray(self.derivative(t + k * step, base))
        out = acc / step
        return out if out.ndim else float(out)

    @property
    def support_radius(self):
        return max(abs(self.support[0]), abs(self.support[1]))

    @property
    def order(self):
        return -1 if self.certified_cn is None else self.certified_cn.size - 1

    def certify(self, N, samples=CERT_SAMPLES):
        """Return a copy with ``certified_cn`` filled for orders ``0..N``."""
        lo, hi = self.support
        t = np.linspace(lo, hi, samples + 1)
        vals = [np.max(np.abs(self(t)))]
        k = len(self.derivatives)
        for n in range(1, min(N, k) + 1):
            vals.append(np.max(np.abs(self.derivative(t, n))))
        if N > k:
            # fourth-order differences of the highest closed form, on a
            # padded grid (the profile is identically zero outside)
            step = (hi - lo) / samples
            pad = 2 * (N - k)
            tp = lo + step * np.arange(-pad, samples + 1 + pad)
            cur = np.asarray(self.derivative(tp, k), dtype=np.float64)
            for n in range(k + 1, N + 1):
                cur = np.convolve(cur, _FD4[::-1], mode="same") / step
                core = cur[pad:pad + samples + 1]
                vals.append(np.max(np.abs(core)))
        return BumpProfile(self.name, self.func, self.support, self.derivatives,
                           np.array(vals, dtype=np.float64))

    def in_class(self, N):
        """Membership in the normalized class: ``max_{n <= N} |phi^(n)| <= 1``."""
        if self.certified_cn is None or self.order < N:
            return False
        if self.support_radius > 1:
            return False
        return bool(np.all(self.certified_cn[:N + 1] <= 1 + 1e-12))

    def scaled(self, c, name=None):
        f, ds = self.func, self.derivatives
        out = BumpProfile(name or self.name, lambda t: c * f(t), self.support,
                          tuple((lambda t, g=g: c * g(t)) for g in ds))
        if self.certified_cn is not None:
            out = BumpProfile(out.name, out.func, out.support, out.derivatives,
                              abs(c) * self.certified_cn)
        return out

    def normalized(self, N):
        """Scale so that the largest of the first ``N`` derivative sups is 1."""
        prof = self if self.order >= N else self.certify(N)
        top = float(np.max(prof.certified_cn[:N + 1]))
        return prof.scaled(1 / top)

    @classmethod
    def from_sympy(cls, expr, symbol, support, N, name="sympy"):
        """Profile from a symbolic expression valid inside ``support``."""
        fn = sp.lambdify(symbol, expr, "numpy")
        ds, cur = [], expr
        for _ in range(N):
            cur = sp.diff(cur, symbol)
            ds.append(sp.lambdify(symbol, cur, "numpy"))

        def vec(g):
            return lambda t: np.broadcast_to(g(t), np.shape(t)).astype(np.float64)

        prof = cls(name, vec(fn), tuple(float(s) for s in support),
                   tuple(vec(g) for g in ds))
        return prof.certify(N)


def dyadic_chi():
    """``chi(s) = B(s) - B(2s)``, supported in ``[1/2, 2]``;
    ``sum_j chi(2^j s) = 1`` for ``s > 0``."""
    def f(s):
        return smooth_step(s) - smooth_step(2 * s)

    def df(s):
        return smooth_step_derivative(s) - 2 * smooth_step_derivative(2 * s)

    return BumpProfile("chi", f, (0.5, 2.0), (df,))


def dyadic_psi(alpha):
    """``psi(s) = s^alpha chi(s)`` with its closed-form first derivative."""
    chi = dyadic_chi()

    def f(s):
        return s ** alpha * chi.func(s)

    def df(s):
        return alpha * s ** (alpha - 1) * chi.func(s) + s ** alpha * chi.derivatives[0](s)

    return BumpProfile(f"psi[{alpha}]", f, (0.5, 2.0), (df,))


def dyadic_psi0(alpha):
    """Smooth remainder ``psi0(t) = (1-t)^alpha (1 - B(4(1-t))) B(1/2 - 2t)``.

    Vanishes for ``t >= 3/4`` (where ``4(1-t) <= 1``) and for
    ``t <= -3/4``; on ``t >= -1/4`` the last factor is 1.
    """
    def f(t):
        s = 1 - t
        return s ** alpha * (1 - smooth_step(4 * s)) * smooth_step(0.5 - 2 * t)

    return BumpProfile(f"psi0[{alpha}]", f, (-0.75, 0.75))


def partition_phi():
    """``phi(t) = B(t + 1) - B(t + 2)``: even, supported in ``[-1, 1]``,
    and ``sum_k phi(t + k) = 1`` by telescoping."""
    def f(t):
        return smooth_step(t + 1) - smooth_step(t + 2)

    def df(t):
        return smooth_step_derivative(t + 1) - smooth_step_derivative(t + 2)

    return BumpProfile("phi", f, (-1.0, 1.0), (df,))


def profile_corpus(N=4):
    """Five profiles on ``[-1, 1]``, each normalized in ``C^N``."""
    t = sp.Symbol("t", real=True)
    exprs = [
        ("poly6", (1 - t ** 2) ** 6),
        ("poly8", (1 - t ** 2) ** 8),
        ("odd6", t * (1 - t ** 2) ** 6),
        ("cos6", sp.cos(sp.pi * t / 2) ** 6),
        ("expbump", sp.exp(1 - 1 / (1 - t ** 2))),
    ]
    out = []
    for name, e in exprs:
        prof = BumpProfile.from_sympy(e, t, (-1, 1), N, name)
        out.append(prof.normalized(N))
    return out

