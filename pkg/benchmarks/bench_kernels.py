"""Compare the compiled and numpy interpolation kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Each case is timed with
``timeit`` (best of several repeats) and the outputs of both backends are
checked for agreement.
"""
import argparse
import timeit

import numpy as np

from bilinear_lab import _kernels_py, kernels
from bilinear_lab.quadrature import ball_rule

try:
    from bilinear_lab import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None


def _cases(rng):
    for d, n, order in ((2, 64, 8), (2, 128, 8), (3, 32, 6)):
        vals = rng.standard_normal((n,) * d)
        base = kernels.grid_indices(n, d)
        rule = ball_rule(d, order)
        offs = rule.nodes * (0.3 * n / 4)
        yield f"shift_sum d={d} n={n} K={len(rule)}", \
            lambda impl, v=vals, b=base, o=offs, w=rule.weights: kernels.shift_sum(v, b, o, w, impl)
    for d, n, p in ((2, 256, 200_000), (3, 64, 200_000)):
        vals = rng.standard_normal((n,) * d)
        ipos = rng.integers(0, n, (p, d))
        frac = rng.random((p, d))
        yield f"sample_points d={d} n={n} P={p}", \
            lambda impl, v=vals, i=ipos, f=frac: kernels.sample_points(v, i, f, impl)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    if _compiled is None:
        print("compiled kernels not built; nothing to compare")
        return
    rng = np.random.default_rng(args.seed)
    print(f"{'case':40s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in _cases(rng):
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(fn(_kernels_py) - fn(_compiled))))
        print(f"{name:40s} {1e3 * t_py:11.2f} {1e3 * t_cy:12.2f} {t_py / t_cy:8.1f} {diff:9.1e}")


if __name__ == "__main__":
    main()
