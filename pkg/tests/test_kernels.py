import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab import _kernels_py, kernels

compiled = pytest.importorskip("bilinear_lab._kernels")


@settings(max_examples=25, deadline=None)
@given(d=st.sampled_from([2, 3]), seed=st.integers(0, 2 ** 31 - 1))
def test_shift_sum_backends_agree(d, seed):
    rng = np.random.default_rng(seed)
    n = 8
    vals = rng.standard_normal((n,) * d)
    base = kernels.grid_indices(n, d)
    offs = rng.uniform(-3, 3, (7, d))
    w = rng.random(7)
    a = kernels.shift_sum(vals, base, offs, w, impl=_kernels_py)
    b = kernels.shift_sum(vals, base, offs, w, impl=compiled)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(d=st.sampled_from([2, 3]), seed=st.integers(0, 2 ** 31 - 1))
def test_sample_points_backends_agree(d, seed):
    rng = np.random.default_rng(seed)
    n = 16
    vals = rng.standard_normal((n,) * d) + 1j * rng.standard_normal((n,) * d)
    ipos = rng.integers(-40, 40, (50, d))
    frac = rng.random((50, d))
    a = kernels.sample_points(vals, ipos, frac, impl=_kernels_py)
    b = kernels.sample_points(vals, ipos, frac, impl=compiled)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_integer_offsets_are_exact_shifts():
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((8, 8))
    base = kernels.grid_indices(8, 2)
    out = kernels.shift_sum(vals, base, [[2.0, -1.0]], [1.0])
    np.testing.assert_array_equal(out.reshape(8, 8), np.roll(vals, (-2, 1), axis=(0, 1)))


def test_split_offsets():
    ip, fr = kernels.split_offsets([[-0.25, 1.5]])
    np.testing.assert_array_equal(ip, [[-1, 1]])
    np.testing.assert_allclose(fr, [[0.75, 0.5]])


def test_environment_forces_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, BILINEAR_LAB_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import bilinear_lab as b; print(b.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
