import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab.grid import (CommensurabilityError, GridFunction, WrapAroundError,
                               apply_fourier_multiplier, frequency_sq, load_snapshot,
                               lorentz_norm, lp_norm, rescale, sample, sample_many,
                               save_snapshot)


def _gauss(*x):
    return np.exp(-sum(xi * xi for xi in x))


def test_lp_norm_constant():
    f = GridFunction.constant(2.0, 2, 16, 4.0)
    assert lp_norm(f, 0.5) == pytest.approx(2.0 * 4.0)
    assert lp_norm(f, 0) == 2.0
    assert lp_norm(f, 1) == pytest.approx(2.0 * 16.0)


def test_lp_norm_gaussian_quadrature():
    f = GridFunction.from_function(_gauss, 2, 64, 12.0, periodic=True)
    np.testing.assert_allclose(lp_norm(f, 1), np.pi, rtol=1e-10)


def test_weak_lorentz_of_indicator_matches_strong():
    vals = np.zeros((16, 16))
    vals[4:8, 4:8] = 1.0
    f = GridFunction(vals, 16.0)
    # for an indicator the L^{p,s} norms agree up to (p/s)^{1/s}
    assert lorentz_norm(f, 0.5, 0) == pytest.approx(lp_norm(f, 0.5))
    assert lorentz_norm(f, 0.5, 0.5) == pytest.approx(lp_norm(f, 0.5))


def test_sample_on_nodes_is_exact():
    rng = np.random.default_rng(1)
    f = GridFunction(rng.standard_normal((16, 16)), 4.0, periodic=True)
    x = f.axis[3], f.axis[11]
    assert sample(f, x) == pytest.approx(f.values[3, 11], abs=1e-14)


def test_linear_sampling_reproduces_affine():
    f = GridFunction.from_function(lambda x, y: 1 + 2 * x - y, 2, 32, 8.0)
    pts = np.random.default_rng(2).uniform(-2, 2, (20, 2))
    np.testing.assert_allclose(sample_many(f, pts), 1 + 2 * pts[:, 0] - pts[:, 1], atol=1e-12)


def test_spectral_sampling_trig_polynomial():
    L = 8.0
    f = GridFunction.from_function(lambda x, y: np.cos(2 * np.pi * (x + 2 * y) / L), 2, 16, L,
                                   periodic=True)
    pts = np.random.default_rng(3).uniform(-3, 3, (10, 2))
    np.testing.assert_allclose(sample_many(f, pts, method="spectral"),
                               np.cos(2 * np.pi * (pts[:, 0] + 2 * pts[:, 1]) / L), atol=1e-12)


def test_boundary_guard():
    f = GridFunction.constant(1.0, 2, 16, 4.0)
    f = GridFunction(f.values, 4.0, periodic=False)
    with pytest.raises(WrapAroundError):
        sample(f, (1.99, 0.0))


@settings(max_examples=20, deadline=None)
@given(m=st.integers(-3, 3), up=st.sampled_from([0.25, 0.5, 1.0]))
def test_rescale_norm_identity(m, up):
    f = GridFunction(np.random.default_rng(m + 10).random((8, 8)), 4.0)
    g = rescale(f, m)
    np.testing.assert_allclose(lp_norm(g, up), 2.0 ** (-2 * m * up) * lp_norm(f, up),
                               rtol=1e-12)


def test_rescale_requires_integer():
    with pytest.raises(CommensurabilityError):
        rescale(GridFunction.zeros(2, 8, 1.0), 0.5)


def test_fourier_multiplier_heat():
    L = 8.0
    f = GridFunction.from_function(lambda x, y: np.cos(2 * np.pi * x / L), 2, 16, L,
                                   periodic=True)
    g = apply_fourier_multiplier(f, np.exp(-frequency_sq(f)))
    np.testing.assert_allclose(g.values.real, f.values * np.exp(-(1 / L) ** 2), atol=1e-14)


def test_snapshot_roundtrip(tmp_path):
    f = GridFunction(np.random.default_rng(4).random((8, 8)), 2.0, periodic=True)
    path = tmp_path / "snap.bin"
    save_snapshot(f, path, {"seed": 4})
    g = load_snapshot(path)
    g = g[0] if isinstance(g, tuple) else g
    np.testing.assert_array_equal(g.values, f.values)
    assert g.box_length == f.box_length
