import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab.grid import GridFunction
from bilinear_lab.spherical import (direct_bilinear_average, direct_multilinear_average,
                                    linear_spherical_average, multilinear_average,
                                    sliced_bilinear_average)

L = 8.0


def _wave(kx, ky):
    return GridFunction.from_function(
        lambda x, y: np.exp(2j * np.pi * (kx * x + ky * y) / L), 2, 32, L, periodic=True)


def test_constants_give_sphere_area():
    one = GridFunction.constant(1.0, 2, 16, L)
    np.testing.assert_allclose(direct_bilinear_average(one, one, (0, 0), 0.7), 2 * np.pi ** 2,
                               rtol=1e-13)
    np.testing.assert_allclose(sliced_bilinear_average(one, one, (0, 0), 0.7), 2 * np.pi ** 2,
                               rtol=1e-13)


@settings(max_examples=15, deadline=None)
@given(kx=st.integers(-2, 2), ky=st.integers(-2, 2), lx=st.integers(-2, 2),
       t=st.floats(0.2, 1.0), x0=st.floats(-1, 1))
def test_direct_and_sliced_agree_spectral(kx, ky, lx, t, x0):
    f, g = _wave(kx, ky), _wave(lx, 1)
    a = direct_bilinear_average(f, g, (x0, 0.3), t, order=12, method="spectral")
    b = sliced_bilinear_average(f, g, (x0, 0.3), t, order=12, method="spectral")
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_multilinear_three_factors():
    one = GridFunction.constant(1.0, 2, 16, L)
    f = _wave(1, 0)
    a = direct_multilinear_average([f, one, f], (0.1, 0.2), 0.5, order=8, method="spectral")
    b = multilinear_average([f, one, f], (0.1, 0.2), 0.5, order=8, method="spectral")
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_linear_average_of_radial_gaussian():
    f = GridFunction.from_function(lambda x, y: np.exp(-(x * x + y * y)), 2, 64, L,
                                   periodic=True)
    got = linear_spherical_average(f, (0, 0), 0.5, method="spectral")
    np.testing.assert_allclose(got, 2 * np.pi * np.exp(-0.25), rtol=1e-8)


def test_translation_by_whole_cells_is_exact():
    rng = np.random.default_rng(0)
    f = GridFunction(rng.random((16, 16)), L, periodic=True)
    g = GridFunction(rng.random((16, 16)), L, periodic=True)
    h = f.h
    a = sliced_bilinear_average(f, g, (0.13, -0.4), 0.9)
    b = sliced_bilinear_average(f.translate((3, -2)), g.translate((3, -2)),
                                (0.13 + 3 * h, -0.4 - 2 * h), 0.9)
    assert a == pytest.approx(b, abs=1e-13)
