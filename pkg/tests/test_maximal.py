import numpy as np
import pytest

from bilinear_lab.grid import GridFunction, WrapAroundError
from bilinear_lab.maximal import (RadiusGrid, bilinear_maximal, bilinear_value_at_radius,
                                  hl_maximal, pointwise_domination_report, spherical_maximal,
                                  strong_bilinear_maximal)
from bilinear_lab.spherical import sliced_bilinear_average


def _compact(seed, n=32, L=8.0, margin=8):
    rng = np.random.default_rng(seed)
    v = np.zeros((n, n))
    v[margin:n - margin, margin:n - margin] = rng.random((n - 2 * margin,) * 2)
    return GridFunction(v, L)


def test_radius_grids():
    g = RadiusGrid.global_dyadic(-1, 0, 4)
    np.testing.assert_allclose(g.radii, [0.5, 0.625, 0.75, 0.875, 1, 1.25, 1.5, 1.75])
    loc = RadiusGrid.local_unit(4)
    assert loc.radii[0] == 1 and loc.radii[-1] == 2
    with pytest.raises(ValueError):
        RadiusGrid.explicit([0.0, 1.0])


def test_bilinear_maximal_matches_pointwise_average():
    f, g = _compact(0), _compact(1)
    radii = RadiusGrid.explicit([0.5, 1.0])
    res = bilinear_maximal(f, g, radii, order=8)
    idx = (16, 12)
    x = (f.axis[idx[0]], f.axis[idx[1]])
    best = max(sliced_bilinear_average(f, g, x, t, order=8) for t in radii.radii)
    np.testing.assert_allclose(res.values.values[idx], best, rtol=1e-12)


def test_strong_restricted_to_diagonal():
    f, g = _compact(2), _compact(3)
    radii = RadiusGrid.explicit([0.75])
    a = bilinear_maximal(f, g, radii).values.values
    b = strong_bilinear_maximal(f, g, radii, radii).values.values
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_value_at_radius_matches_maximal():
    f, g = _compact(4), _compact(5)
    a = bilinear_value_at_radius(f, g, 0.5)
    b = bilinear_maximal(f, g, RadiusGrid.explicit([0.5])).values.values
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_hl_maximal_of_constant_region():
    f = GridFunction.constant(1.0, 2, 16, 8.0)
    res = hl_maximal(f, RadiusGrid.explicit([0.5, 1.0]))
    np.testing.assert_allclose(res.values.values.real, 1.0, rtol=1e-13)


def test_spherical_maximal_constant():
    f = GridFunction.constant(3.0, 2, 16, 8.0)
    res = spherical_maximal(f, RadiusGrid.explicit([1.0]))
    np.testing.assert_allclose(res.values.values.real, 3.0 * 2 * np.pi, rtol=1e-13)


def test_domination_report_small():
    f, g = _compact(6), _compact(7)
    rep = pointwise_domination_report(f, g, RadiusGrid.global_dyadic(-2, 0, 4))
    assert rep.passed
    assert rep.max_ratio <= 1 + 1e-12
    assert rep.to_csv().startswith("index,value")


def test_domination_needs_nonnegative():
    f = _compact(8)
    with pytest.raises(ValueError):
        pointwise_domination_report(f * -1.0, f, RadiusGrid.explicit([0.5]))


def test_wraparound_guard():
    f = GridFunction.constant(1.0, 2, 16, 4.0)
    f = GridFunction(f.values, 4.0, periodic=False)
    with pytest.raises(WrapAroundError):
        bilinear_maximal(f, f, RadiusGrid.explicit([0.5]))
