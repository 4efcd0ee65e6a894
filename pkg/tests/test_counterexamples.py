import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab.counterexamples import (FitResult, ScanRecord, adapted_bilinear_average,
                                          annulus_constants, annulus_family,
                                          fit_scaling_exponent, knapp_constants, knapp_family,
                                          probe_statistic, run_scan, scan_summary, scan_to_csv,
                                          sphere_average_adapted)
from bilinear_lab.grid import GridFunction
from bilinear_lab.spherical import linear_spherical_average, sliced_bilinear_average


def _bump(center=(0.0, 0.0), width=0.6, n=128, L=4.0):
    def fn(x, y):
        r2 = ((x - center[0]) ** 2 + (y - center[1]) ** 2) / width ** 2
        return np.where(r2 < 1, (1 - r2) ** 3, 0.0)
    return GridFunction.from_function(fn, 2, n, L)


def test_knapp_constants_ordering():
    c = knapp_constants(0.125)
    assert c["C1"] > 3 * c["C2"]
    assert c["C2"] == c["C3"]
    with pytest.raises(ValueError):
        knapp_constants(0.5)


def test_annulus_constants_window():
    c = annulus_constants(0.125)
    assert 2 < c["C1"] < 2 ** -1.5 / 0.125
    with pytest.raises(ValueError):
        annulus_constants(0.125, C1=1.5)
    with pytest.raises(ValueError):
        annulus_constants(0.2)


def test_resolution_guard():
    with pytest.raises(ValueError):
        knapp_family(2, 1 / 64, n=256)
    with pytest.raises(ValueError):
        annulus_family(2, 0.2)


def test_adapted_matches_sliced_average():
    f = _bump((0.1, 0.0), 0.6)
    g = _bump((0.0, -0.2), 0.7)
    x, t = (0.05, 0.1), 0.5
    a = adapted_bilinear_average(f, g, x, t)
    b = sliced_bilinear_average(f, g, x, t, order=24)
    np.testing.assert_allclose(a, b, rtol=1e-3)


def test_adapted_sphere_average_matches_rule():
    g = _bump((0.3, 0.1), 0.5)
    x = np.array([0.0, 0.0])
    got = sphere_average_adapted(g, x, [0.2, 0.4])
    ref = [linear_spherical_average(g, x, s, order=256, signed=True) for s in (0.2, 0.4)]
    np.testing.assert_allclose(got, ref, rtol=2e-3)


def test_adapted_average_empty_support():
    f = GridFunction.zeros(2, 32, 4.0)
    assert adapted_bilinear_average(f, f, (0, 0), 0.5) == 0.0


def test_probe_statistic_positive():
    fam = knapp_family(2, 0.125, n=256)
    stat, vals = probe_statistic(fam)
    assert vals.shape == (fam.probes.shape[0],)
    assert stat == vals.min() > 0


def test_annulus_probes_include_origin():
    fam = annulus_family(2, 0.0625, n=256)
    np.testing.assert_array_equal(fam.probes[0], [0.0, 0.0])
    assert fam.probe_radius(fam.probes[3]) == 1.0


@settings(max_examples=30, deadline=None)
@given(slope=st.floats(-4, 4), c=st.floats(0.1, 10))
def test_fit_recovers_power_law(slope, c):
    recs = [ScanRecord(p, c * p ** slope) for p in (0.5, 0.25, 0.125, 0.0625)]
    fit = fit_scaling_exponent(recs)
    np.testing.assert_allclose(fit.slope, slope, atol=1e-9)
    if abs(slope) > 1e-6:
        # r^2 is undefined for data that is flat up to rounding
        assert fit.r_squared == pytest.approx(1.0)


def test_fit_needs_three_points():
    with pytest.raises(ValueError):
        fit_scaling_exponent([ScanRecord(1.0, 1.0), ScanRecord(0.5, 1.0)])


def test_record_validation():
    with pytest.raises(ValueError):
        ScanRecord(0.0, 1.0)
    with pytest.raises(ValueError):
        ScanRecord(1.0, -1.0)


def test_fit_ci95_contains_slope():
    fit = FitResult(2.0, 0.0, 0.99, 0.1)
    lo, hi = fit.ci95(5)
    assert lo < 2.0 < hi
    slope, intercept, r2 = fit
    assert (slope, intercept, r2) == (2.0, 0.0, 0.99)


def test_knapp_scan_output_roundtrip():
    recs = run_scan("knapp", params=[0.125, 0.0625, 0.03125], d=2, n=512)
    fit = fit_scaling_exponent(recs)
    assert 2.5 < fit.slope < 3.5
    text = scan_to_csv(recs, fit)
    lines = text.strip().splitlines()
    assert lines[0] == "family,d,param,statistic,norm_p,norm_q,n,L"
    assert len(lines) == 5 and lines[-1].startswith("# slope=")
    assert math.isclose(float(lines[1].split(",")[3]), recs[0].ratio)
    assert '"slope"' in scan_summary(recs, fit)


def test_run_scan_rejects_unknown():
    with pytest.raises(ValueError):
        run_scan("nope", params=[1])
    with pytest.raises(ValueError):
        run_scan("scaling", params=[0, 1])
    assert run_scan("knapp", params=[]) == []
