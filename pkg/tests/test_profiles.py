import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab.profiles import (BumpProfile, dyadic_chi, dyadic_psi, dyadic_psi0,
                                   partition_phi, profile_corpus, smooth_step,
                                   smooth_step_derivative)


def test_smooth_step_limits():
    assert smooth_step(0.5) == 1.0
    assert smooth_step(2.5) == 0.0
    assert smooth_step(1.5) == pytest.approx(0.5)


def test_smooth_step_derivative_matches_differences():
    s = np.linspace(1.05, 1.95, 50)
    h = 1e-6
    fd = (smooth_step(s + h) - smooth_step(s - h)) / (2 * h)
    np.testing.assert_allclose(smooth_step_derivative(s), fd, atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(s=st.floats(1e-3, 1e3))
def test_dyadic_chi_sums_to_one(s):
    chi = dyadic_chi()
    total = sum(chi(2.0 ** j * s) for j in range(-15, 15))
    assert total == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(t=st.floats(-3, 3))
def test_partition_of_unity(t):
    phi = partition_phi()
    assert sum(phi(t + k) for k in range(-5, 6)) == pytest.approx(1.0, abs=1e-14)


def test_partition_phi_even():
    phi = partition_phi()
    t = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(phi(t), phi(-t), atol=1e-15)


def test_psi0_support():
    psi0 = dyadic_psi0(1.0)
    assert psi0(0.76) == 0.0 and psi0(-0.76) == 0.0
    assert psi0(0.0) == pytest.approx(1.0)


def test_psi_closed_form_derivative():
    psi = dyadic_psi(0.5)
    s = np.linspace(0.55, 1.95, 40)
    h = 1e-6
    fd = (psi(s + h) - psi(s - h)) / (2 * h)
    np.testing.assert_allclose(psi.derivative(s, 1), fd, atol=1e-5)


def test_corpus_in_class():
    corpus = profile_corpus(4)
    assert len(corpus) == 5
    for prof in corpus:
        assert prof.in_class(4), prof.name
        assert np.max(prof.certified_cn) == pytest.approx(1.0)
        assert prof(1.0) == 0.0 and prof(-1.0) == 0.0


def test_certificate_matches_sympy_bound():
    t = sp.Symbol("t", real=True)
    prof = BumpProfile.from_sympy((1 - t ** 2) ** 2, t, (-1, 1), 2, "quad")
    # sup |phi| = 1, sup |phi'| = 8/(3 sqrt 3), sup |phi''| = 8 (approached at t = +-1)
    np.testing.assert_allclose(prof.certified_cn, [1, 8 / (3 * np.sqrt(3)), 8], rtol=1e-3)


def test_difference_fallback_close_to_closed_form():
    t = sp.Symbol("t", real=True)
    full = BumpProfile.from_sympy((1 - t ** 2) ** 6, t, (-1, 1), 3)
    partial = BumpProfile(full.name, full.func, full.support, full.derivatives[:1]).certify(3)
    np.testing.assert_allclose(partial.certified_cn, full.certified_cn, rtol=1e-5)


def test_wide_support_not_in_class():
    t = sp.Symbol("t", real=True)
    prof = BumpProfile.from_sympy((4 - t ** 2) ** 2 / 1000, t, (-2, 2), 2)
    assert not prof.in_class(2)
    assert not dyadic_chi().in_class(1)
