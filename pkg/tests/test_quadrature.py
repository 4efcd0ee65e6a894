import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab.quadrature import (ball_rule, ball_volume, integrate_ball, integrate_sphere,
                                     sphere_area, sphere_monomial_moment, sphere_rule)


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_total_weight_is_area(k):
    rule = sphere_rule(k, 8)
    np.testing.assert_allclose(rule.weights.sum(), sphere_area(k), rtol=1e-13)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)
    assert np.all(rule.weights > 0)


@settings(max_examples=40, deadline=None)
@given(k=st.sampled_from([2, 3, 4]), data=st.data())
def test_sphere_monomials_exact(k, data):
    order = 8
    alpha = data.draw(st.lists(st.integers(0, 4), min_size=k, max_size=k)
                      .filter(lambda a: sum(a) <= order))
    rule = sphere_rule(k, order)
    got = integrate_sphere(rule, lambda x: np.prod(x ** np.array(alpha), axis=1))
    np.testing.assert_allclose(got, sphere_monomial_moment(alpha), atol=1e-13)


def test_sphere_rule_six_dims_moments():
    rule = sphere_rule(6, 8)
    for alpha in itertools.product([0, 2], repeat=3):
        a = list(alpha) + [2, 0, 0]
        got = integrate_sphere(rule, lambda x: np.prod(x ** np.array(a), axis=1))
        np.testing.assert_allclose(got, sphere_monomial_moment(a), atol=1e-13)


@pytest.mark.parametrize("d", [2, 3])
def test_ball_volume(d):
    np.testing.assert_allclose(ball_rule(d, 8).weights.sum(), ball_volume(d), rtol=1e-13)


def test_ball_radial_moment():
    rule = ball_rule(3, 8)
    got = integrate_ball(rule, lambda y: np.sum(y * y, axis=1))
    np.testing.assert_allclose(got, 4 * math.pi / 5, rtol=1e-12)


def test_slicing_weight_recovers_sphere_area():
    # int_B (1-|y|^2)^{(d-2)/2} |S^{d-1}| dy = |S^{2d-1}|
    for d in (2, 3):
        rule = ball_rule(d, 8, with_slicing_weight=True)
        np.testing.assert_allclose(rule.weights.sum() * sphere_area(d), sphere_area(2 * d),
                                   rtol=1e-12)


def test_radial_groups_share_inner():
    rule = ball_rule(2, 6)
    np.testing.assert_array_equal(rule.inner, rule.radial_inner[rule.radial_index])
    np.testing.assert_allclose(rule.inner ** 2 + np.sum(rule.nodes ** 2, axis=1), 1.0)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sphere_rule(5, 8)
    with pytest.raises(ValueError):
        sphere_rule(3, 2)
    with pytest.raises(ValueError):
        ball_rule(4, 8)


def test_rules_are_read_only():
    rule = sphere_rule(3, 6)
    with pytest.raises(ValueError):
        rule.weights[0] = 0
