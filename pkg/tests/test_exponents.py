import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinear_lab import exponents as ex

fracs = st.fractions(min_value=0, max_value=1, max_denominator=12)


def test_reciprocal_parsing():
    assert ex.reciprocal("inf") == 0
    assert ex.reciprocal("3/2") == F(2, 3)
    assert ex.to_fraction("0.25") == F(1, 4)


@pytest.mark.parametrize("d", range(2, 9))
def test_alpha_star_at_two_two(d):
    a = ex.alpha_star(F(1, 2), F(1, 2), 1 / ex.p_s(d), d)
    assert a.value == 1
    assert a.region == "D2"


@pytest.mark.parametrize("d,want", [(2, F(4)), (3, F(10, 3)), (4, F(3)), (5, F(14, 5))])
def test_p_s_values(d, want):
    assert ex.p_s(d) == want


def test_alpha_star_tie_reports_both_branches():
    d = 3
    nu = 1 / ex.p_s(d)
    a = ex.alpha_star(nu, nu, nu, d)
    assert a.tie
    assert set(a.branches) == {"D1", "D2"}


def test_alpha_star_domain():
    with pytest.raises(ValueError):
        ex.alpha_star(F(3, 4), F(1, 2), F(1, 4), 2)


def test_alpha_critical():
    assert ex.alpha_critical(F(1, 2), 3) == 0
    assert ex.alpha_critical(1, 3) == 1


def test_global_examples():
    pt = ex.ExponentPoint.from_exponents(2, 2, 2, 1)
    v = ex.global_region(pt)
    assert (v.status, v.citation) == (ex.BOUNDED, ex.CITE_GLOBAL)
    v = ex.global_region(ex.ExponentPoint.from_exponents(3, 1, "inf", 1))
    assert v.status == ex.UNBOUNDED and v.case_tag == "a"
    v = ex.global_region(ex.ExponentPoint(2, F(1, 2), F(1, 2), F(1, 2)))
    assert v.status == ex.UNBOUNDED and v.case_tag == "holder"


def test_global_critical_line():
    v = ex.global_region(ex.ExponentPoint(3, F(1), F(2, 3), F(5, 3)))
    assert v.status == ex.WEAK_LORENTZ and v.case_tag == "b"
    v = ex.global_region(ex.ExponentPoint(3, F(5, 6), F(5, 6), F(5, 3)))
    assert v.status == ex.WEAK_LORENTZ and v.case_tag == "c"
    v = ex.global_region(ex.ExponentPoint(2, F(3, 4), F(3, 4), F(3, 2)))
    assert v.status == ex.UNBOUNDED and v.lorentz == {"status": ex.OPEN}


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 6), up=fracs, uq=fracs, ur=st.fractions(0, 2, max_denominator=12))
def test_global_symmetric_and_holder(d, up, uq, ur):
    pt = ex.ExponentPoint(d, up, uq, ur)
    v = ex.global_region(pt)
    assert v == ex.global_region(pt.swapped())
    if v.status == ex.BOUNDED:
        assert up + uq == ur


@settings(max_examples=200, deadline=None)
@given(d=st.integers(2, 6), up=fracs, uq=fracs, ur=st.fractions(0, 2, max_denominator=12))
def test_localization_is_weaker(d, up, uq, ur):
    pt = ex.ExponentPoint(d, up, uq, ur)
    if ex.global_region(pt).status == ex.BOUNDED:
        assert ex.localized_region(pt).status == ex.BOUNDED
    loc = ex.localized_region(pt)
    assert loc.status in (ex.BOUNDED, ex.UNBOUNDED, ex.OPEN)
    if up + uq < ur:
        assert loc.status == ex.UNBOUNDED


def test_localized_examples():
    v = ex.localized_region(ex.ExponentPoint(3, F(1), F(0), F(1)))
    assert v.status == ex.BOUNDED
    v = ex.localized_region(ex.ExponentPoint(2, F(1), F(1), F(1, 4)))
    assert v.status == ex.UNBOUNDED
    v = ex.localized_region(ex.ExponentPoint(2, F(1, 4), F(1, 4), F(0)))
    assert v.status == ex.BOUNDED and v.case_tag == "r=inf"


def test_delta_region_vertices():
    v1, v2, v3, v4 = ex.delta_vertices(3)
    assert ex.delta_region(3, *v1).status == ex.BOUNDED
    assert ex.delta_region(3, *v2).status == ex.WEAK_LORENTZ
    assert ex.delta_region(2, *ex.delta_vertices(2)[1]).status == ex.UNBOUNDED
    assert ex.delta_region(3, *v3).status == ex.WEAK_LORENTZ
    assert ex.delta_region(3, *v4).status == ex.WEAK_LORENTZ
    assert ex.delta_region(3, F(1, 2), F(1, 2)).status == ex.BOUNDED
    assert ex.delta_region(3, F(0), F(1, 2)).status == ex.UNBOUNDED


def test_br_necessity():
    v = ex.br_maximal_necessity(0, F(3, 2), 2)
    assert v.status == ex.UNBOUNDED
    assert v.case_tag == "threshold=3/4"
    assert ex.br_maximal_necessity(1, F(3, 2), 2).status == ex.OPEN


def test_sufficient_alpha_capped():
    for d in (2, 3, 4):
        a = ex.sufficient_alpha(F(0), F(0), d)
        assert a <= F(2 * d - 1, 2)


def test_verdict_json():
    v = ex.global_region(ex.ExponentPoint(2, F(1, 2), F(1, 2), F(1)))
    data = json.loads(v.to_json())
    assert data["status"] == "Bounded"


def test_point_validation():
    with pytest.raises(ValueError):
        ex.ExponentPoint(1, 0, 0, 0)
    with pytest.raises(ValueError):
        ex.ExponentPoint(2, F(3, 2), 0, 0)


def test_local_strict_gap_is_open():
    v = ex.localized_region(ex.ExponentPoint(2, F(3, 4), F(3, 4), F(1)))
    assert v.status == ex.OPEN


def test_br_threshold_hand_value():
    v = ex.br_maximal_necessity(2, 2, 3)
    assert v.status == ex.UNBOUNDED and v.case_tag == "threshold=5/2"
