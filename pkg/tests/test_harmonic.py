import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone import harmonic as h
from rankone.groups import BUNDLED_GROUPS, SO21, SO31, SO41, SU21


def closed_h3(x, t):
    """phi on real hyperbolic 3-space: sinh(xt) / (x sinh t)."""
    if t == 0:
        return 1.0
    return math.sinh(x * t) / (x * math.sinh(t))


@pytest.mark.parametrize("group", BUNDLED_GROUPS, ids=str)
def test_phi_at_origin_is_one(group):
    assert h.phi(h.complementary(group, 0.3 * float(group.rho_beta)), 0.0) == pytest.approx(1.0)
    assert h.phi(h.principal(group, 1.7), 0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("group", BUNDLED_GROUPS, ids=str)
def test_trivial_parameter_is_constant(group):
    par = h.complementary(group, float(group.rho_beta))
    for t in (0.5, 3.0, 17.0, 30.0):
        assert h.phi(par, t) == pytest.approx(1.0, abs=1e-12)


def test_h3_closed_form_value():
    # sinh(1) / (0.5 sinh 2)
    assert h.phi(h.complementary(SO31, 0.5), 2.0) == pytest.approx(0.6480543, abs=1e-7)
    assert closed_h3(1.0, 2.0) == pytest.approx(1.0)


def test_h3_principal_closed_form():
    # principal x = i y: sin(yt) / (y sinh t)
    for y, t in ((1.0, 2.0), (0.25, 5.0), (3.0, 0.7)):
        got = h.phi(h.principal(SO31, y), t)
        assert got == pytest.approx(math.sin(y * t) / (y * math.sinh(t)), abs=1e-12)


def test_xi_closed_form():
    assert h.xi(SO31, 0.0) == 1.0
    assert h.xi(SO31, 2.0) == pytest.approx(2 / math.sinh(2), abs=1e-12)
    assert h.xi(SO31, 2.0) == pytest.approx(0.5514411, abs=1e-7)


def test_parameter_validation():
    with pytest.raises(ValueError):
        h.complementary(SO31, 1.5)
    with pytest.raises(ValueError):
        h.complementary(SO31, -0.1)
    with pytest.raises(ValueError):
        h.phi(h.complementary(SO31, 0.5), -1.0)


def test_quadrature_matches_hypergeometric_su21():
    ts = np.linspace(0, 20, 21)
    for par in (h.complementary(SU21, 1.3), h.principal(SU21, 0.8)):
        a = np.array([h.phi(par, t) for t in ts])
        b = h.phi_quadrature(par, ts)
        assert np.abs(a - b).max() < 1e-10


def test_phi_curve_matches_pointwise():
    par = h.complementary(SO41, 0.8)
    ts = np.array([0.0, 1.0, 4.0, 9.0])
    assert np.allclose(h.phi_curve(par, ts), [h.phi(par, t) for t in ts], rtol=1e-14)


def test_limit_equals_inverse_x_on_h3():
    for x in (0.25, 0.5, 0.75):
        res = h.spherical_limit(h.complementary(SO31, x))
        assert res.stabilized
        assert res.value == pytest.approx(1 / x, rel=1e-6)


def test_limit_at_rho_is_one():
    for g in BUNDLED_GROUPS:
        assert h.spherical_limit(h.complementary(g, float(g.rho_beta))).value == pytest.approx(1.0)


@pytest.mark.parametrize("group", BUNDLED_GROUPS, ids=str)
def test_limit_matches_c_function(group):
    for frac in (0.3, 0.7):
        x = frac * float(group.rho_beta)
        res = h.spherical_limit(h.complementary(group, x))
        assert res.value == pytest.approx(h.c_function(group, x), rel=1e-4)


def test_su21_limit_dual_route():
    par = h.complementary(SU21, 1.0)
    res = h.spherical_limit(par)
    ts = np.array([35.0, 40.0])
    quad = (h.phi_quadrature(par, ts) * np.exp((float(SU21.rho_beta) - 1.0) * ts)).real
    assert res.value > 0
    assert np.all(np.abs(quad - res.value) < 1e-6)
    assert res.value == pytest.approx(8 / math.pi, rel=1e-9)


def test_limit_preconditions():
    with pytest.raises(ValueError):
        h.spherical_limit(h.complementary(SO31, 0.0))
    with pytest.raises(ValueError):
        h.spherical_limit(h.principal(SO31, 1.0))
    with pytest.raises(ValueError):
        h.spherical_limit(h.complementary(SO31, 0.5), t_max=3.0)


def test_limit_not_stabilized_is_flagged():
    res = h.spherical_limit(h.complementary(SO21, 0.01), t_max=8.0)
    assert not res.stabilized


def test_decay_bound_xi_at_two():
    for g in BUNDLED_GROUPS:
        ts = np.linspace(0, 30, 121)
        rep = h.check_decay_bound(g, 2, [(t, h.xi(g, t)) for t in ts])
        assert rep.passed, (g, rep)


def test_decay_bound_threshold_curve_is_tight():
    rep = h.check_decay_bound(SO31, 4, h.threshold_curve(SO31, 4))
    assert rep.passed
    assert 0.5 <= rep.fitted_C <= 2.0


def test_decay_bound_constant_fails():
    rep = h.check_decay_bound(SO31, 4, [(t, 1.0) for t in np.linspace(0, 30, 121)])
    assert not rep.passed
    assert rep.violations and min(rep.violations) > 10


def test_decay_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        h.check_decay_bound(SO31, 4, [])
    with pytest.raises(ValueError):
        h.check_decay_bound(SO31, 1.5, [(0.0, 1.0)])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(BUNDLED_GROUPS), st.floats(0, 1), st.floats(0, 1), st.floats(0, 30))
def test_monotone_in_parameter(group, a, b, t):
    rho = float(group.rho_beta)
    x1, x2 = sorted((a * rho, b * rho))
    p1 = h.phi(h.complementary(group, x1), t)
    p2 = h.phi(h.complementary(group, x2), t)
    assert 0 < p1 <= p2 * (1 + 1e-12) + 1e-300
    assert p2 <= 1 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(BUNDLED_GROUPS), st.floats(0.01, 6), st.floats(0, 30))
def test_principal_dominated_by_xi(group, y, t):
    assert abs(h.phi(h.principal(group, y), t)) <= h.xi(group, t) * (1 + 1e-10)


def test_x_grid_covers_strip():
    xs = h.x_grid(SO41, 50)
    assert len(xs) == 50 and xs[0] == 0 and xs[-1] == pytest.approx(float(SO41.rho_beta))
