import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankone.groups import SO21, random_element
from rankone.orbits import BallCache, cyclic_spec, enumerate_ball, modular_spec
from rankone.poincare import (counting_curve, delta_estimate, displacement_ball,
                              divergence_probe, export_counting_csv, poincare_series)


@pytest.fixture(scope="module")
def modular12():
    return enumerate_ball(modular_spec(), 12.0)


@pytest.fixture(scope="module")
def cyclic40():
    return enumerate_ball(cyclic_spec(1.0), 40.0)


def test_identity_only_series():
    ball = displacement_ball([0.0], 10.0)
    for s in (0.0, 0.5, 3.0):
        assert poincare_series(ball, s) == 1.0


def test_cyclic_series_closed_form(cyclic40):
    want = 1 + 2 * math.exp(-1) / (1 - math.exp(-1))
    assert poincare_series(cyclic40, 1.0) == pytest.approx(want, abs=1e-12)
    assert poincare_series(cyclic40, 1.0) == pytest.approx(2.16395, abs=1e-5)


def test_negative_s_rejected(cyclic40):
    with pytest.raises(ValueError):
        poincare_series(cyclic40, -0.1)
    with pytest.raises(ValueError):
        divergence_probe(cyclic40, -0.1)


def test_modular_series_converges_above_one(modular12):
    # unit-shell increments of the s = 1.2 series shrink geometrically
    d = modular12.displacements
    inc = np.array([np.sum(np.exp(-1.2 * d[(d > r - 1) & (d <= r)])) for r in range(7, 13)])
    ratios = inc[1:] / inc[:-1]
    assert np.all(ratios < 0.9)
    assert 1 < poincare_series(modular12, 1.2) < 1 + inc[-1] / (1 - ratios.max()) + 100


def test_counting_curve_matches_sort(modular12):
    radii = np.linspace(0, 12, 13)
    d = np.sort(modular12.displacements)
    want = np.searchsorted(d, radii + 1e-9, side="right")
    assert np.array_equal(counting_curve(modular12, radii), want)


def test_modular_delta(modular12):
    est = delta_estimate(enumerate_ball(modular_spec(), 14.0, cache=BallCache()))
    assert abs(est.delta_hat - 1.0) <= 0.1
    assert est.method == "counting_slope"
    alt = delta_estimate(modular12, method="series_threshold")
    assert abs(alt.delta_hat - 1.0) <= 0.1


def test_cyclic_delta_is_zero(cyclic40):
    assert abs(delta_estimate(cyclic40).delta_hat) <= 0.05
    assert abs(delta_estimate(cyclic40, method="series_threshold").delta_hat) <= 0.05


def test_small_radius_rejected():
    with pytest.raises(ValueError):
        delta_estimate(enumerate_ball(cyclic_spec(), 5.0))


def test_few_samples_rejected(cyclic40):
    with pytest.raises(ValueError):
        delta_estimate(cyclic40, samples=4)


def test_unknown_method_rejected(cyclic40):
    with pytest.raises(ValueError):
        delta_estimate(cyclic40, method="guess")


def test_incomplete_ball_flagged():
    ball = enumerate_ball(modular_spec(), 10.0, budget=5000)
    est = delta_estimate(ball)
    assert not ball.complete
    assert any("incomplete" in f for f in est.flags)


def test_probe_labels(cyclic40, modular12):
    assert divergence_probe(cyclic40, 0.5).label == "converging_trend"
    assert divergence_probe(modular12, 1.0).label == "diverging_trend"
    assert divergence_probe(modular12, 1.5).label == "converging_trend"
    assert "heuristic" in divergence_probe(modular12, 1.0).note


def test_probe_label_stable_in_radius():
    labels = {divergence_probe(enumerate_ball(modular_spec(), R), 1.0).label
              for R in (10.0, 11.0, 12.0)}
    assert labels == {"diverging_trend"}


def test_weighted_displacements():
    plain = displacement_ball([0, 1, 1, 2, 2, 2], 2.0)
    weighted = displacement_ball([0, 1, 2], 2.0, weights=[1, 2, 3])
    assert poincare_series(plain, 0.7) == pytest.approx(poincare_series(weighted, 0.7))
    assert np.array_equal(counting_curve(plain, [0, 1, 2]), counting_curve(weighted, [0, 1, 2]))


def test_export_csv(cyclic40):
    buf = io.StringIO()
    export_counting_csv(delta_estimate(cyclic40, samples=6), buf)
    rows = buf.getvalue().strip().splitlines()
    assert len(rows) >= 6


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 1.0))
def test_series_monotone_in_s(s, ds):
    ball = enumerate_ball(modular_spec(), 8.0)
    assert poincare_series(ball, s + ds) <= poincare_series(ball, s) + 1e-12
    assert poincare_series(ball, s) >= 1.0


@settings(max_examples=20, deadline=None)
@given(st.floats(2.0, 8.0), st.floats(0.0, 2.0), st.floats(0.0, 3.0))
def test_series_monotone_under_inclusion(R, extra, s):
    small = enumerate_ball(modular_spec(), R)
    big = enumerate_ball(modular_spec(), R + extra)
    assert poincare_series(small, s) <= poincare_series(big, s) + 1e-12


def test_delta_never_far_above_ambient(modular12, cyclic40):
    for ball in (modular12, cyclic40):
        est = delta_estimate(ball)
        assert est.delta_hat <= ball.spec.group.deltaG + 0.1
        assert not est.flags


def test_delta_conjugation_invariance(modular12):
    h = random_element(SO21, 0.8, np.random.default_rng(1))
    conj = enumerate_ball(modular_spec().conjugate(h), 12.0)
    assert abs(delta_estimate(conj).delta_hat - delta_estimate(modular12).delta_hat) <= 0.05
