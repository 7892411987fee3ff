from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone import lp
from rankone.groups import BUNDLED_GROUPS, SO21, SO31, SO41, SU21, make_group

fractions = st.fractions(min_value=0, max_value=20, max_denominator=50)
groups = st.sampled_from(BUNDLED_GROUPS)


def test_parse_and_print():
    assert lp.LpExponent.parse("3/2") == lp.LpExponent(F(3, 2))
    assert lp.LpExponent.parse("4+").plus_epsilon
    assert lp.LpExponent.parse("inf").infinite
    assert lp.LpExponent.parse("∞+") == lp.LpExponent.inf(True)
    assert str(lp.LpExponent(F(6), False, True)) == "6+"
    with pytest.raises(ValueError):
        lp.LpExponent(F(-1))
    with pytest.raises(ValueError):
        lp.rational("x/2")


def test_ordering_with_infinity():
    assert lp.LpExponent(F(100)) < lp.LpExponent.inf()
    assert lp.LpExponent(F(2)) <= lp.LpExponent(F(2))


def test_complementary_threshold_examples():
    assert lp.complementary_threshold(SO31, 0) == lp.LpExponent(F(2), False, True)
    assert lp.complementary_threshold(SO41, F(1, 2)).p == 3
    assert lp.complementary_threshold(SO31, 1).infinite
    with pytest.raises(ValueError):
        lp.complementary_threshold(SO31, F(3, 2))


def test_restrict_examples():
    assert lp.restrict_exponent(2, 1, 2).p == 1
    assert lp.restrict_exponent(F(7, 3), 4, 4).p == F(7, 3)
    assert lp.restrict_exponent(6, 2, 4).p == 3
    assert lp.restrict_exponent("6+", 2, 4).plus_epsilon
    with pytest.raises(ValueError):
        lp.restrict_exponent(F(3, 2), 1, 2)


def test_quotient_examples():
    assert lp.quotient_exponent(2, 1).exponent.p == 2
    q = lp.quotient_exponent(2, F(3, 2))
    assert q.exponent.p == 4 and q.sharp
    q = lp.quotient_exponent(3, 2)
    assert q.exponent.p == 3 and q.sharp
    q = lp.quotient_exponent(2, 2)
    assert q.exponent.infinite and "no decay" in q.note
    with pytest.raises(ValueError):
        lp.quotient_exponent(2, 3)


def test_laplacian_examples():
    assert lp.laplacian_bottom(2, F(3, 2)) == F(3, 4)
    assert lp.laplacian_bottom(2, 1) == 1
    assert lp.laplacian_bottom(2, 2) == 0
    with pytest.raises(ValueError):
        lp.laplacian_bottom(2, -1)


def test_tensor_plan_examples():
    rho = SO41.rho_beta
    plan = lp.tensor_plan(SO41, 4)
    assert (plan.q, plan.strategy, plan.x) == (4, "single", rho / 2)
    plan = lp.tensor_plan(SO41, 3)
    assert (plan.q, plan.strategy, plan.x) == (6, "single", F(2, 3) * rho)
    plan = lp.tensor_plan(SO41, 6)
    assert (plan.q, plan.strategy, plan.t, plan.x) == (3, "squared", 6, F(2, 3) * rho)
    assert plan.constant_factor == "1/C'^2"
    with pytest.raises(ValueError):
        lp.tensor_plan(SO41, 2)


def test_hoelder_examples():
    assert lp.hoelder_combine(4, 4).p == 2
    assert lp.hoelder_combine(5, "inf").p == 5
    assert lp.hoelder_combine(6, 3).p == 2
    assert lp.hoelder_combine("6+", 3).plus_epsilon
    with pytest.raises(ValueError):
        lp.hoelder_combine(F(1, 2), 3)


def test_thm14_examples():
    r = lp.thm14_bound(lp.ExponentScenario(3, 3, 2, 2))
    assert r.rhs == 3 and r.holds and r.equality
    # with deltaGamma = 3 and a small image the kernel must carry deltaGamma - 1
    assert lp.kernel_lower_bound(3, 1) == 2
    r = lp.thm14_bound(lp.ExponentScenario(3, 3, F(3, 2), 1))
    assert not r.holds
    # at deltaGamma = 2 the bound holds for every kernel
    assert lp.kernel_lower_bound(2, 1) == 0
    with pytest.raises(ValueError):
        lp.thm14_bound(lp.ExponentScenario(3, 3))


def test_thm14_extension_equality():
    # image all of G, kernel trivial: equality in the bound
    r = lp.thm14_bound(lp.ExponentScenario(2, 2, 0, 2))
    assert r.holds and r.equality


def test_thm16_examples():
    r = lp.thm16_bound(1, 0)
    assert r.holds and r.equality and not r.strict_mode
    assert not lp.thm16_bound(1, 0, strict_mode=True).holds
    for n in range(3, 7):
        assert lp.thm16_bound(n - 1, n - 2).equality
    for d in (1, 2, F(5, 2)):
        assert lp.thm16_bound(d, d, strict_mode=True).holds


def test_p_of_group():
    assert lp.p_of_group(SO31) == 2
    assert lp.p_of_group(make_group("real", 5)) == 4
    assert lp.p_of_group(SU21) == 4
    assert lp.p_of_group(SO21) == 0


@given(groups, st.fractions(min_value=0, max_value=1, max_denominator=60))
def test_threshold_and_parameter_inverse(group, u):
    x = u * group.rho_beta
    if x == group.rho_beta:
        return
    p = lp.complementary_threshold(group, x)
    assert lp.threshold_parameter(group, p) == x


@given(groups, st.fractions(min_value=2, max_value=50, max_denominator=60))
def test_dictionary_parameter_pairs_with_conjugate(group, p):
    # the dictionary parameter at p sits at the threshold of the Hoelder conjugate q
    if p == 2:
        return
    x = lp.dictionary_parameter(group, p)
    q = lp.complementary_threshold(group, x)
    assert lp.hoelder_combine(p, q.p if not q.infinite else "inf").p == 2


@given(fractions, fractions, fractions, st.fractions(min_value=2, max_value=30))
def test_restriction_composes(a, b, c, p):
    low, mid, top = sorted((a, b, c))
    if mid == 0 or mid / top * p < 2:
        return
    twice = lp.restrict_exponent(lp.restrict_exponent(p, mid, top), low, mid)
    assert twice == lp.restrict_exponent(p, low, top)


@given(st.fractions(min_value=F(195, 97), max_value=1000, max_denominator=97))
def test_tensor_plan_hoelder_is_two(p):
    for g in BUNDLED_GROUPS:
        plan = lp.tensor_plan(g, p)
        assert lp.hoelder_combine(plan.p, plan.q).p == 2
        if p <= 4:
            assert plan.x == lp.dictionary_parameter(g, p)
        else:
            # squared plan: pi_x' tensor pi_x' lies at the single-plan parameter of 4p/(p+2)
            assert plan.x == lp.dictionary_parameter(g, 4 * p / (p + 2))


@given(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=40), st.fractions(0, 1))
def test_quotient_at_least_two(dg, u):
    dr = u * dg
    q = lp.quotient_exponent(dg, dr)
    if dr == dg:
        assert q.exponent.infinite
        return
    assert q.exponent.p >= 2
    assert (q.exponent.p == 2) == (dr <= dg / 2)


def test_everything_is_exact():
    plan = lp.tensor_plan(SO31, F(10, 3))
    for v in (plan.p, plan.q, plan.x):
        assert isinstance(v, F)
    assert isinstance(lp.laplacian_bottom(F(7, 3), F(2)), F)
