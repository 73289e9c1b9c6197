import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lebesguekit import (
    ConditionKind,
    ExponentSpec,
    GridError,
    ParameterError,
    StepFunction,
    check_condition,
    conjugate,
    exponent_for_theta,
    exponent_from_spec,
    rearrange_exponent,
)
from lebesguekit.exponents import conj, condition_margins, ConditionParams, log_term_exponent
from lebesguekit.funcrep import u_of_t

from conftest import random_step_exponent

E2 = math.exp(-2.0)
T_GRID = np.geomspace(E2, 1e-12, 1000)


def example_p(theta, base, t):
    # base + base(base-1) theta loglog(e/t)/log(e/t), constant above e^-2
    t = np.minimum(t, E2)
    L = np.log(math.e / t)
    return base + base * (base - 1.0) * theta * np.log(L) / L


_inputs_conjugate = [(2.0, 2.0), (3.0, 1.5), (1.5, 3.0), (5.0, 1.25)]


@pytest.mark.parametrize("p, q", _inputs_conjugate)
def test_conjugate_constant(p, q):
    c = conjugate(p)
    assert c.p_minus == pytest.approx(q, rel=1e-15) and c.p_plus == pytest.approx(q, rel=1e-15)


def test_conjugate_extremes_swap():
    p = ExponentSpec(StepFunction([0, 0.3, 1], [1.5, 4.0]))
    q = conjugate(p)
    assert q.p_minus == pytest.approx(conj(4.0)) and q.p_plus == pytest.approx(conj(1.5))


def test_conjugate_of_conjugate_is_source():
    p = exponent_for_theta(1.0)
    assert conjugate(conjugate(p)) is p


@pytest.mark.parametrize("bad", [1.0, 0.5, math.inf])
def test_exponent_range(bad):
    with pytest.raises(ParameterError):
        ExponentSpec(bad)


def test_step_exponent_rearrangements():
    p = ExponentSpec(StepFunction([0, 0.5, 1], [2.0, 3.0]))
    dn, up = rearrange_exponent(p)
    assert dn.p_star.values.tolist() == [3.0, 2.0] and dn.p_star.breaks.tolist() == [0, 0.5, 1]
    assert up.p_star_up.values.tolist() == [2.0, 3.0]
    assert (p.p_minus, p.p_plus) == (2.0, 3.0)


def test_constant_rearrangements():
    p = ExponentSpec(2.5)
    assert p.p_star.evaluate(0.3) == 2.5 and p.p_star_up.evaluate(0.3) == 2.5


def test_example_exponent_values():
    p = exponent_for_theta(1.0, 2.0)
    assert p.evaluate(E2) == pytest.approx(2.7324081924454065, rel=1e-14)
    assert p.p_plus == pytest.approx(2.7324081924454065, rel=1e-14)
    assert p.p_minus == 2.0
    t = np.geomspace(E2, 1e-300, 2000)
    v = p.evaluate(t)
    assert np.all(np.diff(v) <= 0), "p must be increasing in t"
    assert np.allclose(v, example_p(1.0, 2.0, t), rtol=1e-14)


@pytest.mark.parametrize("base", [1.5, 2.0, 3.0])
def test_example_exponent_theta_zero(base):
    p = exponent_for_theta(0.0, base)
    assert p.p_minus == base and p.p_plus == base


def test_example_exponent_base_error():
    with pytest.raises(ParameterError):
        exponent_for_theta(1.0, 1.0)


def test_duality_of_rearrangements():
    p = exponent_for_theta(1.5, 2.5)
    q = conjugate(p)
    t = np.linspace(0.001, 0.999, 500)
    s = 1.0 / p.p_star.evaluate(t) + 1.0 / q.p_star_up.evaluate(t)
    assert np.allclose(s, 1.0, rtol=0, atol=1e-14)


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_no_var_small_holds_var_small_fails(theta):
    p = exponent_for_theta(theta, 2.0)
    rep = check_condition(p, ConditionKind.NO_VAR_SMALL, grid=T_GRID, theta=theta)
    assert rep.holds and rep.grid_size == 1000
    for eps in (0.01, 0.1, 1.0):
        rep = check_condition(p, ConditionKind.VAR_SMALL, grid=T_GRID, theta=theta, eps=eps)
        assert not rep.holds
        assert rep.witness_t == pytest.approx(E2, rel=1e-12)


def test_no_var_small_margins_hand_coded():
    theta = 1.0
    p = exponent_for_theta(theta, 2.0)
    u = u_of_t(T_GRID)
    r = np.log(u) / u
    want = theta / 2.0 * r - (0.5 - 1.0 / example_p(theta, 2.0, T_GRID))
    got = condition_margins(p, ConditionKind.NO_VAR_SMALL, ConditionParams(theta=theta), u)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-15)


def test_constant_exponent_conditions():
    p = ExponentSpec(2.0)
    assert check_condition(p, ConditionKind.REARRANGED, theta=1.0, A=0.0).holds
    assert check_condition(p, ConditionKind.REARRANGED, theta=1.0, A=0.0).worst_margin == 0.0
    assert not check_condition(p, ConditionKind.VAR_SMALL, theta=1.0, eps=0.1).holds
    assert not check_condition(p, ConditionKind.VAR_SMALL, theta=0.1, eps=1e-3).holds


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.9])
def test_rearranged_below_theta_one_needs_A(theta):
    # right side (theta-1)/p_+ loglog/log is negative near 0 while the left side is >= 0
    p = ExponentSpec(StepFunction([0, 0.5, 1], [3.0, 2.0]))
    assert not check_condition(p, ConditionKind.REARRANGED, theta=theta, A=0.0).holds
    assert not check_condition(ExponentSpec(2.0), ConditionKind.REARRANGED, theta=theta, A=0.0).holds


def test_missing_parameter():
    with pytest.raises(ParameterError):
        check_condition(2.0, ConditionKind.VAR_SMALL, theta=1.0)


def test_grid_outside_t0():
    with pytest.raises(GridError):
        check_condition(2.0, ConditionKind.NO_VAR_SMALL, grid=[0.5], theta=1.0)


def test_weaker_needs_small_t():
    p = exponent_for_theta(1.0)
    with pytest.raises(GridError):
        check_condition(p, ConditionKind.WEAKER_VAR_SMALL, grid=[0.3], t0=0.5, theta=1.0, eps=0.1)
    rep = check_condition(p, ConditionKind.WEAKER_VAR_SMALL, theta=1.0, eps=0.1)
    assert not rep.holds


def test_gen_orlicz_constant_sigma():
    p = ExponentSpec(2.0)
    assert check_condition(p, ConditionKind.GEN_ORLICZ_SIGMA, B=0.0, sigma=0.7).holds


def test_log_term_exponent_sign():
    p = ExponentSpec(StepFunction([0, 0.2, 0.6, 1], [4.0, 3.0, 2.0]))
    u = np.linspace(1.0, 50.0, 200)
    assert np.all(log_term_exponent(p, 1.5, u) <= 0)


def test_exponent_spec_formats():
    p = exponent_from_spec({"kind": "example-exponent", "theta": 1, "base": 2})
    assert p.p_plus == pytest.approx(2.7324081924454065, rel=1e-14)
    assert exponent_from_spec(3).p_minus == 3.0
    q = exponent_from_spec({"kind": "conjugate", "source": {"kind": "example-exponent", "theta": 1, "base": 2}})
    assert q.p_minus == pytest.approx(conj(p.p_plus))


@given(st.integers(0, 10 ** 6))
def test_involution(seed):
    p = ExponentSpec(random_step_exponent(np.random.default_rng(seed)))
    qq = conjugate(ExponentSpec(conjugate(p).function))
    t = np.linspace(0.0005, 0.9995, 400)
    assert np.allclose(qq.evaluate(t), p.evaluate(t), rtol=1e-12, atol=0)


@given(st.floats(0.05, 3.0), st.floats(1.2, 4.0))
def test_analytic_involution(theta, base):
    p = exponent_for_theta(theta, base)
    qq = conjugate(ExponentSpec(conjugate(p).function))
    t = np.geomspace(0.9, 1e-200, 300)
    assert np.allclose(qq.evaluate(t), p.evaluate(t), rtol=1e-12, atol=0)


@given(st.integers(0, 10 ** 6))
def test_extremes_after_rearrangement(seed):
    f = random_step_exponent(np.random.default_rng(seed))
    p = ExponentSpec(f)
    assert p.p_minus == f.values.min() == p.p_star_up.limit_at_zero()
    assert p.p_plus == f.values.max() == p.p_star.limit_at_zero()


@given(st.floats(0.1, 3.0), st.floats(0.0, 1.0))
def test_margin_tolerance_contract(theta, eps):
    rep = check_condition(exponent_for_theta(theta), ConditionKind.VAR_SMALL, theta=theta, eps=eps)
    assert rep.holds == (rep.worst_margin >= -1e-12)
