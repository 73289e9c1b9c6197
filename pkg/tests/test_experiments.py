import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lebesguekit import (
    ExponentSpec,
    ParameterError,
    PowerLogLog,
    StepFunction,
    constant,
    exponent_for_theta,
)
from lebesguekit.experiments import (
    duality_check,
    embedding_chain_check,
    extremal_no_rearrange_exponent,
    extremal_pointwise_family,
    frs_equality_example,
    frs_inequality_check,
    pointwise_bound_check,
    reproduce_no_rearrange,
    reproduce_no_var_small,
    series_lower_bound,
)
from lebesguekit.quadrature import Verdict

from conftest import random_step, random_step_exponent


@pytest.fixture(scope="module")
def no_var_small_report():
    return reproduce_no_var_small(1.5, 1.0)


def test_no_var_small_reproduction(no_var_small_report):
    rep = no_var_small_report
    assert rep.passed and not rep.inconclusive
    assert rep.verdicts["modular"].verdict is Verdict.CONVERGENT
    assert rep.verdicts["small_norm"].verdict is Verdict.DIVERGENT
    assert rep.verdicts["small_norm"].fit_quality >= 0.99


def test_no_var_small_lower_bound_chain(no_var_small_report):
    rows = no_var_small_report.checks["lower_bound_chain"]["rows"]
    assert [r["j"] for r in rows] == [5, 10, 20]
    assert all(0.1 <= r["ratio"] <= 10 for r in rows)


def test_no_var_small_sharpness_gap(no_var_small_report):
    conds = no_var_small_report.conditions
    assert conds[0].holds and not any(c.holds for c in conds[1:])


def test_no_var_small_verdicts_stable_under_doubling():
    a = reproduce_no_var_small(1.5, 1.0, levels=[500, 5000, 50000, 500000])
    b = reproduce_no_var_small(1.5, 1.0, levels=[1000, 10000, 100000, 1000000])
    for key in ("modular", "small_norm"):
        assert a.verdicts[key].verdict is b.verdicts[key].verdict
    assert b.verdicts["small_norm"].fit_quality >= a.verdicts["small_norm"].fit_quality - 1e-6


def test_sparse_levels_are_filled_in():
    rep = reproduce_no_var_small(1.5, 1.0, levels=[1000, 10000, 100000])
    assert rep.norms["levels_requested"] == [1000, 10000, 100000]
    assert len(rep.norms["levels"]) >= 4 and rep.passed


_inputs_bad_nvs = [(2.5, 1.0, [1000, 10 ** 6]), (1.5, 0.0, [1000, 10 ** 6]), (1.5, 1.0, [1000, 2 * 10 ** 6]),
                   (1.5, 1.0, [100, 1000])]


@pytest.mark.parametrize("b, theta, levels", _inputs_bad_nvs)
def test_no_var_small_parameter_errors(b, theta, levels):
    with pytest.raises(ParameterError):
        reproduce_no_var_small(b, theta, levels=levels)


def test_series_lower_bound_against_loop():
    direct = math.fsum(1.0 / (k ** 2 * math.log(k) ** 1.5) for k in range(5, 2 * 10 ** 6))
    assert series_lower_bound(1.5, 1.0, 5) == pytest.approx(direct, rel=1e-6)


def test_no_rearrange_reproduction():
    rep = reproduce_no_rearrange(2.0, 1.0, 0.5)
    assert rep.passed
    assert rep.verdicts["modular"].verdict is Verdict.CONVERGENT
    assert rep.checks["grand_lower_bound"]["lower_bound"] > 0
    assert rep.norms["grand_rearr"]["infinite"]


@pytest.mark.parametrize("theta", [0.0, -1.0])
def test_no_rearrange_theta_error(theta):
    with pytest.raises(ParameterError):
        reproduce_no_rearrange(2.0, theta, 0.5)


def test_extremal_exponent_equality():
    # 1/p_*(t) - 1/p0 = (theta+eps)/p0 loglog/log exactly
    p = extremal_no_rearrange_exponent(2.0, 1.0, 0.5)
    t = np.geomspace(math.exp(-2.0), 1e-100, 200)
    L = np.log(math.e / t)
    assert np.allclose(1.0 / p.evaluate(t) - 0.5, 1.5 / 2.0 * np.log(L) / L, rtol=1e-12)


def test_chain_indicator():
    rep = embedding_chain_check(constant(1.0), 2.0, 1.0, eps_grid=[0.5])
    row = rep["rows"][0]
    assert row["lp"] == pytest.approx(1.0) and row["bound"] == pytest.approx(0.5 ** (-1 / 1.5))
    assert rep["passed"]


def test_chain_zero_function():
    rep = embedding_chain_check(constant(0.0), 2.0, 1.0)
    assert rep["passed"] and all(r["lp"] == 0.0 for r in rep["rows"])
    assert all(rep["norms"][k]["value"] == 0.0 for k in ("small", "lp", "grand"))


def test_chain_verdicts_monotone_in_delta():
    # f = t^{-1/2 + delta}: every membership switches on at most once as delta grows
    rows = [embedding_chain_check(PowerLogLog(0.5 - d), 2.0, 1.0, eps_grid=[0.5])["chain"]
            for d in (-0.1, 0.0, 0.05, 0.2)]
    for key in ("small_finite", "lp_finite", "grand_finite"):
        flags = [r[key] for r in rows]
        assert flags == sorted(flags), (key, flags)
    assert rows[1] == {"small_finite": False, "lp_finite": False, "grand_finite": True}


def test_frs_constant_exponent():
    rng = np.random.default_rng(7)
    corpus = [(random_step(rng, zero_ok=False), 2.5) for _ in range(10)]
    rep = frs_inequality_check(corpus)
    for r in rep.rows:
        assert r["r1"] == pytest.approx(1.0, abs=1e-8) and r["r2"] == pytest.approx(1.0, abs=1e-8)


def test_frs_already_decreasing():
    u = StepFunction([0, 0.3, 1], [4.0, 1.0])
    p = ExponentSpec(StepFunction([0, 0.5, 1], [3.0, 2.0]))
    r = frs_inequality_check([(u, p)]).rows[0]
    assert r["r2"] == 1.0


def test_frs_random_pairs_finite():
    rng = np.random.default_rng(11)
    corpus = [(random_step(rng, zero_ok=False), ExponentSpec(random_step_exponent(rng))) for _ in range(30)]
    rep = frs_inequality_check(corpus)
    assert all(math.isfinite(x) and x > 0 for x in (rep.r1_min, rep.r1_max, rep.r2_min, rep.r2_max))
    assert rep.equality_cases == []


def test_frs_envelope_regression(corpus):
    # frozen envelope for the acceptance mixed corpus (exponent seed 13)
    rng = np.random.default_rng(13)
    rep = frs_inequality_check([(f, ExponentSpec(random_step_exponent(rng))) for f in corpus])
    got = (rep.r1_min, rep.r1_max, rep.r2_min, rep.r2_max)
    want = (0.7098267548148545, 1.0031968695364055, 0.6578911601591202, 1.0018490838743959)
    assert got == pytest.approx(want, rel=1e-8)


def test_frs_equality_case():
    rep = frs_inequality_check([frs_equality_example()])
    assert rep.equality_cases == [0]
    assert rep.rows[0]["infinite"] == [False, False, True]


def test_pointwise_bounded():
    p = ExponentSpec(StepFunction([0, 0.5, 1], [3.0, 2.0]))
    rep = pointwise_bound_check(constant(1.0), p)
    assert rep["C"] <= 1.0


def test_pointwise_exact_cancellation():
    # (e/t)^{1/3} sits exactly on the bound for p = 3, though its modular diverges
    u = PowerLogLog(1.0 / 3.0, scale=math.e ** (1.0 / 3.0))
    rep = pointwise_bound_check(u, 3.0, sigma=0.0, require_finite_modular=False)
    assert rep["C"] == pytest.approx(1.0, rel=1e-12) and rep["modular"] == math.inf


def test_pointwise_sigma_none_is_zero():
    u, p = extremal_pointwise_family()
    assert pointwise_bound_check(u, p, sigma=None, theta=1.0, A=0.5) == \
        pointwise_bound_check(u, p, sigma=0.0, theta=1.0, A=0.5)


def test_pointwise_extremal_family():
    u, p = extremal_pointwise_family(2.0, 1.0, 0.5)
    rep = pointwise_bound_check(u, p, theta=1.0, A=0.5)
    assert rep["C_stable"] and rep["chain_finite"] and rep["grand_finite"]
    assert all(c["holds"] for c in rep["conditions"])


def test_pointwise_infinite_modular():
    with pytest.raises(ParameterError):
        pointwise_bound_check(PowerLogLog(0.6), 2.0)


def test_duality_agrees():
    rep = duality_check([(0.5, 0.1), (1.0, 0.01), (2.0, 0.5)])
    assert rep["passed"] and rep["agreements"] == 3


@given(st.floats(0.05, 3.0), st.floats(0.0, 1.0))
def test_duality_property(theta, eps):
    assert duality_check([(theta, eps)])["passed"]
