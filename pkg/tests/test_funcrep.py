import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lebesguekit import (
    DomainError,
    ParameterError,
    PowerLogLog,
    SampledFunction,
    SpecFormatError,
    StepFunction,
    build_example_no_rearrange,
    build_example_no_var_small,
    decreasing_rearrangement,
    function_from_spec,
)
from lebesguekit.funcrep import SeriesCoefficients, series_log_coefficients
from lebesguekit.integrals import power_integral
from lebesguekit.quadrature import integrate_graded

import oracles

E = math.e


def a_j_direct(b, theta, j):
    # coded straight from the closed form, without log-space
    return (math.exp(j) / (j * math.log(j) ** b)) ** (0.5 * (j + 1) / (j + 1 + theta * math.log(j + 2)))


_inputs_eval = [
    (StepFunction([0, 0.5, 1], [1, 3]), 0.25, 1.0),
    (StepFunction([0, 0.5, 1], [1, 3]), 0.5, 1.0),
    (StepFunction([0, 0.5, 1], [1, 3]), 0.75, 3.0),
    (PowerLogLog(0.5), 0.25, 2.0),
    (PowerLogLog(0.25), math.exp(-4.0), E),
    (PowerLogLog(0.5, valid_to=0.25), 0.5, 2.0),
]


@pytest.mark.parametrize("f, t, expected", _inputs_eval)
def test_evaluate(f, t, expected):
    assert f.evaluate(t) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("t", [0.0, -0.1, 1.5])
def test_evaluate_domain(t):
    with pytest.raises(DomainError):
        PowerLogLog(0.5).evaluate(t)


_inputs_bad_step = [
    ([0, 1], [1, 2]),
    ([0.1, 1], [1]),
    ([0, 0.5, 0.5, 1], [1, 2, 3]),
    ([0, 1], [-1]),
    ([0, 1], [np.inf]),
]


@pytest.mark.parametrize("breaks, values", _inputs_bad_step)
def test_step_validation(breaks, values):
    with pytest.raises(ParameterError):
        StepFunction(breaks, values)


def test_series_head_coefficient():
    # a_2 for (b, theta) = (1.5, 1); mpmath value from scripts/compute_oracles.py
    f = build_example_no_var_small(1.5, 1.0, 3)
    assert f.evaluate(0.5) == pytest.approx(1.8868657159409853, rel=1e-14)
    assert f.evaluate(math.exp(-2.5)) == pytest.approx(a_j_direct(1.5, 1.0, 2), rel=1e-14)


@pytest.mark.parametrize("b, theta", [(1.25, 0.5), (1.5, 1.0), (1.75, 2.0)])
def test_series_coefficients_match_direct_formula(b, theta):
    j = np.arange(2, 300)
    got = SeriesCoefficients(b, theta, 299).a
    want = np.array([a_j_direct(b, theta, int(k)) for k in j])
    assert np.allclose(got, want, rtol=1e-12, atol=0)


def test_series_log_space_survives_large_j():
    la = series_log_coefficients(1.5, 1.0, np.array([10 ** 6]))
    assert np.isfinite(la).all() and la[0] > 700


@pytest.mark.parametrize("b, theta", [(b, th) for b in (1.25, 1.5, 1.75) for th in (0.5, 1.0, 2.0)])
def test_series_decreasing_below_third_cell(b, theta):
    f = build_example_no_var_small(b, theta, 2000)
    lv = f.log_values
    assert np.all(np.diff(lv[1:]) >= 0), "coefficients must increase from j = 3 on"


def test_series_first_step_can_go_the_wrong_way():
    # log(2) < 1 makes the factor log(j)^-b exceed 1 at j = 2, so a_2 > a_3 here
    f = build_example_no_var_small(1.5, 1.0, 10)
    assert f.log_values[0] > f.log_values[1]
    assert build_example_no_var_small(1.25, 1.0, 10).log_values[0] < build_example_no_var_small(1.25, 1.0, 10).log_values[1]


_inputs_series_bad = [(1.5, 1.0, 2), (2.5, 1.0, 10), (1.0, 1.0, 10), (1.5, 0.0, 10), (1.5, -1.0, 10)]


@pytest.mark.parametrize("b, theta, J", _inputs_series_bad)
def test_series_parameter_errors(b, theta, J):
    with pytest.raises(ParameterError):
        build_example_no_var_small(b, theta, J)


def test_series_rearrangement_keeps_deep_cells():
    f = build_example_no_var_small(1.5, 1.0, 500).restrict_below(3)
    fs = decreasing_rearrangement(f)
    u = np.arange(4.5, 500.0)
    assert np.array_equal(fs.log_value_u(u), f.log_value_u(u))


def test_no_rearrange_value_at_t0():
    # [log 3 / (e^-2 3^0)]^(1/2)
    f = build_example_no_rearrange(2.0, 1.0, math.exp(-2.0))
    assert f.evaluate(math.exp(-2.0)) == pytest.approx(2.8491591447202903, rel=1e-14)
    assert f.evaluate(0.7) == f.evaluate(math.exp(-2.0))


@pytest.mark.parametrize("p0, theta", [(2.0, 1.0), (2.0, 0.5), (3.0, 1.0), (1.5, 3.0)])
def test_no_rearrange_bookkeeping_and_monotone(p0, theta):
    f = build_example_no_rearrange(p0, theta)
    assert (f.a, f.b, f.c) == (1.0 / p0, (theta - 1.0) / p0, 1.0 / p0)
    t = np.geomspace(f.valid_to, 1e-300, 1000)
    assert np.all(np.diff(f.evaluate(t)) >= 0)


def test_no_rearrange_errors():
    with pytest.raises(ParameterError):
        build_example_no_rearrange(1.0, 1.0)
    with pytest.raises(ParameterError):
        build_example_no_rearrange(2.0, 0.0)


@given(st.floats(0.01, 0.99), st.floats(-3, 3), st.floats(-3, 3))
def test_powerloglog_decreasing_near_zero(a, b, c):
    f = PowerLogLog(a, b, c)
    u = np.geomspace(1e4, 1e15, 200)
    lv = f.log_value_u(u)
    assert np.all(np.diff(lv) > 0)


@given(st.floats(1e-6, 1.0))
def test_evaluate_deterministic(t):
    f = PowerLogLog(0.3, 0.7, -0.4)
    assert f.evaluate(t) == f.evaluate(t)


@given(st.lists(st.floats(0.0, 10.0), min_size=1, max_size=8), st.floats(1.0, 4.0))
def test_step_integral_closed_form(values, p):
    n = len(values)
    breaks = np.linspace(0.0, 1.0, n + 1) ** 1.7
    f = StepFunction(breaks, values)
    got = power_integral(f, p).value
    want = oracles.step_power_integral(breaks, values, p)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


def test_step_integral_by_quadrature_matches_closed_form():
    f = StepFunction([0, 0.2, 0.7, 1], [2.0, 0.5, 1.5])
    want = oracles.step_power_integral(f.breaks, f.values, 2.5)
    res = integrate_graded(lambda t: f.evaluate(t) ** 2.5, breakpoints=[0.2, 0.7], tol=1e-13)
    assert res.value == pytest.approx(want, rel=1e-12)


def test_sampled_function_cells():
    s = SampledFunction([1.0, 0.5, 0.1], [1.0, 2.0, 3.0])
    assert s.evaluate(np.array([0.75, 0.3, 0.05])).tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(ParameterError):
        SampledFunction([0.1, 0.5], [1.0, 2.0])


_inputs_specs = [
    {"kind": "step", "breaks": [0, 0.5, 1], "values": [1, 3]},
    {"kind": "powerloglog", "a": 0.25, "b": 0.5, "c": -1.0, "scale": 2.0, "t0": 0.5},
    {"kind": "sampled", "grid": [1.0, 0.5, 0.1], "values": [1.0, 2.0, 3.0]},
    {"kind": "example-no-var-small", "b": 1.5, "theta": 1.0, "J": 20},
    {"kind": "example-no-rearrange", "p0": 2.0, "theta": 1.0, "t0": math.exp(-2.0)},
]


@pytest.mark.parametrize("spec", _inputs_specs)
def test_spec_roundtrip(spec):
    f = function_from_spec(spec)
    g = function_from_spec(f.to_dict())
    t = np.geomspace(1.0, 1e-8, 50)
    assert np.array_equal(f.evaluate(t), g.evaluate(t))


_inputs_bad_specs = [
    ({"kind": "step", "breaks": [0, 1]}, "values"),
    ({"kind": "step", "breaks": [0, 1], "values": ["x"]}, "values"),
    ({"kind": "nope"}, "kind"),
    ({"kind": "powerloglog", "a": "half"}, "a"),
    ({"kind": "example-no-var-small", "b": 2.5, "theta": 1, "J": 10}, "example-no-var-small"),
]


@pytest.mark.parametrize("spec, field", _inputs_bad_specs)
def test_spec_errors_name_field(spec, field):
    with pytest.raises(SpecFormatError) as exc:
        function_from_spec(spec)
    assert exc.value.field == field
