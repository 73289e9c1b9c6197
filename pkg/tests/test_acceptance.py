"""Acceptance gate: one test per criterion, each printing a single pass/fail line."""
import itertools
import math
import time

import numpy as np

from lebesguekit import (
    ExponentSpec,
    GrandParams,
    StepFunction,
    constant,
    decreasing_rearrangement,
    grand_norm_def,
    grand_norm_rearr,
    holder_pairing,
    lp_norm,
    luxemburg_norm,
    variable_modular,
)
from lebesguekit.exponents import conjugate
from lebesguekit.experiments import (
    duality_check,
    embedding_chain_check,
    extremal_pointwise_family,
    frs_equality_example,
    frs_inequality_check,
    pointwise_bound_check,
    reproduce_no_rearrange,
    reproduce_no_var_small,
)

import oracles
from conftest import random_step, random_step_exponent

CONST_P = (1.5, 2.0, 2.5, 3.7, 6.0)
# frozen mpmath value, scripts/compute_oracles.py
GRAND_REARR_INDICATOR = 0.56377693540918529


def _rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a)


def test_norm_oracle_agreement(corpus, verdict):
    worst_lux = worst_grand = 0.0
    for i, f in enumerate(corpus):
        p = CONST_P[i % len(CONST_P)]
        want = oracles.step_lp(f.breaks, f.values, p)
        worst_lux = max(worst_lux, _rel(luxemburg_norm(f, p).value, want))
        g = grand_norm_def(f, GrandParams(p, 0.0)).value
        worst_grand = max(worst_grand, _rel(g, lp_norm(f, p).value))
    ok = worst_lux <= 1e-8 and worst_grand <= 1e-9
    assert verdict(1, "norm-oracle agreement", ok, f"luxemburg {worst_lux:.1e}, grand theta=0 {worst_grand:.1e}")


def _exponent_corpus(corpus, seed=7):
    rng = np.random.default_rng(seed)
    return [(f, ExponentSpec(random_step_exponent(rng))) for f in corpus]


def test_unit_ball(corpus, verdict):
    bad = 0
    for f, p in _exponent_corpus(corpus):
        lam = luxemburg_norm(f, p)
        if lam.infinite or lam.value == 0:
            continue
        at = variable_modular(f, p, lam.value).value
        below = variable_modular(f, p, 0.99 * lam.value).value
        bad += not (1 - 1e-6 < at <= 1 + 1e-6 and below > 1 - 1e-6)
    assert verdict(2, "unit-ball property", bad == 0, f"{bad} violations over {len(corpus)}")


def test_equimeasurability(corpus, verdict):
    worst = 0.0
    for f in corpus:
        fs = decreasing_rearrangement(f)
        assert np.all(np.diff(fs.values) <= 0)
        for p in (1.0, 2.0, 3.7):
            a = oracles.step_power_integral(f.breaks, f.values, p)
            b = oracles.step_power_integral(fs.breaks, fs.values, p)
            worst = max(worst, _rel(b, a), _rel(lp_norm(fs, p).value ** p, a))
    assert verdict(3, "equimeasurability", worst <= 1e-12, f"worst relative gap {worst:.1e}")


def test_definitional_embedding(corpus, verdict):
    violations = 0
    for i, f in enumerate(corpus):
        rep = embedding_chain_check(f, (2.0, 2.5, 3.7)[i % 3], (0.5, 1.0, 2.0)[i % 3])
        assert len(rep["rows"]) == 50
        violations += rep["violations"] + (not rep["chain_ok"])
    assert verdict(4, "definitional embedding inequality", violations == 0, f"{violations} violations")


def test_holder_bound(verdict):
    rng = np.random.default_rng(11)
    violations, worst = 0, 0.0
    for _ in range(100):
        f, g = random_step(rng), random_step(rng)
        p = ExponentSpec(random_step_exponent(rng))
        lhs = holder_pairing(f, g)
        rhs = 4 * luxemburg_norm(f, p).value * luxemburg_norm(g, conjugate(p)).value
        violations += lhs > rhs * (1 + 1e-12)
        if rhs > 0:
            worst = max(worst, lhs / rhs)
    assert verdict(5, "Hoelder bound with constant 4", violations == 0,
                   f"{violations} violations, max lhs/rhs {worst:.3f}")


def test_grand_norm_equivalence(corpus, verdict):
    lo, hi = math.inf, 0.0
    for i, f in enumerate(corpus):
        gp = GrandParams((1.5, 2.0, 3.0)[i % 3], (0.5, 1.0, 2.0)[(i // 3) % 3])
        r = grand_norm_def(f, gp).value / grand_norm_rearr(f, gp).value
        lo, hi = min(lo, r), max(hi, r)
    gp = GrandParams(2.0, 1.0)
    d = grand_norm_def(constant(1.0), gp).value
    r = grand_norm_rearr(constant(1.0), gp).value
    d_oracle = oracles.step_grand_def([0.0, 1.0], [1.0], 2.0, 1.0)
    ok = 1 / 20 <= lo and hi <= 20 and abs(d - d_oracle) <= 1e-3 and abs(r - GRAND_REARR_INDICATOR) <= 1e-3
    assert verdict(6, "grand-norm equivalence", ok,
                   f"ratio range [{lo:.3f}, {hi:.3f}], indicator def {d:.6f}, rearr {r:.6f}")


def test_unbounded_exponent_example(verdict):
    fails = []
    slowest = 0.0
    for b, theta in itertools.product((1.25, 1.5, 1.75), (0.5, 1.0, 2.0)):
        t0 = time.perf_counter()
        rep = reproduce_no_var_small(b, theta)
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        assert rep.norms["levels"][-1] == 10 ** 6
        ok = (rep.verdicts["modular"].verdict.name == "CONVERGENT"
              and rep.verdicts["small_norm"].verdict.name == "DIVERGENT"
              and rep.verdicts["small_norm"].fit_quality >= 0.99
              and rep.checks["no_var_small_holds"]["passed"]
              and rep.checks["var_small_fails"]["passed"]
              and dt <= 120.0)
        if not ok:
            fails.append((b, theta))
    assert verdict(7, "unbounded-exponent counterexample", not fails,
                   f"failing pairs {fails}, slowest {slowest:.1f} s")


def test_decreasing_exponent_example(verdict):
    fails, spreads = [], []
    for p0, theta, eps in itertools.product((2.0, 3.0), (0.5, 1.0), (0.25, 0.5)):
        rep = reproduce_no_rearrange(p0, theta, eps)
        g = rep.checks["grand_lower_bound"]
        spreads.append(g["spread"])
        ok = (rep.verdicts["modular"].verdict.name == "CONVERGENT" and g["passed"] and g["lower_bound"] > 0
              and rep.checks["no_rearrange_holds"]["passed"])
        if not ok:
            fails.append((p0, theta, eps))
    assert verdict(8, "decreasing-exponent counterexample", not fails,
                   f"failing triples {fails}, worst ratio spread {max(spreads):.3f}")


def test_rearranged_exponent_norms(corpus, verdict):
    const = [(f, CONST_P[i % len(CONST_P)]) for i, f in enumerate(corpus)]
    rc = frs_inequality_check(const)
    const_ok = all(abs(x - 1) <= 1e-8 for x in (rc.r1_min, rc.r1_max, rc.r2_min, rc.r2_max))
    mixed = _exponent_corpus(corpus, seed=13) + [frs_equality_example()]
    rm = frs_inequality_check(mixed)
    finite = all(r["r1"] is not None and math.isfinite(r["r1"]) and r["r2"] is not None and math.isfinite(r["r2"])
                 for r in rm.rows[:-1])
    ok = const_ok and finite and len(rm.equality_cases) >= 1
    assert verdict(9, "rearranged-exponent norm inequalities", ok,
                   f"mixed envelope r1 [{rm.r1_min:.3f}, {rm.r1_max:.3f}], r2 [{rm.r2_min:.3f}, {rm.r2_max:.3f}], "
                   f"{len(rm.equality_cases)} equality case(s)")


_pointwise_families = [
    # p0, theta, A, sigma
    (2.0, 1.0, 0.5, 0.0),
    (2.0, 2.0, 0.0, 0.0),
    (3.0, 1.5, 0.25, 0.0),
    (2.0, 1.0, 0.5, 0.5),
    (2.5, 1.0, 0.0, StepFunction([0.0, 0.5, 1.0], [1.0, 0.5])),
]


def test_pointwise_bound(verdict):
    fails = []
    for p0, theta, A, sigma in _pointwise_families:
        u, p = extremal_pointwise_family(p0, theta, A, sigma)
        rep = pointwise_bound_check(u, p, sigma=sigma, theta=theta, A=A)
        if not (math.isfinite(rep["C"]) and rep["C_stable"] and rep["grand_finite"]):
            fails.append((p0, theta, A))
    u, p = extremal_pointwise_family(2.0, 1.0, 0.5)
    same = pointwise_bound_check(u, p, sigma=None, theta=1.0, A=0.5) == \
        pointwise_bound_check(u, p, sigma=0.0, theta=1.0, A=0.5)
    assert verdict(10, "pointwise bound", not fails and same,
                   f"{len(_pointwise_families)} families, failing {fails}, sigma=None path identical: {same}")


def test_checker_duality(verdict):
    pairs = list(itertools.product((0.5, 1.0, 1.5, 2.0, 3.0), (0.01, 0.05, 0.1, 0.5)))
    rep = duality_check(pairs)
    assert verdict(11, "checker duality", rep["passed"] and len(pairs) == 20,
                   f"{rep['agreements']}/{len(pairs)} pairs agree")
