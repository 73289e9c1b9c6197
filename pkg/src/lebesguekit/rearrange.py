"""Distribution functions and decreasing/increasing rearrangements on [0, 1]."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, UnsupportedRepresentation
from .funcrep import (
    FunctionSpec,
    GeometricSteps,
    Reflected,
    SampledFunction,
    Scaled,
    StepFunction,
    t_of_u,
)
from .integrals import power_integral


def distribution(f: FunctionSpec, lam: float) -> float:
    """``|{t in (0, 1] : |f(t)| > lam}|``."""
    if not lam >= 0:
        raise ParameterError("level must be non-negative")
    c = f.cells()
    with np.errstate(divide="ignore"):
        ll = math.log(lam) if lam > 0 else -math.inf
    if c is not None:
        above = c.log_values > ll
        if not above.any():
            return 0.0
        return float(min(1.0, math.fsum(np.exp(c.log_width[above]))))
    mono = f.monotonicity
    g = lambda u: float(f.log_value_u(np.array([u]))[0]) - ll
    if mono == "constant":
        return 1.0 if g(1.0) > 0 else 0.0
    if mono == "decreasing":
        # {f > lam} = (0, t*): find the smallest u where f exceeds lam
        if g(1.0) > 0:
            return 1.0
        hi = 2.0
        while g(hi) <= 0:
            hi *= 2.0
            if hi > 1e300:
                return 0.0
        u_star = _bisect_threshold(lambda u: g(u) > 0, 1.0, hi)
        return float(t_of_u(u_star))
    if mono == "increasing":
        # {f > lam} = (t*, 1]: the set sits where u is small
        if g(1.0) <= 0:
            return 0.0
        if f.log_limit_at_zero() - ll > 0:
            return 1.0
        hi = 2.0
        while g(hi) > 0:
            hi *= 2.0
            if hi > 1e300:
                return 1.0
        u_star = _bisect_threshold(lambda u: g(u) <= 0, 1.0, hi)
        return float(-np.expm1(1.0 - u_star))
    raise UnsupportedRepresentation("distribution of a non-monotone analytic function")


def _bisect_threshold(pred, lo, hi):
    """Smallest point where a monotone predicate switches from False (at ``lo``) to True (at ``hi``)."""
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _sorted_step(breaks, values) -> StepFunction:
    w = np.diff(breaks)
    order = np.argsort(-np.abs(values), kind="stable")
    nb = np.concatenate([[0.0], np.cumsum(w[order])])
    nb[-1] = 1.0
    v = np.abs(values[order])
    # merge cells whose breaks collapsed under rounding
    keep = np.concatenate([np.diff(nb) > 0])
    if not keep.all():
        nb = np.concatenate([[0.0], nb[1:][keep]])
        nb[-1] = 1.0
        v = v[keep]
    return StepFunction(nb, v)


def decreasing_rearrangement(f: FunctionSpec) -> FunctionSpec:
    """Non-increasing function on (0, 1] equimeasurable with ``|f|``.

    Step inputs are sorted exactly (cells reordered by value, widths kept).
    Monotone analytic inputs are returned as is or reflected.
    """
    if isinstance(f, (StepFunction, SampledFunction)):
        step = f.step if isinstance(f, SampledFunction) else f
        if step.monotonicity in ("decreasing", "constant") and not step.signed:
            return step
        return _sorted_step(step.breaks, step.values)
    if isinstance(f, GeometricSteps):
        return _rearrange_geometric(f)
    if isinstance(f, Scaled) and f.factor >= 0:
        src = decreasing_rearrangement(f.source)
        return src.scaled(f.factor) if src is not f.source else f
    mono = f.monotonicity
    if mono in ("decreasing", "constant"):
        return f
    if mono == "increasing":
        if isinstance(f, Reflected):
            return f.source
        return Reflected(f)
    raise UnsupportedRepresentation(f"cannot rearrange non-monotone {f.kind} representation")


def _rearrange_geometric(f: GeometricSteps) -> FunctionSpec:
    if f.monotonicity in ("decreasing", "constant"):
        return f
    lv = f.log_values
    # deepest suffix j* .. J on which log-values are non-decreasing in j
    d = np.diff(np.concatenate([lv, [f.log_tail]]))
    bad = np.nonzero(d < 0)[0]
    k = int(bad[-1]) + 1 if bad.size else 0
    with np.errstate(divide="ignore"):
        head_max = float(np.max(np.log(f.head_values))) if f.head_values.size else -math.inf
    # walk deeper until the deep part dominates everything shallower
    shallow_max = max(head_max, float(np.max(lv[:k])) if k else -math.inf)
    while k < lv.size and lv[k] < shallow_max:
        shallow_max = max(shallow_max, lv[k])
        k += 1
    if k >= lv.size:
        if f.log_tail < shallow_max or f.J > 2000:
            raise UnsupportedRepresentation("geometric step series has no monotone deep part")
        return _materialize_geometric(f)
    j_star = f.j_start + k
    # shallow part: head cells and geometric cells j_start .. j_star-1, sorted by value
    widths = [np.diff(f.head_breaks)] if f.head_values.size else []
    logs = [np.log(f.head_values)] if f.head_values.size else []
    if k:
        jj = np.arange(f.j_start, j_star, dtype=float)
        widths.append(np.exp(-jj) * (1.0 - math.exp(-1.0)))
        logs.append(lv[:k])
    w = np.concatenate(widths)
    v = np.concatenate(logs)
    order = np.argsort(-v, kind="stable")
    hb = np.concatenate([[math.exp(-j_star)], math.exp(-j_star) + np.cumsum(w[order])])
    hb[-1] = 1.0
    return GeometricSteps(hb, np.exp(v[order]), j_star, lv[k:], f.log_tail)


def _materialize_geometric(f: GeometricSteps) -> StepFunction:
    c = f.cells()
    lo = t_of_u(c.u_hi)
    br = np.concatenate([[0.0], lo[::-1][1:], [1.0]])
    return _sorted_step(br, c.values[::-1])


def increasing_rearrangement(f: FunctionSpec) -> FunctionSpec:
    """``t -> f_*(1 - t)``: non-decreasing and equimeasurable with ``|f|``."""
    mono = f.monotonicity
    if mono in ("increasing", "constant") and not getattr(f, "signed", False):
        if isinstance(f, SampledFunction):
            return f.step
        return f
    d = decreasing_rearrangement(f)
    if isinstance(d, StepFunction):
        nb = 1.0 - d.breaks[::-1]
        nb[0], nb[-1] = 0.0, 1.0
        return StepFunction(nb, d.values[::-1].copy())
    if isinstance(d, Reflected):
        return d.source
    return Reflected(d)


@dataclass(frozen=True)
class EquimeasurabilityReport:
    exponents: tuple
    integrals: tuple
    rearranged_integrals: tuple
    relative_errors: tuple
    divergent: tuple
    worst_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst_relative_error <= self.tolerance

    def to_dict(self):
        return {
            "exponents": list(self.exponents),
            "integrals": list(self.integrals),
            "rearranged_integrals": list(self.rearranged_integrals),
            "relative_errors": list(self.relative_errors),
            "divergent": list(self.divergent),
            "worst_relative_error": self.worst_relative_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def equimeasurability_check(f: FunctionSpec, exponents, tolerance: float = 1e-12) -> EquimeasurabilityReport:
    """Compare ``int |f|^p`` with ``int f_*^p`` for each ``p``; divergent moments are flagged."""
    fs = decreasing_rearrangement(f)
    ints, rints, errs, div = [], [], [], []
    for p in exponents:
        if not p >= 1:
            raise ParameterError("exponents must be >= 1")
        a = power_integral(f, p)
        b = power_integral(fs, p)
        ints.append(a.value)
        rints.append(b.value)
        if a.infinite or b.infinite:
            div.append(True)
            errs.append(0.0 if (a.infinite and b.infinite) else math.inf)
            continue
        div.append(False)
        errs.append(abs(a.value - b.value) / b.value if b.value > 0 else abs(a.value))
    worst = max(errs) if errs else 0.0
    return EquimeasurabilityReport(tuple(float(x) for x in exponents), tuple(ints), tuple(rints), tuple(errs),
                                   tuple(div), float(worst), tolerance)
