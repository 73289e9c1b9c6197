"""Norm functionals on (0, 1]: Lebesgue, variable Luxemburg, grand, small and Musielak-Orlicz."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .exponents import ExponentSpec, as_exponent, conj
from .funcrep import FunctionSpec, StepFunction, t_of_u
from .integrals import CumulativeMass, integrate_log, power_integral
from .quadrature import (
    DEFAULT_TOL,
    Verdict,
    classify_growth,
    integrate_u,
)
from .rearrange import decreasing_rearrangement
from .search import golden_max, grid_then_golden

LUX_RTOL = 1e-12
MAX_DOUBLINGS = 60
EPS_GRID_POINTS = 256
EPS_OFFSET = 1e-6


@dataclass(frozen=True)
class GrandParams:
    p: float
    theta: float

    def __post_init__(self):
        if not (1.0 < self.p < math.inf):
            raise ParameterError(f"p must lie in (1, inf), got {self.p}")
        if not self.theta >= 0:
            raise ParameterError(f"theta must be non-negative, got {self.theta}")

    @property
    def p_conj(self) -> float:
        return conj(self.p)


@dataclass
class NormResult:
    value: float
    error_estimate: float = 0.0
    infinite: bool = False
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def inf(cls, **diag) -> "NormResult":
        return cls(math.inf, 0.0, True, diag)

    def to_dict(self):
        return {
            "value": None if self.infinite else self.value,
            "infinite": self.infinite,
            "error_estimate": self.error_estimate,
            "diagnostics": self.diagnostics,
        }


def _sigma_is_zero(sigma) -> bool:
    if sigma is None:
        return True
    if isinstance(sigma, FunctionSpec):
        c = sigma.cells()
        return c is not None and bool(np.all(c.values == 0.0))
    return float(sigma) == 0.0


@dataclass(frozen=True)
class MusielakParams:
    """``phi(t, b) = b^{p_*(t)} log(e + b)^{sigma_*(t)}``."""

    p_star: ExponentSpec
    sigma_star: FunctionSpec | float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "p_star", as_exponent(self.p_star))
        s = self.sigma_star
        if isinstance(s, FunctionSpec):
            if s.monotonicity not in ("decreasing", "constant"):
                raise ParameterError("sigma_* must be non-increasing")
            if not (math.isfinite(s.sup_value()) and math.isfinite(s.limit_at_zero())):
                raise ParameterError("sigma_* must be bounded")
        elif not math.isfinite(float(s)):
            raise ParameterError("sigma_* must be bounded")

    @property
    def trivial_sigma(self) -> bool:
        return _sigma_is_zero(self.sigma_star)


def _outcome_result(o, **diag) -> NormResult:
    d = dict(o.diagnostics())
    d.update(diag)
    if o.infinite:
        return NormResult(math.inf, 0.0, True, d)
    return NormResult(float(o.value), float(o.error), False, d)


def lp_norm(f: FunctionSpec, p: float, tol: float = DEFAULT_TOL) -> NormResult:
    """``(int_0^1 |f|^p)^{1/p}``."""
    if not p >= 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    o = power_integral(f, float(p), tol=tol)
    if o.infinite:
        return _outcome_result(o)
    v = o.value ** (1.0 / p)
    err = v * o.error / (p * o.value) if o.value > 0 else 0.0
    return NormResult(v, err, False, o.diagnostics())


def variable_modular(f: FunctionSpec, p, lam: float = 1.0, tol: float = DEFAULT_TOL) -> NormResult:
    """``rho(f/lam) = int (|f|/lam)^{p(t)} dt``."""
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    p = as_exponent(p)
    return _outcome_result(power_integral(f, p, lam, tol=tol))


def _is_zero(f: FunctionSpec) -> bool:
    c = f.cells()
    if c is not None:
        return bool(np.all(np.isneginf(c.log_values)))
    return False


def _luxemburg(rho, p_lo: float, p_hi: float) -> NormResult:
    """Smallest ``lam`` with ``rho(lam) <= 1`` by log-bisection, for a modular decreasing in ``lam``."""
    evals = [0]

    def r(lam):
        evals[0] += 1
        return rho(lam)

    m = r(1.0)
    if m.infinite:
        # with p_+ < inf, rho(f/lam) >= min(lam^-p_-, lam^-p_+) rho(f): infinite for every lam
        return NormResult.inf(note="modular infinite at lam = 1, hence for every lam", evaluations=evals[0],
                              modular=m.diagnostics)
    elif m.value == 0.0:
        return NormResult(0.0, 0.0, False, {"evaluations": evals[0]})
    else:
        # power scaling bounds for lam on either side of 1
        if m.value >= 1.0:
            lo, hi = m.value ** (1.0 / p_hi), m.value ** (1.0 / p_lo)
        else:
            lo, hi = m.value ** (1.0 / p_lo), m.value ** (1.0 / p_hi)
        lo *= 1.0 - 1e-12
        hi *= 1.0 + 1e-12
    # make sure rho(lo) > 1 >= rho(hi)
    if not _le1(r(hi)):
        hi = hi * 2.0
        k = 0
        while not _le1(r(hi)):
            lo = hi
            hi *= 2.0
            k += 1
            if k > MAX_DOUBLINGS:
                return NormResult.inf(note="bracket expansion exhausted", evaluations=evals[0])
    k = 0
    while _le1(r(lo)):
        hi = lo
        lo /= 2.0
        k += 1
        if k > MAX_DOUBLINGS:
            return NormResult(0.0, hi, False, {"note": "bracket contraction exhausted", "evaluations": evals[0]})
    it = 0
    while hi / lo - 1.0 > LUX_RTOL:
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            break
        if _le1(r(mid)):
            hi = mid
        else:
            lo = mid
        it += 1
    final = r(hi)
    err = (hi - lo) + hi * final.error_estimate / max(p_lo, 1.0)
    return NormResult(hi, err, False, {"bisection_iterations": it, "evaluations": evals[0],
                                       "modular_at_value": final.value, "bracket": [lo, hi]})


def _le1(m: NormResult) -> bool:
    return (not m.infinite) and m.value <= 1.0


def luxemburg_norm(f: FunctionSpec, p, tol: float = DEFAULT_TOL) -> NormResult:
    """``inf{lam > 0 : rho(f/lam) <= 1}``."""
    p = as_exponent(p)
    if _is_zero(f):
        return NormResult(0.0, 0.0, False, {"note": "zero function"})
    return _luxemburg(lambda lam: variable_modular(f, p, lam, tol), p.p_minus, p.p_plus)


def musielak_modular(f: FunctionSpec, mp: MusielakParams, lam: float = 1.0, tol: float = DEFAULT_TOL) -> NormResult:
    """``int phi(t, |f|/lam) dt`` with ``phi(t, b) = b^{p_*(t)} log(e+b)^{sigma_*(t)}``."""
    if mp.trivial_sigma:
        return variable_modular(f, mp.p_star, lam, tol)
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    return _outcome_result(power_integral(f, mp.p_star, lam, mp.sigma_star, tol=tol))


def musielak_norm(f: FunctionSpec, mp: MusielakParams, tol: float = DEFAULT_TOL) -> NormResult:
    """Luxemburg norm built on :func:`musielak_modular`."""
    if mp.trivial_sigma:
        return luxemburg_norm(f, mp.p_star, tol)
    if _is_zero(f):
        return NormResult(0.0, 0.0, False, {"note": "zero function"})
    return _luxemburg(lambda lam: musielak_modular(f, mp, lam, tol), mp.p_star.p_minus, mp.p_star.p_plus)


def holder_pairing(f: FunctionSpec, g: FunctionSpec, p=None, tol: float = DEFAULT_TOL) -> float:
    """``int_0^1 |f g| dt`` (``p`` is accepted for symmetry with the norm pair it is compared against)."""
    o = integrate_log([f, g], lambda u, lvs: lvs[0] + lvs[1], tol=tol)
    return math.inf if o.infinite else float(o.value)


# -- grand norm, definitional form --------------------------------------------

def _log_grand_term(f, gp, eps, tol):
    """``log (eps^theta int |f|^{p-eps})^{1/(p-eps)}``; ``+inf`` if the integral diverges."""
    s = gp.p - eps
    o = power_integral(f, s, tol=tol)
    if o.infinite:
        return math.inf
    if o.value <= 0:
        return -math.inf
    lt = gp.theta * math.log(eps) if gp.theta else 0.0
    return (lt + math.log(o.value)) / s


def grand_norm_def(f: FunctionSpec, gp: GrandParams, tol: float = DEFAULT_TOL) -> NormResult:
    """``sup_{0<eps<p-1} (eps^theta int |f|^{p-eps})^{1/(p-eps)}``.

    A 256-point grid offset from both ends, golden refinement around the best
    node, and one-sided limits at both ends of the interval.
    """
    if _is_zero(f):
        return NormResult(0.0, 0.0, False, {"note": "zero function"})
    if gp.theta == 0:
        r = lp_norm(f, gp.p, tol)
        r.diagnostics["argmax_eps"] = 0.0
        r.diagnostics["note"] = "theta = 0: supremum is the eps -> 0 limit"
        return r
    top = gp.p - 1.0
    grid = np.linspace(EPS_OFFSET, top - EPS_OFFSET, EPS_GRID_POINTS)
    obj = lambda e: _log_grand_term(f, gp, e, tol)
    sup = grid_then_golden(obj, grid, tol=1e-10)
    if math.isinf(sup.value) and sup.value > 0:
        return NormResult.inf(argmax_eps=sup.argmax, note="integral diverges inside (0, p-1)")
    best, arg, where = sup.value, sup.argmax, "interior"
    # eps -> p-1: the exponent tends to 1, where the integral is continuous
    right = _log_grand_term(f, gp, top, tol)
    if right > best:
        best, arg, where = right, top, "limit eps -> p-1"
    # eps -> 0: zero unless |f|^p is not integrable; then estimate the limit
    left, left_diag = _left_limit(f, gp, tol)
    if math.isinf(left) and left > 0:
        return NormResult.inf(argmax_eps=0.0, **left_diag)
    if left > best:
        best, arg, where = left, 0.0, "limit eps -> 0"
    v = math.exp(best)
    return NormResult(v, v * max(tol, 1e-12), False, {"argmax_eps": arg, "grid_argmax_eps": sup.grid_argmax,
                                                     "attained": where, "evaluations": sup.evaluations,
                                                     **left_diag})


def _left_limit(f, gp, tol):
    o = power_integral(f, gp.p, tol=tol)
    if not o.infinite:
        return -math.inf, {"left_limit": 0.0}
    eps = np.array([1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 5e-7, 2.5e-7])
    vals = np.array([_log_grand_term(f, gp, float(e), tol) for e in eps])
    if np.any(np.isposinf(vals)):
        return math.inf, {"left_limit": None}
    F = np.exp(vals)
    diffs = np.diff(F)
    if np.all(diffs >= -1e-12 * np.abs(F[1:])):
        rep = classify_growth(1.0 / eps, np.maximum.accumulate(F))
        if rep.verdict is Verdict.DIVERGENT:
            return math.inf, {"left_limit": None, "left_growth": rep.to_dict()}
    # first-order extrapolation in eps from the two smallest probes
    lim = 2.0 * F[-1] - F[-2]
    lim = max(lim, F[-1])
    return math.log(lim), {"left_limit": lim}


# -- grand norm, rearrangement form --------------------------------------------

def grand_norm_rearr(f: FunctionSpec, gp: GrandParams, tol: float = DEFAULT_TOL, u_max: float | None = None,
                     mass: CumulativeMass | None = None) -> NormResult:
    """``sup_{0<t<1} log(e/t)^{-theta/p} (int_t^1 f_*^p)^{1/p}``.

    ``u_max`` restricts the supremum to ``t >= e^{1-u_max}``.
    """
    fs = decreasing_rearrangement(f)
    if _is_zero(fs):
        return NormResult(0.0, 0.0, False, {"note": "zero function"})
    cm = mass if mass is not None else CumulativeMass(fs, gp.p, tol)
    p, th = gp.p, gp.theta
    top = 1e15 if u_max is None else float(u_max)

    def obj(u):
        return float((cm.log_above(np.array([u]))[0] - th * math.log(u)) / p)

    grid = np.unique(np.concatenate([1.0 + np.geomspace(1e-6, 19.0, 400), np.geomspace(20.0, top, 400)]))
    grid = grid[grid <= top]
    lv = (cm.log_above(grid) - th * np.log(grid)) / p
    i = int(np.argmax(lv))
    lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, grid.size - 1)])
    x, fx = golden_max(obj, lo, hi, tol=1e-12)
    best, arg = (fx, x) if fx > lv[i] else (float(lv[i]), float(grid[i]))
    diag = {"argmax_t": float(t_of_u(arg)), "argmax_u": arg}
    if u_max is None:
        if cm.infinite:
            # the mass diverges near 0; the weighted supremum may still be finite
            levels = np.geomspace(1e3, top, 13)
            vals = np.exp((cm.log_above(levels) - th * np.log(levels)) / p)
            diag["deep_levels"] = levels.tolist()
            diag["deep_values"] = vals.tolist()
            if np.all(np.diff(vals) >= 0):
                rep = classify_growth(levels, vals)
                diag["growth"] = rep.to_dict()
                if rep.verdict is Verdict.DIVERGENT:
                    return NormResult(math.inf, 0.0, True, diag)
            diag["note"] = "mass diverges near 0; supremum taken over the grid"
        elif th == 0 and cm.log_total / p >= best:
            best = cm.log_total / p
            diag = {"argmax_t": 0.0, "argmax_u": math.inf, "note": "supremum is the t -> 0 limit"}
    else:
        diag["u_max"] = top
    v = math.exp(best)
    return NormResult(v, v * max(tol, 1e-12), False, diag)


# -- small norm ----------------------------------------------------------------

def small_norm(f: FunctionSpec, gp: GrandParams, tol: float = DEFAULT_TOL, mass: CumulativeMass | None = None,
               u_max: float = math.inf) -> NormResult:
    """``int_0^1 log(e/t)^{theta/p' - 1} (int_0^t f_*^p)^{1/p} dt/t``.

    In ``u = log(e/t)`` the outer measure ``dt/t`` is ``du``.  ``u_max`` truncates
    the outer integral to ``t >= e^{1-u_max}``.
    """
    fs = decreasing_rearrangement(f)
    if _is_zero(fs):
        return NormResult(0.0, 0.0, False, {"note": "zero function"})
    p = gp.p
    k = gp.theta / gp.p_conj - 1.0
    cm = mass if mass is not None else CumulativeMass(fs, p, tol)
    if cm.infinite:
        return NormResult.inf(note="int_0^t f_*^p diverges")

    def h(u):
        with np.errstate(divide="ignore"):
            return np.exp(k * np.log(u) + cm.log_below(u) / p)

    brk = np.asarray(cm.breaks, dtype=float)
    brk = brk[np.isfinite(brk) & (brk > 1.0) & (brk < u_max)]
    res = integrate_u(h, 1.0, u_max, tol, breakpoints=brk)
    diag = {"subdivisions": res.subdivisions, "converged": res.converged}
    if res.growth is not None:
        diag["growth"] = res.growth.to_dict()
    if not res.converged and res.growth is not None and res.growth.verdict is Verdict.DIVERGENT:
        return NormResult(math.inf, 0.0, True, diag)
    return NormResult(float(res.value), float(res.abs_error_estimate), False, diag)
