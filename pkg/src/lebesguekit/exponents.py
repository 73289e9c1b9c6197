"""Exponent functions: extremes, conjugation, rearrangement and embedding-condition checks.

All condition checks are evaluated in the graded coordinate ``u = log(e/t)``,
where ``log(e/t) = u``, ``loglog(e/t) = log u`` and ``logloglog(e/t) = log log u``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridError, ParameterError, SpecFormatError
from .funcrep import (
    CellTable,
    FunctionSpec,
    LogRatioExponent,
    StepFunction,
    _probe_u,
    _trend,
    constant,
    function_from_spec,
    t_of_u,
    u_of_t,
)
from .rearrange import decreasing_rearrangement, increasing_rearrangement

E2 = math.exp(-2.0)


def conj(x):
    """Conjugate exponent ``x / (x - 1)``."""
    return x / (x - 1.0)


class ConjugateFunction(FunctionSpec):
    """Pointwise conjugate ``p(t) / (p(t) - 1)`` of an exponent function."""

    kind = "conjugate"

    def __init__(self, source: FunctionSpec):
        self.source = source

    def value_u(self, u):
        return conj(self.source.value_u(u))

    def _value_t(self, t):
        return conj(self.source._value_t(t))

    def log_value_u(self, u):
        return np.log(self.value_u(u))

    def log_value_t(self, t):
        return np.log(self._value_t(t))

    def u_breaks(self):
        return self.source.u_breaks()

    def cells(self):
        c = self.source.cells()
        if c is None:
            return None
        v = conj(c.values)
        return CellTable(c.u_lo, c.u_hi, c.log_width, np.log(v), v, c.t_breaks)

    def limit_at_zero(self):
        return conj(self.source.limit_at_zero())

    def log_limit_at_zero(self):
        return math.log(self.limit_at_zero())

    @cached_property
    def monotonicity(self):
        m = self.source.monotonicity
        return {"decreasing": "increasing", "increasing": "decreasing"}.get(m, m)

    def to_dict(self):
        return {"kind": "conjugate", "source": self.source.to_dict()}


class ExponentSpec:
    """An exponent function ``p(.)`` on (0, 1] with ``1 < p_- <= p_+ < inf``."""

    def __init__(self, function, label: str | None = None, _conjugate_of: "ExponentSpec | None" = None):
        if not isinstance(function, FunctionSpec):
            function = constant(float(function))
        self.function = function
        self.label = label
        self._conjugate_of = _conjugate_of
        if not self.p_minus > 1.0:
            raise ParameterError(f"exponent must stay above 1 (p_- = {self.p_minus!r})")
        if not math.isfinite(self.p_plus):
            raise ParameterError("exponent must be bounded (p_+ = inf)")

    # extremes are essential inf/sup; the limit at 0 is included for analytic families
    @cached_property
    def _extremes(self):
        if self._conjugate_of is not None:
            src = self._conjugate_of
            return conj(src.p_plus), conj(src.p_minus)
        c = self.function.cells()
        if c is not None:
            v = c.values
            return float(np.min(v)), float(np.max(v))
        v = self.function.value_u(_probe_u())
        lim = self.function.limit_at_zero()
        return float(min(np.min(v), lim)), float(max(np.max(v), lim))

    @property
    def p_minus(self) -> float:
        return self._extremes[0]

    @property
    def p_plus(self) -> float:
        return self._extremes[1]

    @cached_property
    def p_star(self) -> FunctionSpec:
        """Decreasing rearrangement ``p_*``."""
        return decreasing_rearrangement(self.function)

    @cached_property
    def p_star_up(self) -> FunctionSpec:
        """Increasing rearrangement ``p^*(t) = p_*(1 - t)``."""
        return increasing_rearrangement(self.function)

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    def value_u(self, u):
        return self.function.value_u(u)

    def evaluate(self, t):
        return self.function.evaluate(t)

    __call__ = evaluate

    def to_dict(self):
        if self.label is not None and self.label.startswith("{"):
            return json.loads(self.label)
        return self.function.to_dict()


def as_exponent(p) -> ExponentSpec:
    return p if isinstance(p, ExponentSpec) else ExponentSpec(p)


def conjugate(p) -> ExponentSpec:
    """Conjugate exponent ``q`` with ``1/p + 1/q = 1``; conjugating twice returns the original."""
    p = as_exponent(p)
    if p._conjugate_of is not None:
        return p._conjugate_of
    f = p.function
    if isinstance(f, StepFunction):
        g = StepFunction(f.breaks, conj(f.values))
    elif isinstance(f, ConjugateFunction):
        g = f.source
    else:
        g = ConjugateFunction(f)
    return ExponentSpec(g, _conjugate_of=p)


def rearrange_exponent(p) -> tuple["ExponentSpec", "ExponentSpec"]:
    """``(p_*, p^*)`` as exponent specs (decreasing and increasing rearrangements)."""
    p = as_exponent(p)
    return ExponentSpec(p.p_star), ExponentSpec(p.p_star_up)


def exponent_for_theta(theta: float, base: float = 2.0) -> ExponentSpec:
    """``base + base(base-1) theta loglog(e/t)/log(e/t)`` on ``(0, e^{-2}]``, constant above.

    For ``base = 2`` the coefficient is ``2 theta``.  The factor ``base(base-1)``
    keeps the upper bound ``1/p(0) - 1/p(t) <= theta/p_-' loglog/log`` for any base.
    """
    if not base > 1:
        raise ParameterError(f"base must exceed 1, got {base}")
    if not theta >= 0:
        raise ParameterError(f"theta must be non-negative, got {theta}")
    f = LogRatioExponent(float(base), float(base) * (float(base) - 1.0) * float(theta), 0.0, False, 3.0)
    label = json.dumps({"kind": "example-exponent", "theta": float(theta), "base": float(base)})
    return ExponentSpec(f, label=label)


def exponent_from_spec(spec) -> ExponentSpec:
    """Exponent from a structured spec: any function kind, ``constant`` or ``example-exponent``."""
    if isinstance(spec, (int, float)):
        return ExponentSpec(float(spec))
    if not isinstance(spec, dict):
        raise SpecFormatError("exponent spec must be an object or a number")
    kind = spec.get("kind")
    try:
        if kind == "example-exponent":
            if "theta" not in spec:
                raise SpecFormatError("missing for kind 'example-exponent'", field="theta")
            return exponent_for_theta(float(spec["theta"]), float(spec.get("base", 2.0)))
        if kind == "constant":
            if "value" not in spec:
                raise SpecFormatError("missing for kind 'constant'", field="value")
            return ExponentSpec(float(spec["value"]))
        if kind == "conjugate":
            return conjugate(exponent_from_spec(spec.get("source")))
        return ExponentSpec(function_from_spec(spec))
    except ParameterError as exc:
        raise SpecFormatError(str(exc), field=kind) from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecFormatError):
            raise
        raise SpecFormatError(str(exc), field=kind) from exc


class ConditionKind(str, enum.Enum):
    VAR_SMALL = "var-small"
    GRAND_VAR = "grand-var"
    WEAKER_VAR_SMALL = "weaker-var-small"
    NO_VAR_SMALL = "no-var-small"
    REARRANGED = "rearranged"
    NO_REARRANGE = "no-rearrange"
    GEN_ORLICZ_SIGMA = "gen-orlicz-sigma"
    GEN_ORLICZ_P = "gen-orlicz-p"


_REQUIRED = {
    ConditionKind.VAR_SMALL: ("theta", "eps"),
    ConditionKind.GRAND_VAR: ("theta", "eps"),
    ConditionKind.WEAKER_VAR_SMALL: ("theta", "eps"),
    ConditionKind.NO_VAR_SMALL: ("theta",),
    ConditionKind.REARRANGED: ("theta", "A"),
    ConditionKind.NO_REARRANGE: ("theta", "eps"),
    ConditionKind.GEN_ORLICZ_SIGMA: ("B", "sigma"),
    ConditionKind.GEN_ORLICZ_P: ("theta", "A", "sigma"),
}

# direction of the inequality: True for "LHS >= RHS"
_GEQ = {
    ConditionKind.VAR_SMALL: True,
    ConditionKind.GRAND_VAR: True,
    ConditionKind.WEAKER_VAR_SMALL: True,
    ConditionKind.NO_VAR_SMALL: False,
    ConditionKind.REARRANGED: False,
    ConditionKind.NO_REARRANGE: True,
    ConditionKind.GEN_ORLICZ_SIGMA: False,
    ConditionKind.GEN_ORLICZ_P: False,
}

MARGIN_TOL = 1e-12
DEFAULT_GRID_POINTS = 2048
DEFAULT_T_MIN = 1e-12
DEEP_POINTS = 64
DEEP_U_MAX = 1e15


@dataclass(frozen=True)
class ConditionParams:
    theta: float | None = None
    eps: float | None = None
    A: float | None = None
    B: float | None = None
    sigma: FunctionSpec | float | None = None
    t0: float = E2

    def as_dict(self):
        d = {}
        for k in ("theta", "eps", "A", "B", "t0"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        if self.sigma is not None:
            d["sigma"] = self.sigma.to_dict() if isinstance(self.sigma, FunctionSpec) else self.sigma
        return d


@dataclass(frozen=True)
class ConditionReport:
    kind: ConditionKind
    holds: bool
    worst_margin: float
    witness_t: float
    witness_u: float
    grid_size: int
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind.value,
            "holds": self.holds,
            "worst_margin": self.worst_margin,
            "witness_t": self.witness_t,
            "witness_u": self.witness_u,
            "grid_size": self.grid_size,
            "params": self.params,
        }


def default_u_grid(t0: float = E2, points: int = DEFAULT_GRID_POINTS, t_min: float = DEFAULT_T_MIN,
                   deep_points: int = DEEP_POINTS) -> np.ndarray:
    """Geometric ``t``-grid from ``t0`` down to ``t_min`` (uniform in ``u``) plus deep points up to ``u = 1e15``."""
    u0, u1 = 1.0 - math.log(t0), 1.0 - math.log(t_min)
    main = np.linspace(u0, u1, points)
    deep = np.geomspace(u1, DEEP_U_MAX, deep_points + 1)[1:] if deep_points else np.empty(0)
    return np.concatenate([main, deep])


def _sigma_values(sigma, u):
    if isinstance(sigma, FunctionSpec):
        return np.asarray(sigma.value_u(u), dtype=float)
    return np.full(np.shape(u), float(sigma))


def sigma_at_zero(sigma) -> float:
    if isinstance(sigma, FunctionSpec):
        return float(np.asarray(sigma.value_u(np.array([1e300])))[0])
    return float(sigma)


def condition_margins(p, kind: ConditionKind, params: ConditionParams, u: np.ndarray) -> np.ndarray:
    """Margins (non-negative where the inequality holds) at graded points ``u``."""
    p = as_exponent(p)
    kind = ConditionKind(kind)
    for name in _REQUIRED[kind]:
        if getattr(params, name) is None:
            raise ParameterError(f"condition {kind.value} needs parameter '{name}'")
    if params.theta is not None and not params.theta >= 0:
        raise ParameterError("theta must be non-negative")
    if params.eps is not None and not params.eps >= 0:
        raise ParameterError("eps must be non-negative")
    u = np.asarray(u, dtype=float)
    L = u
    LL = np.log(u)
    ratio = LL / L
    th = params.theta
    if kind in (ConditionKind.VAR_SMALL, ConditionKind.WEAKER_VAR_SMALL, ConditionKind.NO_VAR_SMALL):
        p_up = p.p_star_up.value_u(u)
        lhs = 1.0 / p.p_minus - 1.0 / p_up
        pmc = conj(p.p_minus)
        if kind is ConditionKind.VAR_SMALL:
            rhs = (th / pmc + params.eps) * ratio
        elif kind is ConditionKind.NO_VAR_SMALL:
            rhs = th / pmc * ratio
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                LLL = np.log(LL)
            if np.any(~np.isfinite(LLL)) or np.any(LLL < 0):
                raise GridError("triple logarithm undefined or negative on the grid; use t <= e^-2")
            rhs = th / pmc * ratio + (1.0 + params.eps) * LLL / L
    elif kind is ConditionKind.GEN_ORLICZ_SIGMA:
        s0 = sigma_at_zero(params.sigma)
        lhs = s0 - _sigma_values(params.sigma, u)
        with np.errstate(divide="ignore"):
            rhs = np.where(LL > 0, params.B / np.where(LL > 0, LL, 1.0), np.inf)
    else:
        p_dn = p.p_star.value_u(u)
        lhs = 1.0 / p_dn - 1.0 / p.p_plus
        pp = p.p_plus
        if kind is ConditionKind.GRAND_VAR:
            rhs = (th / pp + params.eps) * ratio
        elif kind is ConditionKind.NO_REARRANGE:
            rhs = (th + params.eps) / pp * ratio
        elif kind is ConditionKind.REARRANGED:
            rhs = params.A / L + (th - 1.0) / pp * ratio
        else:
            s0 = sigma_at_zero(params.sigma)
            rhs = params.A / L + (th - 1.0 + s0) / pp * ratio
    return lhs - rhs if _GEQ[kind] else rhs - lhs


def check_condition(p, kind, params: ConditionParams | None = None, grid=None, **kw) -> ConditionReport:
    """Check an embedding condition for ``p`` on a geometric ``t``-grid in ``(0, t0]``.

    ``grid`` is an array of ``t`` values; by default 2048 points from ``t0`` to
    1e-12 plus deep points reaching ``log(e/t) = 1e15`` (evaluated in ``u``).
    """
    kind = ConditionKind(kind)
    if params is None:
        params = ConditionParams(**kw)
    elif kw:
        raise ParameterError("pass either params or keyword parameters")
    if not 0 < params.t0 <= 1:
        raise ParameterError("t0 must lie in (0, 1]")
    if grid is None:
        u = default_u_grid(params.t0)
    else:
        t = np.asarray(grid, dtype=float)
        if t.size == 0 or np.any(~(t > 0)) or np.any(t > params.t0 * (1 + 1e-12)):
            raise GridError("grid must lie in (0, t0]")
        u = u_of_t(t)
    if kind is ConditionKind.WEAKER_VAR_SMALL and np.any(u < 3.0 - 1e-12):
        raise GridError("grid points above e^-2 make the triple logarithm undefined or negative")
    m = condition_margins(p, kind, params, u)
    m = np.where(np.isnan(m), -np.inf, m)
    i = int(np.argmin(m))
    worst = float(m[i])
    return ConditionReport(kind, bool(worst >= -MARGIN_TOL), worst, float(t_of_u(u[i])), float(u[i]), int(u.size),
                           params.as_dict())


def log_term_exponent(p, sigma, u) -> np.ndarray:
    """``sigma(t)/p_*(0) - sigma(t)/p_*(t)``: exponent of the last log factor in the pointwise chain."""
    p = as_exponent(p)
    s = _sigma_values(sigma, u)
    return s / p.p_plus - s / p.p_star.value_u(u)
