"""Representations of measurable functions on [0, 1].

Every representation can be evaluated both in ``t`` and in the graded
coordinate ``u = log(e/t)`` (``u = 1`` at ``t = 1``, ``u -> inf`` as ``t -> 0``).
Values are handled in log-space internally so that step series whose cells sit
far below double-precision range (``t = e^{-10^6}``) stay usable.

Piecewise-constant carriers expose their cells through :meth:`FunctionSpec.cells`;
integrals of expressions built only from such carriers are then computed in
closed form cell by cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError, SpecFormatError

E = math.e
LOG1M_INV_E = math.log1p(-1.0 / E)  # log(1 - 1/e): log-width of a geometric cell, minus j


def u_of_t(t):
    """Graded coordinate ``u = log(e/t) = 1 - log t``."""
    with np.errstate(divide="ignore"):
        return 1.0 - np.log(t)


def t_of_u(u):
    return np.exp(1.0 - np.asarray(u, dtype=float))


def log_width_u(u_lo, u_hi):
    """``log(t(u_lo) - t(u_hi))`` for ``u_lo < u_hi`` without forming ``t``."""
    u_lo = np.asarray(u_lo, dtype=float)
    u_hi = np.asarray(u_hi, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 - u_lo + np.log(-np.expm1(u_lo - u_hi))


def reflect_u(u):
    """``u`` coordinate of ``1 - t`` given the ``u`` coordinate of ``t``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 - np.log(-np.expm1(1.0 - u))


@dataclass(frozen=True, eq=False)
class CellTable:
    """Cells ``[u_lo, u_hi)`` in ascending ``u`` (descending ``t``) with constant values.

    ``log_width`` is the log of the Lebesgue measure of each cell in ``t`` and
    ``log_values`` the log of ``|value|``.  ``raw_values`` keeps the exact (possibly
    signed) values when they are representable.  When the cells came from
    ``t``-breakpoints, ``t_breaks`` holds them (ascending, starting at 0) so that
    refinements can be done exactly in ``t``.
    """

    u_lo: np.ndarray
    u_hi: np.ndarray
    log_width: np.ndarray
    log_values: np.ndarray
    raw_values: np.ndarray | None = None
    t_breaks: np.ndarray | None = None

    @property
    def values(self):
        if self.raw_values is not None:
            return self.raw_values
        with np.errstate(over="ignore"):
            return np.exp(self.log_values)

    @property
    def widths(self):
        return np.exp(self.log_width)

    def __len__(self):
        return self.log_values.size


def _readonly(x):
    a = np.array(x, dtype=float)
    a.setflags(write=False)
    return a


class FunctionSpec:
    """Base class: a function on (0, 1] given in the graded coordinate."""

    kind = "abstract"

    # -- evaluation -----------------------------------------------------------
    def log_value_u(self, u):
        """``log|f|`` at graded coordinate(s) ``u``."""
        raise NotImplementedError

    def value_u(self, u):
        return np.exp(self.log_value_u(u))

    def _value_t(self, t):
        return self.value_u(u_of_t(t))

    def log_value_t(self, t):
        """``log|f|`` at ``t`` (no domain check)."""
        return self.log_value_u(u_of_t(t))

    def limit_at_zero(self) -> float:
        """``lim_{t -> 0+} |f(t)|``."""
        lv = self.log_limit_at_zero()
        return math.exp(lv) if lv < 709.78 else math.inf

    def evaluate(self, t):
        """Pointwise value on (0, 1]; arrays are evaluated elementwise."""
        arr = np.asarray(t, dtype=float)
        if np.any(~(arr > 0.0)) or np.any(arr > 1.0):
            bad = arr[(~(arr > 0.0)) | (arr > 1.0)].flat[0]
            raise DomainError(f"t={bad!r} outside (0, 1]")
        out = self._value_t(arr)
        return float(out) if np.ndim(t) == 0 else out

    __call__ = evaluate

    # -- structure ------------------------------------------------------------
    def cells(self) -> CellTable | None:
        """Cell table for piecewise-constant carriers, ``None`` otherwise."""
        return None

    @property
    def is_step(self) -> bool:
        return self.cells() is not None

    def u_breaks(self) -> np.ndarray:
        """Finite ``u`` positions where the representation changes formula."""
        c = self.cells()
        if c is None:
            return np.empty(0)
        return np.unique(np.concatenate([c.u_lo, c.u_hi[np.isfinite(c.u_hi)]]))

    def log_limit_at_zero(self) -> float:
        """``lim_{t -> 0+} log|f(t)|`` (may be +-inf)."""
        return float(self.log_value_u(np.array([1e300]))[0])

    @cached_property
    def monotonicity(self) -> str:
        """'constant', 'decreasing' or 'increasing' (non-strict, in t), else 'none'."""
        c = self.cells()
        if c is not None:
            # ascending u = descending t
            v = c.raw_values if c.raw_values is not None else c.log_values
        else:
            v = self.log_value_u(_probe_u())
        return _trend(v)

    def sup_value(self) -> float:
        c = self.cells()
        if c is not None:
            return float(np.exp(np.max(c.log_values)))
        v = self.log_value_u(_probe_u())
        return float(np.exp(max(np.max(v), self.log_limit_at_zero())))

    def inf_value(self) -> float:
        c = self.cells()
        if c is not None:
            return float(np.exp(np.min(c.log_values)))
        v = self.log_value_u(_probe_u())
        return float(np.exp(min(np.min(v), self.log_limit_at_zero())))

    def scaled(self, c: float) -> "FunctionSpec":
        return Scaled(self, float(c))

    def to_dict(self) -> dict:
        raise NotImplementedError


def _trend(v):
    """Trend of a sequence listed in ascending ``u``, reported in ``t``."""
    v = np.asarray(v, dtype=float)
    fin = v[np.isfinite(v)]
    with np.errstate(invalid="ignore"):
        d = np.diff(v)
    d = np.where(np.isnan(d), 0.0, d)
    tol = 1e-13 * max(1.0, float(np.max(np.abs(fin), initial=0.0)))
    if np.all(np.abs(d) <= tol):
        return "constant"
    if np.all(d >= -tol):
        return "decreasing"
    if np.all(d <= tol):
        return "increasing"
    return "none"


def _probe_u():
    return np.concatenate([np.linspace(1.0, 50.0, 2001), np.geomspace(50.0, 1e15, 2000)[1:]])


@dataclass(frozen=True, eq=False)
class StepFunction(FunctionSpec):
    """``values[i]`` on the cell ``(breaks[i], breaks[i+1]]``; breaks run from 0 to 1."""

    breaks: np.ndarray
    values: np.ndarray
    signed: bool = False

    kind = "step"

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or v.ndim != 1 or b.size != v.size + 1 or v.size == 0:
            raise ParameterError("need len(breaks) == len(values) + 1 >= 2")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ParameterError("breaks must start at 0 and end at 1")
        if np.any(np.diff(b) <= 0):
            raise ParameterError("breaks must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ParameterError("values must be finite")
        if not self.signed and np.any(v < 0):
            raise ParameterError("values must be non-negative")
        object.__setattr__(self, "breaks", _readonly(b))
        object.__setattr__(self, "values", _readonly(v))

    def _value_t(self, t):
        idx = np.searchsorted(self.breaks, t, side="left") - 1
        idx = np.clip(idx, 0, self.values.size - 1)
        return self.values[idx]

    def log_value_u(self, u):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self._value_t(t_of_u(u))))

    def log_value_t(self, t):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self._value_t(t)))

    def value_u(self, u):
        return self._value_t(t_of_u(u))

    def limit_at_zero(self):
        return float(abs(self.values[0]))

    @cached_property
    def _cells(self):
        b = self.breaks
        # ascending u = cells in reverse t order
        u_hi = u_of_t(b[:-1])[::-1]
        u_lo = u_of_t(b[1:])[::-1]
        with np.errstate(divide="ignore"):
            lw = np.log(np.diff(b))[::-1]
        v = self.values[::-1].copy()
        with np.errstate(divide="ignore"):
            lv = np.log(np.abs(v))
        return CellTable(u_lo, u_hi, lw, lv, raw_values=v, t_breaks=b)

    def cells(self):
        return self._cells

    @property
    def widths(self):
        return np.diff(self.breaks)

    def log_limit_at_zero(self):
        with np.errstate(divide="ignore"):
            return float(np.log(abs(self.values[0])))

    def scaled(self, c):
        return StepFunction(self.breaks, self.values * c, self.signed)

    def to_dict(self):
        return {"kind": "step", "breaks": self.breaks.tolist(), "values": self.values.tolist()}


def constant(c: float) -> StepFunction:
    return StepFunction(np.array([0.0, 1.0]), np.array([float(c)]), signed=c < 0)


def indicator(a: float, b: float = 0.0) -> StepFunction:
    """Indicator of ``(b, a]`` (``(0, a]`` by default) as a step function."""
    lo, hi = min(a, b), max(a, b)
    br = [0.0] + [x for x in (lo, hi) if 0.0 < x < 1.0] + [1.0]
    br = sorted(set(br))
    vals = [1.0 if (lo <= x0 and x1 <= hi) else 0.0 for x0, x1 in zip(br[:-1], br[1:])]
    return StepFunction(np.array(br), np.array(vals))


@dataclass(frozen=True, eq=False)
class SampledFunction(FunctionSpec):
    """Samples on a grid ``t_0 > t_1 > ... > t_{n-1} > 0``, held constant on cells.

    ``values[k]`` is used on ``(t_{k+1}, t_k]``, the last value on ``(0, t_{n-1}]``
    and ``values[0]`` on ``(t_0, 1]`` when ``t_0 < 1``.
    """

    grid: np.ndarray
    values: np.ndarray

    kind = "sampled"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.size == 0 or g.size != v.size:
            raise ParameterError("grid and values must be equal-length, non-empty")
        if np.any(np.diff(g) >= 0) or g[-1] <= 0 or g[0] > 1:
            raise ParameterError("grid must be strictly decreasing in (0, 1]")
        if not np.all(np.isfinite(v)):
            raise ParameterError("values must be finite")
        object.__setattr__(self, "grid", _readonly(g))
        object.__setattr__(self, "values", _readonly(v))

    @cached_property
    def step(self) -> StepFunction:
        g, v = self.grid, self.values
        br = np.concatenate([[0.0], g[::-1]])
        vals = v[::-1].copy()
        if g[0] < 1.0:
            br = np.concatenate([br, [1.0]])
            vals = np.concatenate([vals, [v[0]]])
        return StepFunction(br, vals, signed=bool(np.any(v < 0)))

    def _value_t(self, t):
        return self.step._value_t(t)

    def log_value_u(self, u):
        return self.step.log_value_u(u)

    def log_value_t(self, t):
        return self.step.log_value_t(t)

    def value_u(self, u):
        return self.step.value_u(u)

    def cells(self):
        return self.step.cells()

    def log_limit_at_zero(self):
        return self.step.log_limit_at_zero()

    def scaled(self, c):
        return SampledFunction(self.grid, self.values * c)

    def to_dict(self):
        return {"kind": "sampled", "grid": self.grid.tolist(), "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class GeometricSteps(FunctionSpec):
    """Step series on geometric cells, stored by log-values.

    * head: a ``t``-step function on ``(e^{-j_start}, 1]`` (``head_breaks`` ascending
      from ``e^{-j_start}`` to 1);
    * cell ``j`` for ``j_start <= j <= J``: value ``exp(log_values[j - j_start])`` on
      ``(e^{-j-1}, e^{-j}]``, i.e. ``u`` in ``[j+1, j+2)``;
    * truncation cell ``(0, e^{-J-1}]``: value ``exp(log_tail)``.
    """

    head_breaks: np.ndarray
    head_values: np.ndarray
    j_start: int
    log_values: np.ndarray
    log_tail: float
    origin: dict = field(default_factory=dict)

    kind = "geometric-steps"

    def __post_init__(self):
        hb = np.asarray(self.head_breaks, dtype=float)
        hv = np.asarray(self.head_values, dtype=float)
        lv = np.asarray(self.log_values, dtype=float)
        if self.j_start < 0 or lv.size == 0:
            raise ParameterError("need j_start >= 0 and at least one geometric cell")
        if self.j_start == 0:
            if hv.size:
                raise ParameterError("j_start = 0 leaves no room for a head")
        else:
            if hb.size != hv.size + 1 or hv.size == 0:
                raise ParameterError("head needs len(breaks) == len(values) + 1")
            if not math.isclose(hb[0], math.exp(-self.j_start), rel_tol=1e-15) or hb[-1] != 1.0:
                raise ParameterError("head must cover (e^{-j_start}, 1]")
            if np.any(np.diff(hb) <= 0) or np.any(hv < 0) or not np.all(np.isfinite(hv)):
                raise ParameterError("malformed head")
        if np.any(np.isnan(lv)) or np.any(lv == np.inf) or math.isnan(self.log_tail):
            raise ParameterError("log-values must be finite or -inf")
        object.__setattr__(self, "head_breaks", _readonly(hb))
        object.__setattr__(self, "head_values", _readonly(hv))
        object.__setattr__(self, "log_values", _readonly(lv))
        object.__setattr__(self, "log_tail", float(self.log_tail))

    @property
    def J(self) -> int:
        return self.j_start + self.log_values.size - 1

    @property
    def head_u_end(self) -> float:
        return float(self.j_start + 1)

    def log_value_u(self, u):
        u = np.asarray(u, dtype=float)
        out = np.full(u.shape, self.log_tail)
        deep = (u >= self.j_start + 1) & (u < self.J + 2)
        if deep.any():
            j = np.floor(u[deep]).astype(np.int64) - 1
            out[deep] = self.log_values[j - self.j_start]
        head = u < self.j_start + 1
        if head.any():
            t = t_of_u(u[head])
            idx = np.clip(np.searchsorted(self.head_breaks, t, side="left") - 1, 0, self.head_values.size - 1)
            with np.errstate(divide="ignore"):
                out[head] = np.log(self.head_values[idx])
        return out

    @cached_property
    def _cells(self):
        hb = self.head_breaks
        parts_lo, parts_hi, parts_w = [], [], []
        if self.head_values.size:
            parts_lo.append(u_of_t(hb[1:])[::-1])
            parts_hi.append(u_of_t(hb[:-1])[::-1])
            # pin the head/geometric junction exactly
            parts_hi[-1][-1] = float(self.j_start + 1)
            with np.errstate(divide="ignore"):
                parts_w.append(np.log(np.diff(hb))[::-1])
        j = np.arange(self.j_start, self.J + 1, dtype=float)
        parts_lo.append(j + 1.0)
        parts_hi.append(j + 2.0)
        parts_w.append(-j + LOG1M_INV_E)
        parts_lo.append(np.array([self.J + 2.0]))
        parts_hi.append(np.array([np.inf]))
        parts_w.append(np.array([-(self.J + 1.0)]))
        lo, hi, w = (np.concatenate(p) for p in (parts_lo, parts_hi, parts_w))
        return CellTable(lo, hi, w, self.cell_log_values)

    def cells(self):
        return self._cells

    @cached_property
    def cell_log_values(self) -> np.ndarray:
        """Log-values for every cell of :meth:`cells` (exact, no exp/log round trip)."""
        with np.errstate(divide="ignore"):
            head = np.log(self.head_values[::-1])
        return np.concatenate([head, self.log_values, [self.log_tail]])

    def log_limit_at_zero(self):
        return self.log_tail

    @cached_property
    def monotonicity(self):
        return _trend(self.cell_log_values)

    def scaled(self, c):
        lc = math.log(abs(c)) if c != 0 else -math.inf
        return GeometricSteps(self.head_breaks, self.head_values * abs(c), self.j_start,
                              self.log_values + lc, self.log_tail + lc, dict(self.origin))

    def restrict_below(self, j: int) -> "GeometricSteps":
        """Same cells with everything above ``e^{-j}`` replaced by the value of cell ``j``."""
        if not self.j_start <= j <= self.J:
            raise ParameterError("j out of range")
        lv = self.log_values[j - self.j_start:]
        hb = np.array([math.exp(-j), 1.0]) if j > 0 else np.empty(0)
        hv = np.array([math.exp(lv[0])]) if j > 0 else np.empty(0)
        return GeometricSteps(hb, hv, j, lv, self.log_tail, dict(self.origin))

    def to_dict(self):
        if self.origin:
            return dict(self.origin)
        return {
            "kind": "geometric-steps",
            "head_breaks": self.head_breaks.tolist(),
            "head_values": self.head_values.tolist(),
            "j_start": self.j_start,
            "log_values": self.log_values.tolist(),
            "log_tail": self.log_tail,
        }


@dataclass(frozen=True, eq=False)
class PowerLogLog(FunctionSpec):
    """``scale * t^{-a} * log(e/t)^b * L2(t)^c`` on ``(0, valid_to]``, constant above.

    ``L2(t) = log(log_shift_base(t))`` with ``log(e/t) + loglog_shift`` inside:
    the default shift ``e - 1`` gives ``loglog(e^e/t) >= 1`` on (0, 1]; shift 0 gives
    the plain ``loglog(e/t)``, which is only positive for ``t < 1``.
    """

    a: float
    b: float = 0.0
    c: float = 0.0
    scale: float = 1.0
    valid_to: float = 1.0
    loglog_shift: float = E - 1.0

    kind = "powerloglog"

    def __post_init__(self):
        for name in ("a", "b", "c", "scale", "valid_to", "loglog_shift"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if self.scale <= 0:
            raise ParameterError("scale must be positive")
        if not 0 < self.valid_to <= 1:
            raise ParameterError("valid_to must lie in (0, 1]")
        if self.c != 0 and math.log(self.u0 + self.loglog_shift) <= 0:
            raise ParameterError("iterated log is non-positive at valid_to")

    @property
    def u0(self) -> float:
        return 1.0 - math.log(self.valid_to)

    def _log_formula(self, u):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = math.log(self.scale) + self.a * (u - 1.0)
            if self.b != 0:
                out = out + self.b * np.log(u)
            if self.c != 0:
                out = out + self.c * np.log(np.log(self.loglog_shift + u))
        return out

    def log_value_u(self, u):
        u = np.asarray(u, dtype=float)
        return self._log_formula(np.maximum(u, self.u0))

    def u_breaks(self):
        return np.array([self.u0]) if self.u0 > 1.0 else np.empty(0)

    def log_limit_at_zero(self):
        for coef in (self.a, self.b, self.c):
            if coef > 0:
                return math.inf
            if coef < 0:
                return -math.inf
        return math.log(self.scale)

    @property
    def tail_value(self) -> float:
        return float(np.exp(self._log_formula(np.array(self.u0))))

    def scaled(self, c):
        return PowerLogLog(self.a, self.b, self.c, self.scale * c, self.valid_to, self.loglog_shift)

    def to_dict(self):
        d = {"kind": "powerloglog", "a": self.a, "b": self.b, "c": self.c, "scale": self.scale, "t0": self.valid_to}
        if self.loglog_shift != E - 1.0:
            d["loglog_shift"] = self.loglog_shift
        return d


@dataclass(frozen=True, eq=False)
class LogRatioExponent(FunctionSpec):
    """``base + (inv_coef + ll_coef * log u) / u`` for ``u >= u0``, constant below.

    With ``reciprocal=True`` the same expression gives ``1/p`` instead of ``p``.
    In ``t`` the ratio ``log u / u`` is ``loglog(e/t) / log(e/t)``.
    """

    base: float
    ll_coef: float
    inv_coef: float = 0.0
    reciprocal: bool = False
    u0: float = 3.0

    kind = "log-ratio"

    def __post_init__(self):
        if not (self.base > 0 and math.isfinite(self.base)):
            raise ParameterError("base must be positive and finite")
        if not self.u0 >= 1.0:
            raise ParameterError("u0 must be >= 1")
        v = self._raw(_probe_u())
        if np.any(~np.isfinite(v)) or np.any(v <= 0):
            raise ParameterError("expression leaves (0, inf) on the domain")

    def _raw(self, u):
        u = np.maximum(np.asarray(u, dtype=float), self.u0)
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = (self.inv_coef + self.ll_coef * np.log(u)) / u
        r = self.base_value + np.where(np.isinf(u), 0.0, ratio)
        return 1.0 / r if self.reciprocal else r

    @property
    def base_value(self):
        return 1.0 / self.base if self.reciprocal else self.base

    def value_u(self, u):
        return self._raw(u)

    def log_value_u(self, u):
        return np.log(self._raw(u))

    def u_breaks(self):
        return np.array([self.u0]) if self.u0 > 1.0 else np.empty(0)

    def log_limit_at_zero(self):
        return math.log(self.base)

    def limit_at_zero(self):
        return self.base

    def to_dict(self):
        return {"kind": "log-ratio", "base": self.base, "ll_coef": self.ll_coef, "inv_coef": self.inv_coef,
                "reciprocal": self.reciprocal, "u0": self.u0}


@dataclass(frozen=True, eq=False)
class Reflected(FunctionSpec):
    """``t -> source(1 - t)``."""

    source: FunctionSpec

    kind = "reflected"

    def log_value_u(self, u):
        return self.source.log_value_u(reflect_u(u))

    def value_u(self, u):
        return self.source.value_u(reflect_u(u))

    def _value_t(self, t):
        s = 1.0 - np.asarray(t, dtype=float)
        # 1 - t underflows nowhere, but 1 - 1 = 0 hits the source's singular end.
        return self.source.value_u(u_of_t(s))

    def u_breaks(self):
        b = self.source.u_breaks()
        return np.sort(reflect_u(b[b > 1.0])) if b.size else b

    def log_limit_at_zero(self):
        return float(self.source.log_value_u(np.array([1.0]))[0])

    @cached_property
    def monotonicity(self):
        m = self.source.monotonicity
        return {"decreasing": "increasing", "increasing": "decreasing"}.get(m, m)

    def sup_value(self):
        return self.source.sup_value()

    def inf_value(self):
        return self.source.inf_value()

    def to_dict(self):
        return {"kind": "reflected", "source": self.source.to_dict()}


@dataclass(frozen=True, eq=False)
class Scaled(FunctionSpec):
    source: FunctionSpec
    factor: float

    kind = "scaled"

    def log_value_u(self, u):
        with np.errstate(divide="ignore"):
            return self.source.log_value_u(u) + math.log(abs(self.factor))

    def value_u(self, u):
        return self.source.value_u(u) * self.factor

    def _value_t(self, t):
        return self.source._value_t(t) * self.factor

    def cells(self):
        c = self.source.cells()
        if c is None:
            return None
        with np.errstate(divide="ignore"):
            lf = math.log(abs(self.factor)) if self.factor != 0 else -math.inf
        raw = c.raw_values * self.factor if c.raw_values is not None else None
        return CellTable(c.u_lo, c.u_hi, c.log_width, c.log_values + lf, raw, c.t_breaks)

    def u_breaks(self):
        return self.source.u_breaks()

    def log_limit_at_zero(self):
        with np.errstate(divide="ignore"):
            return self.source.log_limit_at_zero() + math.log(abs(self.factor))

    @cached_property
    def monotonicity(self):
        return self.source.monotonicity

    def to_dict(self):
        return {"kind": "scaled", "factor": self.factor, "source": self.source.to_dict()}


@dataclass(frozen=True, eq=False)
class ExponentProfile(FunctionSpec):
    """``scale * (e/t)^{1/p(t)} * log(e/t)^{-gamma(t)/p(t)}``, held constant for ``u < u0``.

    ``p`` and ``gamma`` are functions (``gamma`` may be a constant).  This is the
    profile that saturates pointwise bounds of the form ``u_*(t) <= C (e/t)^{1/p(t)} ...``.
    :func:`monotone_profile` picks ``u0`` so the profile is non-increasing in ``t``.
    """

    exponent: FunctionSpec
    gamma: FunctionSpec | float = 0.0
    scale: float = 1.0
    u0: float = 1.0

    kind = "exponent-profile"

    def _gamma(self, u):
        if isinstance(self.gamma, FunctionSpec):
            return self.gamma.value_u(u)
        return float(self.gamma)

    def _log_formula(self, u):
        u = np.asarray(u, dtype=float)
        p = self.exponent.value_u(u)
        return math.log(self.scale) + (u - self._gamma(u) * np.log(u)) / p

    def log_value_u(self, u):
        return self._log_formula(np.maximum(np.asarray(u, dtype=float), self.u0))

    def u_breaks(self):
        b = [np.asarray(self.exponent.u_breaks(), dtype=float), np.array([self.u0])]
        if isinstance(self.gamma, FunctionSpec):
            b.append(np.asarray(self.gamma.u_breaks(), dtype=float))
        b = np.unique(np.concatenate(b))
        return b[b > 1.0]

    def log_limit_at_zero(self):
        return math.inf

    def to_dict(self):
        g = self.gamma.to_dict() if isinstance(self.gamma, FunctionSpec) else self.gamma
        return {"kind": "exponent-profile", "exponent": self.exponent.to_dict(), "gamma": g, "scale": self.scale,
                "u0": self.u0}


def monotone_profile(exponent: FunctionSpec, gamma=0.0, scale: float = 1.0) -> ExponentProfile:
    """:class:`ExponentProfile` with the smallest probe ``u0`` past which it is non-decreasing in ``u``."""
    prof = ExponentProfile(exponent, gamma, scale, 1.0)
    u = np.concatenate([np.linspace(1.0, 50.0, 4901), np.geomspace(50.0, 1e12, 2000)[1:]])
    lv = prof._log_formula(u)
    bad = np.nonzero(np.diff(lv) < 0)[0]
    if bad.size == 0:
        return prof
    return ExponentProfile(exponent, gamma, scale, float(u[bad[-1] + 1]))


# -- example builders ---------------------------------------------------------

def series_log_coefficients(b: float, theta: float, j) -> np.ndarray:
    """``log a_j`` for ``a_j = [e^j / (j log(j)^b)]^{(1/2)(j+1)/(j+1+theta log(j+2))}``."""
    j = np.asarray(j, dtype=float)
    inner = j - np.log(j) - b * np.log(np.log(j))
    return 0.5 * (j + 1.0) / (j + 1.0 + theta * np.log(j + 2.0)) * inner


@dataclass(frozen=True)
class SeriesCoefficients:
    b: float
    theta: float
    J: int

    def __post_init__(self):
        _check_series_params(self.b, self.theta, self.J, j_min=2)

    @property
    def log_a(self) -> np.ndarray:
        return series_log_coefficients(self.b, self.theta, np.arange(2, self.J + 1))

    @property
    def a(self) -> np.ndarray:
        return np.exp(self.log_a)


def _check_series_params(b, theta, J, j_min):
    if not 1.0 < b < 2.0:
        raise ParameterError(f"b must lie in (1, 2), got {b}")
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if int(J) != J or J < j_min:
        raise ParameterError(f"J must be an integer >= {j_min}, got {J}")


def build_example_no_var_small(b: float, theta: float, J: int) -> GeometricSteps:
    """Step series with value ``a_j`` on ``(e^{-j-1}, e^{-j}]`` for ``2 <= j <= J``.

    The constant extension on ``(e^{-2}, 1]`` uses ``a_2`` and the truncation cell
    ``(0, e^{-J-1}]`` carries ``a_J``.
    """
    _check_series_params(b, theta, J, j_min=3)
    J = int(J)
    lv = series_log_coefficients(b, theta, np.arange(2, J + 1))
    origin = {"kind": "example-no-var-small", "b": float(b), "theta": float(theta), "J": J}
    return GeometricSteps(np.array([math.exp(-2.0), 1.0]), np.array([math.exp(lv[0])]), 2, lv, float(lv[-1]), origin)


def build_example_no_rearrange(p0: float, theta: float, t0: float = math.exp(-2.0)) -> PowerLogLog:
    """``[loglog(e/t) / (t log(e/t)^{1-theta})]^{1/p0}`` on ``(0, t0]``, constant above.

    If the formula is not non-increasing on ``(0, t0]``, ``t0`` is shrunk
    geometrically until it is.
    """
    if not p0 > 1:
        raise ParameterError(f"p0 must exceed 1, got {p0}")
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if not 0 < t0 < 1:
        raise ParameterError(f"t0 must lie in (0, 1), got {t0}")
    f = PowerLogLog(1.0 / p0, (theta - 1.0) / p0, 1.0 / p0, 1.0, t0, 0.0)
    for _ in range(200):
        u = np.concatenate([np.linspace(f.u0, f.u0 + 50, 1000), np.geomspace(f.u0 + 50, 1e12, 1000)])
        if np.all(np.diff(f._log_formula(u)) >= 0):
            return f
        f = PowerLogLog(f.a, f.b, f.c, 1.0, f.valid_to * 0.5, 0.0)
    raise ParameterError("could not find a t0 making the profile monotone")


# -- structured specs ---------------------------------------------------------

def _need(d, key, kind):
    if key not in d:
        raise SpecFormatError(f"missing for kind '{kind}'", field=key)
    return d[key]


def _num(d, key, kind, default=None):
    v = d.get(key, default) if default is not None else _need(d, key, kind)
    try:
        return float(v)
    except (TypeError, ValueError):
        raise SpecFormatError(f"expected a number, got {v!r}", field=key) from None


def _numlist(d, key, kind):
    v = _need(d, key, kind)
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise SpecFormatError("expected a list of numbers", field=key) from None
    if arr.ndim != 1:
        raise SpecFormatError("expected a flat list", field=key)
    return arr


def function_from_spec(spec: dict) -> FunctionSpec:
    """Build a function from its structured (JSON-like) description."""
    if not isinstance(spec, dict):
        raise SpecFormatError("function spec must be an object")
    kind = spec.get("kind")
    try:
        if kind == "step":
            return StepFunction(_numlist(spec, "breaks", kind), _numlist(spec, "values", kind))
        if kind == "sampled":
            return SampledFunction(_numlist(spec, "grid", kind), _numlist(spec, "values", kind))
        if kind == "powerloglog":
            return PowerLogLog(_num(spec, "a", kind), _num(spec, "b", kind, 0.0), _num(spec, "c", kind, 0.0),
                               _num(spec, "scale", kind, 1.0), _num(spec, "t0", kind, 1.0),
                               _num(spec, "loglog_shift", kind, E - 1.0))
        if kind == "example-no-var-small":
            J = _num(spec, "J", kind)
            return build_example_no_var_small(_num(spec, "b", kind), _num(spec, "theta", kind), int(J) if J == int(J) else J)
        if kind == "example-no-rearrange":
            return build_example_no_rearrange(_num(spec, "p0", kind), _num(spec, "theta", kind),
                                              _num(spec, "t0", kind, math.exp(-2.0)))
        if kind == "log-ratio":
            return LogRatioExponent(_num(spec, "base", kind), _num(spec, "ll_coef", kind),
                                    _num(spec, "inv_coef", kind, 0.0), bool(spec.get("reciprocal", False)),
                                    _num(spec, "u0", kind, 3.0))
        if kind == "reflected":
            return Reflected(function_from_spec(_need(spec, "source", kind)))
        if kind == "scaled":
            return Scaled(function_from_spec(_need(spec, "source", kind)), _num(spec, "factor", kind))
    except ParameterError as exc:
        raise SpecFormatError(str(exc), field=kind) from exc
    raise SpecFormatError(f"unknown kind {kind!r}", field="kind")
