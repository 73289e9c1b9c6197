"""Integrals of expressions in one or more represented functions.

Expressions are given by their log-integrand (a function of the graded
coordinate ``u`` and of the log-values of the participating functions).  When
every participant is piecewise constant the integral is a finite sum over the
common refinement of their cells, accumulated in log-space; otherwise it goes
through adaptive quadrature in ``u``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IntegrationError
from .funcrep import CellTable, FunctionSpec, GeometricSteps, log_width_u, t_of_u, u_of_t
from .quadrature import (
    DEFAULT_TOL,
    GL_NODES,
    GL_WEIGHTS,
    GrowthReport,
    Verdict,
    integrate_panels,
    integrate_u,
)


@dataclass
class Outcome:
    """Value of an integral with its provenance; ``value`` is ``inf`` when judged divergent."""

    value: float
    error: float
    converged: bool
    infinite: bool = False
    growth: GrowthReport | None = None
    note: str = ""
    subdivisions: int = 0
    exact: bool = False

    def diagnostics(self) -> dict:
        d = {"converged": bool(self.converged), "exact": bool(self.exact), "subdivisions": int(self.subdivisions)}
        if self.note:
            d["note"] = self.note
        if self.growth is not None:
            d["growth"] = self.growth.to_dict()
        return d


def logsumexp(x) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return -math.inf
    m = float(np.max(x))
    if not math.isfinite(m):
        return m
    return m + math.log(math.fsum(np.exp(x - m)))


def _dedupe(edges: np.ndarray) -> np.ndarray:
    edges = np.unique(edges)
    if edges.size < 2:
        return edges
    keep = np.concatenate([[True], np.diff(edges) > 1e-12 * np.abs(edges[1:])])
    return edges[keep]


def common_cells(funcs: Sequence[FunctionSpec]):
    """Common refinement of the cells of step functions.

    Returns ``(table, [log-values per function])``; refinements are done in ``t``
    when every participant has ``t``-breakpoints, otherwise in ``u``.
    """
    tables = [f.cells() for f in funcs]
    if len(funcs) == 1:
        return tables[0], [tables[0].log_values]
    if all(t.t_breaks is not None for t in tables):
        b = np.unique(np.concatenate([t.t_breaks for t in tables]))
        mid = 0.5 * (b[:-1] + b[1:])
        with np.errstate(divide="ignore"):
            lw = np.log(np.diff(b))[::-1]
        lvs = [f.log_value_t(mid)[::-1] for f in funcs]
        u_hi = u_of_t(b[:-1])[::-1]
        u_lo = u_of_t(b[1:])[::-1]
        return CellTable(u_lo, u_hi, lw, lvs[0], t_breaks=b), lvs
    edges = _dedupe(np.concatenate([np.concatenate([t.u_lo, t.u_hi[np.isfinite(t.u_hi)]]) for t in tables]))
    lo = edges
    hi = np.concatenate([edges[1:], [np.inf]])
    mid = np.where(np.isfinite(hi), 0.5 * (lo + hi), lo + 1.0)
    lw = log_width_u(lo, hi)
    lvs = [f.log_value_u(mid) for f in funcs]
    return CellTable(lo, hi, lw, lvs[0]), lvs


def clip_cells(table: CellTable, lvs, u_lo: float, u_hi: float):
    """Restrict a cell table to ``[u_lo, u_hi]``."""
    if u_lo <= table.u_lo[0] and u_hi == math.inf:
        return table, lvs
    keep = (table.u_hi > u_lo) & (table.u_lo < u_hi)
    lo = np.maximum(table.u_lo[keep], u_lo)
    hi = np.minimum(table.u_hi[keep], u_hi)
    lw = table.log_width[keep].copy()
    changed = (lo != table.u_lo[keep]) | (hi != table.u_hi[keep])
    lw[changed] = log_width_u(lo[changed], hi[changed])
    return CellTable(lo, hi, lw, table.log_values[keep]), [v[keep] for v in lvs]


LogIntegrand = Callable[[np.ndarray, list], np.ndarray]


def integrate_log(funcs: Sequence[FunctionSpec], log_integrand: LogIntegrand, u_lo: float = 1.0,
                  u_hi: float = math.inf, tol: float = DEFAULT_TOL, *, exact_ok: bool = True) -> Outcome:
    """``int g dt`` over ``t`` in ``(e^{1-u_hi}, e^{1-u_lo}]`` where ``log g = log_integrand(u, logvals)``.

    ``exact_ok`` states that ``log_integrand`` depends on ``u`` only through the
    function values, so a cellwise closed form applies to step participants.
    """
    funcs = list(funcs)
    if exact_ok and all(f.is_step for f in funcs):
        table, lvs = common_cells(funcs)
        table, lvs = clip_cells(table, lvs, u_lo, u_hi)
        mid = np.where(np.isfinite(table.u_hi), 0.5 * (table.u_lo + table.u_hi), table.u_lo + 1.0)
        with np.errstate(invalid="ignore", over="ignore"):
            terms = np.asarray(log_integrand(mid, lvs), dtype=float) + table.log_width
        terms = np.where(table.log_width == -np.inf, -np.inf, terms)
        if np.any(np.isnan(terms)):
            raise IntegrationError("undefined integrand on a cell")
        lv = logsumexp(terms)
        value = math.exp(lv) if lv < 709.78 else math.inf
        if not math.isfinite(value):
            return Outcome(math.inf, 0.0, True, True, None, "overflow in closed-form cell sum", 0, True)
        return Outcome(value, value * 4 * np.finfo(float).eps * max(1, terms.size), True, False, None, "", 0, True)

    breaks = _dedupe(np.concatenate([np.asarray(f.u_breaks(), dtype=float) for f in funcs] + [np.empty(0)]))

    def h(u):
        lvs = [f.log_value_u(u) for f in funcs]
        return np.exp(np.asarray(log_integrand(u, lvs), dtype=float) + 1.0 - u)

    return _run(h, u_lo, u_hi, tol, breaks)


def _run(h, u_lo, u_hi, tol, breaks) -> Outcome:
    try:
        res, _panels, _tail = integrate_panels(h, u_lo, u_hi, tol, breaks)
    except IntegrationError as exc:
        if "(inf)" in str(exc):
            return Outcome(math.inf, 0.0, False, True, None, f"integrand overflow near u={exc.location!r}")
        raise
    if res.converged:
        return Outcome(res.value, res.abs_error_estimate, True, False, None, "", res.subdivisions)
    if res.growth is not None and res.growth.verdict is Verdict.DIVERGENT:
        return Outcome(math.inf, 0.0, False, True, res.growth, "tail growth classified divergent", res.subdivisions)
    note = "tolerance not reached"
    if res.growth is not None:
        note = f"tail not settled; growth verdict {res.growth.verdict.value}"
    return Outcome(res.value, res.abs_error_estimate, False, False, res.growth, note, res.subdivisions)


def _as_func_or_const(x):
    if isinstance(x, FunctionSpec):
        return x, None
    if hasattr(x, "function"):
        return x.function, None
    return None, float(x)


def power_log_integrand(f: FunctionSpec, p, lam: float = 1.0, sigma=None):
    """Participants and log-integrand for ``(|f|/lam)^{p(t)} log(e + |f|/lam)^{sigma(t)}``."""
    pf, pc = _as_func_or_const(p)
    sf, sc = (None, 0.0) if sigma is None else _as_func_or_const(sigma)
    funcs = [f] + ([pf] if pf is not None else []) + ([sf] if sf is not None else [])
    log_lam = math.log(lam)

    def log_integrand(u, lvs):
        x = lvs[0] - log_lam
        k = 1
        if pf is not None:
            pv = pf.value_u(u)
            k += 1
        else:
            pv = pc
        with np.errstate(invalid="ignore"):
            out = np.where(np.isneginf(x), -np.inf, pv * x)
        if sf is not None:
            # sigma may be signed, so take its value directly rather than from log|sigma|
            out = out + sf.value_u(u) * np.log(np.logaddexp(1.0, x))
        elif sc != 0.0:
            out = out + sc * np.log(np.logaddexp(1.0, x))
        return out

    return funcs, log_integrand


def power_integral(f: FunctionSpec, p, lam: float = 1.0, sigma=None, u_lo: float = 1.0, u_hi: float = math.inf,
                   tol: float = DEFAULT_TOL) -> Outcome:
    """``int (|f|/lam)^{p(t)} log(e + |f|/lam)^{sigma(t)} dt`` over the ``u``-range."""
    funcs, li = power_log_integrand(f, p, lam, sigma)
    return integrate_log(funcs, li, u_lo, u_hi, tol)


@dataclass
class CellContributions:
    """Integral of an expression over each cell of a step carrier."""

    table: CellTable
    values: np.ndarray
    errors: np.ndarray


def cell_contributions(f: FunctionSpec, p, lam: float = 1.0, sigma=None, tol: float = DEFAULT_TOL) -> CellContributions:
    """Per-cell integrals of ``(|f|/lam)^{p} log(e+|f|/lam)^{sigma}`` over the cells of step ``f``.

    The exponent may be analytic; each finite cell is integrated adaptively and
    the unbounded last cell by the tail engine.
    """
    table = f.cells()
    funcs, li = power_log_integrand(f, p, lam, sigma)

    def h(u):
        lvs = [g.log_value_u(u) for g in funcs]
        return np.exp(np.asarray(li(u, lvs), dtype=float) + 1.0 - u)

    fin = np.isfinite(table.u_hi)
    extra = _dedupe(np.concatenate([np.asarray(g.u_breaks(), dtype=float) for g in funcs[1:]] + [np.empty(0)]))
    edges = _dedupe(np.concatenate([table.u_lo, table.u_hi[fin], extra]))
    last = float(table.u_lo[-1]) if not fin[-1] else float(table.u_hi[-1])
    edges = edges[edges <= last]
    res, panels, _ = integrate_panels(h, float(edges[0]), last, tol, edges)
    idx = np.searchsorted(table.u_lo, panels.a, side="right") - 1
    vals = np.zeros(len(table))
    errs = np.zeros(len(table))
    np.add.at(vals, idx, panels.values)
    np.add.at(errs, idx, panels.errors)
    if not fin[-1]:
        tail = integrate_u(h, last, math.inf, tol)
        vals[-1] = tail.value if tail.converged else math.inf
        errs[-1] = tail.abs_error_estimate
    return CellContributions(table, vals, errs)


class CumulativeMass:
    """Partial masses of ``|f|^p`` from either end of (0, 1].

    ``log_below(u) = log int_0^{t(u)} |f|^p`` and ``log_above(u) = log int_{t(u)}^1 |f|^p``.
    Step carriers are handled in closed form (log-space, so cells far below
    double range are fine); analytic ones through quadrature panels with
    15-point Gauss-Legendre for partial panels.
    """

    def __init__(self, f: FunctionSpec, p: float, tol: float = DEFAULT_TOL):
        self.f = f
        self.p = float(p)
        self.tol = tol
        self.table = f.cells()
        if self.table is not None:
            self._init_cells()
        else:
            self._init_panels()

    # -- piecewise constant ---------------------------------------------------
    def _init_cells(self):
        t = self.table
        with np.errstate(invalid="ignore"):
            lm = np.where(np.isneginf(t.log_values), -np.inf, self.p * t.log_values) + t.log_width
        lm = np.where(t.log_width == -np.inf, -np.inf, lm)
        self._lm = lm
        with np.errstate(invalid="ignore"):
            suffix = np.logaddexp.accumulate(lm[::-1])[::-1]
            prefix = np.logaddexp.accumulate(lm)
        self._suffix = np.concatenate([suffix, [-np.inf]])  # inclusive, from cell i on
        self._prefix = np.concatenate([[-np.inf], prefix])  # exclusive, cells before i
        self.log_total = float(suffix[0])
        self.total = math.exp(self.log_total) if self.log_total < 709.78 else math.inf
        self.infinite = False
        self.growth = None
        self.breaks = np.concatenate([t.u_lo, t.u_hi[np.isfinite(t.u_hi)]])

    def _cell_index(self, u):
        return np.clip(np.searchsorted(self.table.u_lo, u, side="right") - 1, 0, len(self.table) - 1)

    # -- analytic ------------------------------------------------------------
    def _init_panels(self):
        f, p = self.f, self.p

        def h(u):
            lv = f.log_value_u(u)
            with np.errstate(invalid="ignore"):
                return np.exp(np.where(np.isneginf(lv), -np.inf, p * lv) + 1.0 - u)

        self._h = h
        self.breaks = np.asarray(f.u_breaks(), dtype=float)
        self.infinite = False
        self.growth = None
        try:
            res, panels, tail = integrate_panels(h, 1.0, math.inf, self.tol, self.breaks)
        except IntegrationError as exc:
            if "(inf)" not in str(exc):
                raise
            # the mass blows up at a finite u: everything below that point is infinite
            loc = float(exc.location)
            res, panels, tail = integrate_panels(h, 1.0, max(1.0 + 1e-9, 0.5 * (1.0 + loc)), self.tol, self.breaks)
            self.infinite = True
        self._a, self._b, self._v = panels.a, panels.b, panels.values
        self._cum = np.concatenate([[0.0], np.cumsum(self._v)])
        self._u_end = float(panels.b[-1]) if panels.b.size else 1.0
        if not self.infinite and res.converged:
            rem = tail.remainder_estimate if tail is not None and math.isfinite(tail.remainder_estimate) else 0.0
            self._rem = rem
            self._rcum = np.concatenate([np.cumsum(self._v[::-1])[::-1], [0.0]]) + rem
            self.total = float(res.value)
        else:
            self.growth = res.growth
            if res.growth is not None and res.growth.verdict is Verdict.DIVERGENT:
                self.infinite = True
            elif not self.infinite:
                # unsettled but not classified divergent: report the partial mass
                self._rem = 0.0
                self._rcum = np.concatenate([np.cumsum(self._v[::-1])[::-1], [0.0]])
                self.total = float(res.value)
            self.total = math.inf if self.infinite else self.total
        self.log_total = math.log(self.total) if self.total > 0 else -math.inf
        self.converged = bool(res.converged)

    def _partial(self, a, u):
        # int_a^u h, vectorized over matching arrays a <= u
        a = np.asarray(a, dtype=float)
        u = np.asarray(u, dtype=float)
        c = 0.5 * (a + u)
        r = 0.5 * (u - a)
        x = c[..., None] + r[..., None] * GL_NODES
        return (self._h(x) @ GL_WEIGHTS) * r

    # -- public --------------------------------------------------------------
    def log_above(self, u):
        """``log int_{t(u)}^1 |f|^p`` (the mass between ``t(u)`` and 1)."""
        u = np.asarray(u, dtype=float)
        if self.table is not None:
            t = self.table
            i = self._cell_index(u)
            with np.errstate(invalid="ignore", divide="ignore"):
                part = np.where(np.isneginf(self._lm[i]), -np.inf,
                                self.p * t.log_values[i] + log_width_u(t.u_lo[i], np.maximum(u, t.u_lo[i])))
                return np.logaddexp(self._prefix[i], part)
        i = np.clip(np.searchsorted(self._a, u, side="right") - 1, 0, max(self._a.size - 1, 0))
        beyond = u > self._u_end
        uu = np.minimum(u, self._b[i])
        val = self._cum[i] + self._partial(self._a[i], np.maximum(uu, self._a[i]))
        if np.any(beyond):
            extra = np.array([integrate_u(self._h, self._u_end, float(x), self.tol).value for x in np.atleast_1d(u)[np.atleast_1d(beyond)]])
            val = np.array(val, dtype=float)
            val[beyond] = self._cum[-1] + extra
        with np.errstate(divide="ignore"):
            return np.log(np.maximum(val, 0.0))

    def log_below(self, u):
        """``log int_0^{t(u)} |f|^p``; ``+inf`` when the mass near 0 diverges."""
        u = np.asarray(u, dtype=float)
        if self.table is not None:
            t = self.table
            i = self._cell_index(u)
            with np.errstate(invalid="ignore", divide="ignore"):
                part = np.where(np.isneginf(self._lm[i]), -np.inf,
                                self.p * t.log_values[i] + log_width_u(np.maximum(u, t.u_lo[i]), t.u_hi[i]))
                return np.logaddexp(self._suffix[i + 1], part)
        if self.infinite:
            return np.full(u.shape, np.inf)
        i = np.clip(np.searchsorted(self._a, u, side="right") - 1, 0, max(self._a.size - 1, 0))
        inside = u <= self._u_end
        uu = np.clip(u, self._a[i], self._b[i])
        val = self._rcum[i + 1] + self._partial(uu, self._b[i])
        if np.any(~inside):
            outside = np.atleast_1d(u)[np.atleast_1d(~inside)]
            extra = np.array([integrate_u(self._h, float(x), math.inf, self.tol).value for x in outside])
            val = np.array(val, dtype=float)
            val[~inside] = extra
        with np.errstate(divide="ignore"):
            return np.log(np.maximum(val, 0.0))
