"""Integration and series engines for integrands singular at t = 0.

Integrals over (0, 1] are computed in the graded coordinate ``u = log(e/t)``
(``dt = -t du``), where power-log singularities at ``t = 0`` turn into smooth
algebraic or exponential tails on ``[1, inf)``.  Finite panels use adaptive
Gauss-Kronrod (7/15); the infinite tail is covered by doubling panels and is
cut off once the geometric ratio of successive panel contributions bounds the
remainder below ``tol / 10``.

Divergence is never proven here.  When the tail does not settle, the partial
integrals are handed to :func:`classify_growth`, whose verdict is numerical
evidence only.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import IntegrationError, ParameterError
from .search import golden_max

DEFAULT_TOL = 1e-9
DEFAULT_REL_TOL = 1e-12
MAX_SUBDIVISIONS = 20_000
# Beyond ~1e15 the exponent of power-type integrands (a*u - u) loses all
# significant digits to cancellation, so tails are not sampled further out.
U_CAP = 1e15
_CHUNK = 100_000
_EPS = np.finfo(float).eps

# QUADPACK qk15 abscissae/weights on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
# Gauss-7 nodes sit at odd Kronrod positions (and the centre).
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_GAUSS_W = np.array([_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]])

# 15-point Gauss-Legendre for partial-panel integrals.
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    converged: bool
    growth: "GrowthReport | None" = None

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("negative error estimate")


@dataclass
class PanelSet:
    """Panels ``[a, b]`` in ascending order with their integrals and error estimates."""

    a: np.ndarray
    b: np.ndarray
    values: np.ndarray
    errors: np.ndarray

    @classmethod
    def empty(cls):
        z = np.empty(0)
        return cls(z, z.copy(), z.copy(), z.copy())

    @classmethod
    def concat(cls, sets: Sequence["PanelSet"]):
        sets = [s for s in sets if s.a.size]
        if not sets:
            return cls.empty()
        return cls(*(np.concatenate([getattr(s, k) for s in sets]) for k in ("a", "b", "values", "errors")))

    def total(self) -> float:
        return math.fsum(self.values)


def gk15(h: Callable[[np.ndarray], np.ndarray], a, b):
    """Gauss-Kronrod 15 on each panel ``[a_i, b_i]``; returns ``(integrals, error estimates)``.

    ``h`` receives a 2-D array of abscissae and must return an array of the same shape.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    out_v = np.empty(a.size)
    out_e = np.empty(a.size)
    for s in range(0, a.size, _CHUNK):
        aa, bb = a[s:s + _CHUNK], b[s:s + _CHUNK]
        c = 0.5 * (aa + bb)
        r = 0.5 * (bb - aa)
        x = c[:, None] + r[:, None] * NODES[None, :]
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            y = np.asarray(h(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        bad = ~np.isfinite(y)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            kind = "nan" if np.isnan(y[i, j]) else "inf"
            raise IntegrationError(f"non-finite integrand ({kind}) at u={x[i, j]!r}", location=float(x[i, j]))
        # near-overflow samples may give inf panel sums; callers treat those as divergence
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            resk = y @ KRONROD_WEIGHTS
            resg = y[:, _GAUSS_IDX] @ _GAUSS_W
            mean = 0.5 * resk
            resabs = np.abs(y) @ KRONROD_WEIGHTS
            resasc = np.abs(y - mean[:, None]) @ KRONROD_WEIGHTS
            err = np.abs(resk - resg)
            scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
            err = np.where((resasc > 0) & (err > 0), scaled, err)
            err = np.maximum(err, 50.0 * _EPS * resabs)
            out_v[s:s + _CHUNK] = resk * r
            out_e[s:s + _CHUNK] = err * np.abs(r)
    return out_v, out_e


def adaptive_panels(h, a, b, tol=DEFAULT_TOL, max_subdivisions=MAX_SUBDIVISIONS, rel_tol=DEFAULT_REL_TOL):
    """Globally adaptive GK15 over the initial panels ``[a_i, b_i]``.

    Each round bisects the highest-error panels whose errors cover the excess
    over the tolerance.  Returns ``(PanelSet, converged, subdivisions)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    b = np.atleast_1d(np.asarray(b, dtype=float)).copy()
    if a.size == 0:
        return PanelSet.empty(), True, 0
    vals, errs = gk15(h, a, b)
    splits = 0
    while True:
        total_err = float(errs.sum())
        target = max(tol, rel_tol * abs(math.fsum(vals)))
        if total_err <= target:
            converged = True
            break
        budget = max_subdivisions - splits
        if budget <= 0:
            converged = False
            break
        order = np.argsort(-errs, kind="stable")
        cum = np.cumsum(errs[order])
        k = int(np.searchsorted(cum, total_err - 0.5 * target)) + 1
        k = max(1, min(k, budget, order.size))
        pick = np.sort(order[:k])
        mid = 0.5 * (a[pick] + b[pick])
        # Panels too narrow to split in double precision are left alone.
        ok = (mid > a[pick]) & (mid < b[pick])
        if not ok.any():
            converged = False
            break
        pick, mid = pick[ok], mid[ok]
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        nv, ne = gk15(h, na, nb)
        keep = np.ones(a.size, dtype=bool)
        keep[pick] = False
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        srt = np.argsort(a, kind="stable")
        a, b, vals, errs = a[srt], b[srt], vals[srt], errs[srt]
        splits += int(pick.size)
    return PanelSet(a, b, vals, errs), converged, splits


@dataclass
class TailResult:
    panels: PanelSet
    converged: bool
    subdivisions: int
    ends: np.ndarray
    cumulative: np.ndarray
    remainder_estimate: float
    growth: "GrowthReport | None" = None


def tail_panels(h, start: float, tol=DEFAULT_TOL, *, u_cap=U_CAP, max_subdivisions=MAX_SUBDIVISIONS):
    """Integrate ``h`` over ``[start, inf)`` with doubling panels.

    Stops once two successive contribution ratios are below one and the
    geometric remainder bound ``I_k r / (1 - r)`` is under ``tol / 10``, or the
    contributions underflow to zero.  If ``u_cap`` is reached first, the
    cumulative integrals are classified by :func:`classify_growth`.
    """
    a = float(start)
    width = max(a, 1.0)
    sets, contribs, ends = [], [], []
    budget = max_subdivisions
    splits = 0
    prev = None
    below = 0
    zeros = 0
    converged = False
    remainder = math.inf
    while a < u_cap:
        b = min(a + width, u_cap)
        if not b > a:
            break
        edges = np.array([a, b])
        if not sets:
            # Grade the first panel toward its left end: a boundary layer of width
            # O(1) at a large start would otherwise fall between the GK15 nodes.
            steps = 2.0 ** np.arange(0, 64)
            edges = np.unique(np.concatenate([[a], a + steps[a + steps < b], [b]]))
        ps, _ok, ns = adaptive_panels(h, edges[:-1], edges[1:], tol / 64.0, max(budget, 0))
        budget -= ns
        splits += ns
        val = ps.total()
        sets.append(ps)
        contribs.append(val)
        ends.append(b)
        if val == 0.0:
            zeros += 1
            if zeros >= 2:
                converged, remainder = True, 0.0
                break
        else:
            zeros = 0
            if prev is not None and prev > 0.0:
                r = val / prev
                if r < 1.0:
                    below += 1
                    remainder = val * r / (1.0 - r)
                    if below >= 2 and remainder < tol / 10.0:
                        converged = True
                        break
                else:
                    below = 0
            prev = val
        a = b
        width *= 2.0
    ends_arr = np.asarray(ends)
    cum = np.array([math.fsum(contribs[: i + 1]) for i in range(len(contribs))]) if contribs else np.empty(0)
    growth = None
    if not converged and len(ends) >= 4:
        growth = _classify_tail(ends_arr, cum)
    return TailResult(PanelSet.concat(sets), converged, splits, ends_arr, cum, remainder, growth)


def _classify_tail(ends, cum):
    # Use the last 12 decades of the sweep; early panels describe the bulk, not the tail.
    sel = ends >= ends[-1] * 1e-12
    if sel.sum() < 4:
        sel = np.zeros_like(sel)
        sel[-4:] = True
    lv, vv = ends[sel], cum[sel]
    if lv[-1] / lv[0] < 1e3:
        return None
    try:
        return classify_growth(lv, vv)
    except ParameterError:
        return None


def integrate_panels(h, u_lo=1.0, u_hi=math.inf, tol=DEFAULT_TOL, breakpoints=(), *,
                     max_subdivisions=MAX_SUBDIVISIONS, u_cap=U_CAP):
    """Adaptive integral of ``h`` over ``[u_lo, u_hi]``; returns ``(QuadratureResult, PanelSet, TailResult|None)``."""
    if not u_hi > u_lo:
        return QuadratureResult(0.0, 0.0, 0, True), PanelSet.empty(), None
    bp = np.asarray(breakpoints, dtype=float)
    bp = bp[(bp > u_lo) & (bp < u_hi) & np.isfinite(bp)]
    edges = np.unique(np.concatenate([[u_lo], bp] + ([[u_hi]] if math.isfinite(u_hi) else [])))
    fin, ok_f, n_f = adaptive_panels(h, edges[:-1], edges[1:], tol / 2.0, max_subdivisions)
    tail = None
    if math.isfinite(u_hi):
        panels = fin
        converged = ok_f
        n_t = 0
        extra_err = 0.0
    else:
        tail = tail_panels(h, edges[-1], tol / 2.0, u_cap=u_cap, max_subdivisions=max(max_subdivisions - n_f, 0))
        panels = PanelSet.concat([fin, tail.panels])
        converged = ok_f and tail.converged
        n_t = tail.subdivisions
    value = panels.total()
    err = float(panels.errors.sum())
    if tail is not None:
        if tail.converged:
            # The geometric remainder bound doubles as a tail correction.
            value += tail.remainder_estimate
            err += tail.remainder_estimate
        else:
            ext = extrapolate_tail(tail)
            if ext is not None:
                drop, remainder, spread = ext
                value += remainder - drop
                err += spread
                converged = converged or (ok_f and err <= tol and tail.growth is not None
                                          and tail.growth.verdict is Verdict.CONVERGENT)
    res = QuadratureResult(value, err, n_f + n_t, converged, tail.growth if tail is not None else None)
    return res, panels, tail


def integrate_u(h, u_lo=1.0, u_hi=math.inf, tol=DEFAULT_TOL, breakpoints=(), **kw) -> QuadratureResult:
    """Integral of ``h(u)`` over ``[u_lo, u_hi]`` (``u_hi`` may be infinite)."""
    return integrate_panels(h, u_lo, u_hi, tol, breakpoints, **kw)[0]


# t = e^{1-u} stays a normal double for u below this.
_T_EVAL_U_MAX = 700.0


def integrate_graded(g: Callable, lo: float = 0.0, hi: float = 1.0, tol: float = DEFAULT_TOL,
                     breakpoints: Sequence[float] = ()) -> QuadratureResult:
    """Integrate ``g(t)`` over ``(lo, hi]`` after substituting ``u = log(e/t)``.

    ``g`` is called with arrays of ``t``.  When ``lo = 0`` the integrand cannot be
    sampled below ``t ~ 1e-304``; the remaining tail is extrapolated from the
    ratio of the last two doubling panels and that extrapolation is charged to
    the error estimate.
    """
    if not (0.0 <= lo < hi <= 1.0):
        raise ParameterError(f"need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}")

    def h(u):
        t = np.exp(1.0 - u)
        y = np.asarray(g(t), dtype=float) * t
        bad = ~np.isfinite(y)
        if bad.any():
            where = float(np.asarray(t)[bad].flat[0])
            raise IntegrationError(f"non-finite integrand at t={where!r}", location=where)
        return y

    u_lo = 1.0 - math.log(hi)
    bps = [1.0 - math.log(x) for x in breakpoints if lo < x < hi]
    if lo > 0.0:
        return integrate_u(h, u_lo, 1.0 - math.log(lo), tol, bps)
    res, panels, tail = integrate_panels(h, u_lo, math.inf, tol, bps, u_cap=_T_EVAL_U_MAX)
    if not res.converged and tail is not None and extrapolate_tail(tail) is not None:
        return QuadratureResult(res.value, res.abs_error_estimate, res.subdivisions,
                                res.abs_error_estimate <= tol, None)
    return res


def extrapolate_tail(tail: "TailResult"):
    """Geometric extrapolation past the last doubling panels of an unsettled tail.

    Returns ``(dropped, remainder, spread)``: the contribution of a final panel
    cut short by the cap (dropped and re-extrapolated), the remainder beyond the
    last complete panel, and the disagreement between the last two ratio
    estimates.  ``None`` when the contributions are not decaying.
    """
    c = np.diff(np.concatenate([[0.0], tail.cumulative]))
    e = tail.ends
    if len(c) < 4:
        return None
    dropped = 0.0
    if (e[-1] - e[-2]) < 1.999 * (e[-2] - e[-3]):
        dropped = float(c[-1])
        c = c[:-1]
    if c[-1] <= 0.0 or c[-2] <= 0.0 or c[-3] <= 0.0:
        return None
    r1, r0 = c[-1] / c[-2], c[-2] / c[-3]
    if not (r1 < 1.0 and r0 < 1.0):
        return None
    remainder = c[-1] * r1 / (1.0 - r1)
    spread = abs(c[-1] * r0 / (1.0 - r0) - remainder)
    return dropped, float(remainder), float(spread)


def series_partial_sums(term: Callable[[np.ndarray], np.ndarray], j_start: int, levels: Sequence[int]) -> list[float]:
    """Partial sums ``sum_{j=j_start}^{L} term(j)`` for each ``L`` in ``levels``.

    ``term`` is called on blocks of integer indices (numpy arrays).  Blocks are
    summed with ``math.fsum`` in ascending-j order.
    """
    levels = [int(L) for L in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ParameterError("levels must be strictly increasing")
    if levels and levels[0] < j_start:
        raise ParameterError("first level precedes j_start")
    out = []
    blocks = []
    j = j_start
    for L in levels:
        while j <= L:
            hi = min(L, j + _CHUNK - 1)
            idx = np.arange(j, hi + 1)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                vals = np.asarray(term(idx), dtype=float)
            bad = ~np.isfinite(vals)
            if bad.any():
                jj = int(idx[np.argmax(bad)])
                raise IntegrationError(f"non-finite series term at j={jj}", location=jj)
            blocks.append(math.fsum(vals))
            j = hi + 1
        out.append(math.fsum(blocks))
    return out


class GrowthModel(str, enum.Enum):
    BOUNDED = "BOUNDED"
    LOG = "LOG"
    LOGLOG = "LOGLOG"
    POWER = "POWER"


class Verdict(str, enum.Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class GrowthReport:
    """Classification of partial values against bounded and unbounded growth models.

    ``shape`` is the fitted Box-Cox exponent of the winning family, named in
    ``family``: ``log-power`` (in ``log L``), ``loglog-power`` (in ``loglog L``)
    or ``power`` (in ``L``).
    """

    levels: tuple
    values: tuple
    model: GrowthModel
    fit_quality: float
    verdict: Verdict
    shape: float
    family: str
    note: str = "numerical evidence, not a proof"

    def to_dict(self):
        return {
            "levels": list(self.levels),
            "values": list(self.values),
            "model": self.model.value,
            "fit_quality": self.fit_quality,
            "verdict": self.verdict.value,
            "shape": self.shape,
            "family": self.family,
            "note": self.note,
        }


QUALITY_THRESHOLD = 0.99
_SHAPE_ZERO = 0.02


def _boxcox(x, k):
    lx = np.log(x)
    if abs(k) < 1e-12:
        return lx
    return np.expm1(k * lx) / k


def _linfit(v, basis):
    A = np.column_stack([np.ones_like(basis), basis])
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    rss = float(np.sum((v - A @ coef) ** 2))
    sb = np.std(basis)
    sv = np.std(v)
    corr = float(np.mean((basis - basis.mean()) * (v - v.mean())) / (sb * sv)) if sb > 0 and sv > 0 else 0.0
    return rss, coef, corr


def _best_shape(v, x, lo, hi):
    ks = np.linspace(lo, hi, 141)
    rss = np.array([_linfit(v, _boxcox(x, k))[0] for k in ks])
    i = int(np.argmin(rss))
    a, b = ks[max(i - 1, 0)], ks[min(i + 1, ks.size - 1)]
    k, neg = golden_max(lambda k: -_linfit(v, _boxcox(x, k))[0], a, b, tol=1e-9)
    if -neg > rss[i]:
        k = float(ks[i])
    return k


def classify_growth(levels: Sequence[float], values: Sequence[float]) -> GrowthReport:
    """Fit partial values against ``{constant, log L, loglog L, L^a}`` growth and give a verdict.

    Three Box-Cox families are fitted by least squares: ``alpha + beta * BC_k(log L)``
    (negative ``k`` bounded, ``k ~ 0`` loglog, positive ``k`` powers of log),
    ``alpha + beta * BC_q(loglog L)`` (negative ``q`` bounded, positive ``q``
    powers of loglog) and ``alpha + beta * BC_g(L)`` (negative ``g`` bounded,
    positive ``g`` power).
    DIVERGENT requires an unbounded best model with |correlation| >= 0.99 and
    strictly increasing values; CONVERGENT requires a bounded best model with the
    same fit quality.
    """
    L = np.asarray(levels, dtype=float)
    v = np.asarray(values, dtype=float)
    if L.size != v.size:
        raise ParameterError("levels and values differ in length")
    if L.size < 4:
        raise ParameterError("need at least 4 levels")
    if np.any(np.diff(L) <= 0) or L[0] <= 1.0:
        raise ParameterError("levels must be increasing and > 1")
    if L[-1] / L[0] < 10 ** 3 * (1 - 1e-9):
        raise ParameterError("levels must span at least 3 decades")
    if not np.all(np.isfinite(v)):
        raise ParameterError("values must be finite")
    scale = max(1.0, float(np.max(np.abs(v))))
    if np.any(np.diff(v) < -1e-12 * scale):
        raise ParameterError("values must be non-decreasing")
    lv, vv = tuple(float(x) for x in L), tuple(float(x) for x in v)
    if np.ptp(v) <= 1e-12 * scale:
        return GrowthReport(lv, vv, GrowthModel.BOUNDED, 1.0, Verdict.CONVERGENT, 0.0, "constant")

    vn = (v - v.mean()) / np.ptp(v)
    logL = np.log(L)
    k = _best_shape(vn, logL, -4.0, 3.0)
    rss_k, _, corr_k = _linfit(vn, _boxcox(logL, k))
    g = _best_shape(vn, L / L[0], -3.0, 3.0)
    rss_g, _, corr_g = _linfit(vn, _boxcox(L / L[0], g))
    rss_ll, _, corr_ll = _linfit(vn, np.log(logL))
    llL = np.log(logL)
    q = _best_shape(vn, llL, -4.0, 3.0)
    rss_q, _, corr_q = _linfit(vn, _boxcox(llL, q))

    candidates = []
    if k < -_SHAPE_ZERO:
        candidates.append((rss_k, GrowthModel.BOUNDED, corr_k, k, "log-power"))
    elif k > _SHAPE_ZERO:
        candidates.append((rss_k, GrowthModel.LOG, corr_k, k, "log-power"))
    if g < -_SHAPE_ZERO:
        candidates.append((rss_g, GrowthModel.BOUNDED, corr_g, g, "power"))
    elif g > _SHAPE_ZERO:
        candidates.append((rss_g, GrowthModel.POWER, corr_g, g, "power"))
    else:
        candidates.append((rss_g, GrowthModel.LOG, corr_g, 1.0, "log-power"))
    if q < -_SHAPE_ZERO:
        candidates.append((rss_q, GrowthModel.BOUNDED, corr_q, q, "loglog-power"))
    elif q > _SHAPE_ZERO:
        candidates.append((rss_q, GrowthModel.LOGLOG, corr_q, q, "loglog-power"))
    # loglog is the k = 0 member; it wins ties because it has no free shape.
    candidates.append((rss_ll * (1.0 - 1e-9) - 1e-30, GrowthModel.LOGLOG, corr_ll, 0.0, "log-power"))
    rss, model, corr, shape, family = min(candidates, key=lambda c: c[0])
    quality = abs(corr)
    if quality >= QUALITY_THRESHOLD and model is GrowthModel.BOUNDED:
        verdict = Verdict.CONVERGENT
    elif quality >= QUALITY_THRESHOLD and np.all(np.diff(v) > 0):
        verdict = Verdict.DIVERGENT
    else:
        verdict = Verdict.INCONCLUSIVE
    return GrowthReport(lv, vv, model, quality, verdict, float(shape), family)
