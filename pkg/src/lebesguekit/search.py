"""One-dimensional supremum search: coarse grid followed by golden-section refinement."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximize a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the best point seen.  The loop is fixed-order so
    results are bit-reproducible.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(max_iter):
        if h <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


@dataclass(frozen=True)
class SupResult:
    value: float
    argmax: float
    grid_argmax: float
    evaluations: int


def grid_then_golden(f: Callable[[float], float], grid: np.ndarray, tol: float = 1e-10) -> SupResult:
    """Supremum of ``f`` over ``grid`` refined by golden section around the best node.

    ``f`` may return ``+inf``; the search short-circuits in that case.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.array([f(float(x)) for x in grid])
    count = len(grid)
    if np.any(np.isposinf(vals)):
        i = int(np.argmax(np.isposinf(vals)))
        return SupResult(math.inf, float(grid[i]), float(grid[i]), count)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    best_x, best_f = float(grid[i]), float(vals[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    if hi > lo:
        calls = [0]

        def counted(x):
            calls[0] += 1
            return f(x)

        x, fx = golden_max(counted, lo, hi, tol=tol)
        count += calls[0]
        if fx > best_f:
            best_x, best_f = x, fx
    return SupResult(best_f, best_x, float(grid[i]), count)
