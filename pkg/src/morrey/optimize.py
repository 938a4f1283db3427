"""Golden-section search and power-law fitting.

Both the sup-over-radii and sup-over-levels problems reduce to maximizing a
one-variable function on many short brackets, so the golden search here is
vectorized: every bracket advances in lockstep.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_iter: int = 200):
    """Maximize a unimodal scalar function on [a, b]; returns (x, f(x))."""
    if b < a:
        a, b = b, a
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        it += 1
    best = max([(f1, x1), (f2, x2), (f(a), a), (f(b), b)], key=lambda fx: (fx[0], -fx[1]))
    return best[1], best[0]


def golden_max_vec(f, a: np.ndarray, b: np.ndarray, tol: float = 1e-10, max_iter: int = 200):
    """Vectorized golden-section maximization over many brackets.

    ``f`` maps an array of abscissae (one per bracket) to values.  Returns
    the best evaluated point per bracket, including the bracket ends.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if not np.any(b - a > tol):
            break
        move_up = f1 < f2
        a = np.where(move_up, x1, a)
        b = np.where(move_up, b, x2)
        nx1 = np.where(move_up, x2, b - INV_PHI * (b - a))
        nx2 = np.where(move_up, a + INV_PHI * (b - a), x1)
        fv = f(np.where(move_up, nx2, nx1))
        x1, x2 = nx1, nx2
        f1, f2 = np.where(move_up, f2, fv), np.where(move_up, fv, f1)
    xs = np.stack([a, x1, x2, b])
    fs = np.stack([f(a), f1, f2, f(b)])
    k = np.argmax(fs, axis=0)
    cols = np.arange(xs.shape[1])
    return xs[k, cols], fs[k, cols]


def grid_golden_max(f, lo: np.ndarray, hi: np.ndarray, n_grid: int = 64, tol: float = 1e-10):
    """Maximize ``f`` on each interval [lo_i, hi_i] (in whatever coordinate
    the caller chooses) by a uniform grid bracket followed by golden search.

    Returns (x_best, f_best) arrays.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    m = lo.size
    if m == 0:
        return np.empty(0), np.empty(0)
    u = np.linspace(0.0, 1.0, n_grid)
    grid = lo[:, None] + (hi - lo)[:, None] * u[None, :]
    vals = f(grid.ravel()).reshape(m, n_grid)
    vals = np.where(np.isnan(vals), -np.inf, vals)
    k = np.argmax(vals, axis=1)
    rows = np.arange(m)
    ka = np.clip(k - 1, 0, n_grid - 1)
    kb = np.clip(k + 1, 0, n_grid - 1)
    xg, fg = grid[rows, k], vals[rows, k]
    xr, fr = golden_max_vec(f, grid[rows, ka], grid[rows, kb], tol=tol)
    better = fr > fg
    return np.where(better, xr, xg), np.where(better, fr, fg)


class PowerFit(NamedTuple):
    slope: float
    intercept: float
    max_residual: float


def loglog_fit(x, y) -> PowerFit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y)) or np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("log-log fit needs finite positive samples")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return PowerFit(float(slope), float(intercept), float(np.max(np.abs(resid))))


class OffsetFit(NamedTuple):
    exponent: float
    amplitude: float
    offset: float
    max_rel_residual: float


def offset_power_fit(x, y, e_lo: float = -4.0, e_hi: float = 8.0) -> OffsetFit:
    """Fit y ~ A * x**e + B with relative least squares.

    For fixed e the problem is linear in (A, B); the exponent is found by a
    grid scan followed by golden refinement of the projected residual.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(y)) or np.any(y <= 0) or np.any(x <= 0):
        raise ValueError("offset fit needs finite positive samples")
    lx = np.log(x / np.sqrt(x.min() * x.max()))  # centred for conditioning

    def solve(e):
        basis = np.stack([np.exp(e * lx), np.ones_like(lx)], axis=1) / y[:, None]
        coef, *_ = np.linalg.lstsq(basis, np.ones_like(y), rcond=None)
        resid = basis @ coef - 1.0
        return coef, resid

    def neg_sse(e):
        return -float(np.sum(solve(e)[1] ** 2))

    grid = np.linspace(e_lo, e_hi, 241)
    scores = np.array([neg_sse(e) for e in grid])
    k = int(np.argmax(scores))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid.size - 1)]
    e, _ = golden_max(neg_sse, a, b, tol=1e-12)
    (amp, off), resid = solve(e)
    # undo the centring of x in the amplitude
    amp = amp * np.sqrt(x.min() * x.max()) ** (-e)
    return OffsetFit(float(e), float(amp), float(off), float(np.max(np.abs(resid))))
