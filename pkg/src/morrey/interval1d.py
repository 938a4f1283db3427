"""Exact Morrey norm of a radial step function on the real line.

For an even step function the supremum over intervals [a, b] can be taken
with one endpoint at a breakpoint: for fixed length the mass is piecewise
linear in the shift, so a maximizing shift puts an endpoint on a kink, and
evenness lets that endpoint be the left one.  With ``a`` fixed and ``b`` in
a cell of constant value the objective

    F(u) = (L0 + u)**g * (M0 + v * u),   g = p/q - 1,

has at most one stationary point, so each (breakpoint, cell) pair is solved
in closed form.  The O(n^2) pairs are searched by best-first branch and
bound over rectangular blocks of pairs.
"""

from __future__ import annotations

import math

import numpy as np

from .radial import RadialProfile, evaluate

BNB_RTOL = 1e-10


class _RangeMax:
    """Sparse table for O(1) range-maximum queries."""

    def __init__(self, values: np.ndarray):
        levels = [np.asarray(values, dtype=float)]
        k = 1
        while 2 * k <= levels[0].size:
            prev = levels[-1]
            levels.append(np.maximum(prev[:-k], prev[k:]))
            k *= 2
        self.levels = levels

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """max(values[lo..hi]) inclusive, vectorized."""
        span = hi - lo + 1
        k = np.floor(np.log2(np.maximum(span, 1))).astype(int)
        out = np.empty(lo.shape)
        for lev in np.unique(k):
            sel = k == lev
            tab = self.levels[lev]
            out[sel] = np.maximum(tab[lo[sel]], tab[hi[sel] - (1 << lev) + 1])
        return out


class StepLine:
    """Breakpoints, cell values and prefix masses of |f|^p on R."""

    def __init__(self, profile: RadialProfile, p: float):
        if not profile.is_step:
            raise ValueError("exact 1-d norm needs a piecewise-constant profile")
        knots = profile.knots
        xs = np.concatenate([-knots[::-1], knots])
        self.xs = xs
        n = xs.size
        mids = 0.5 * (xs[:-1] + xs[1:])
        vals = np.asarray(evaluate(profile, np.abs(mids)), dtype=float) ** p if n > 1 else np.zeros(0)
        # cell j is [x_j, x_{j+1}); the last cell [x_{n-1}, inf) carries zero mass
        self.vals = np.concatenate([vals, [0.0]])
        widths = np.diff(xs)
        self.prefix = np.concatenate([[0.0], np.cumsum(vals * widths)])  # mass on [x_0, x_j]
        self.prefix_ext = np.concatenate([self.prefix, [self.prefix[-1]]])
        self.x_ext = np.concatenate([xs, [math.inf]])
        self.rmq = _RangeMax(self.vals) if n else None

    @property
    def n(self) -> int:
        return self.xs.size


def _leaf_values(line: StepLine, i: np.ndarray, j: np.ndarray, g: float):
    """Best F and the corresponding right endpoint for a = x_i, b in cell j."""
    xs, x_ext, P, vals = line.xs, line.x_ext, line.prefix, line.vals
    L0 = xs[j] - xs[i]
    M0 = P[j] - P[i]
    v = vals[j]
    w = x_ext[j + 1] - xs[j]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        def F(u):
            L = L0 + u
            val = np.power(L, g) * (M0 + v * u)
            return np.where(L > 0, val, 0.0)

        best_u = np.zeros(L0.shape)
        best = F(best_u)
        fin = np.isfinite(w)
        fw = np.where(fin, F(np.where(fin, w, 0.0)), -np.inf)
        take = fw > best
        best = np.where(take, fw, best)
        best_u = np.where(take, w, best_u)
        if g != -1.0:
            ustar = -(g * M0 + v * L0) / (v * (g + 1.0))
            ok = (v > 0) & (ustar > 0) & (ustar < w)
            fs = np.where(ok, F(np.where(ok, ustar, 0.0)), -np.inf)
            take = fs > best
            best = np.where(take, fs, best)
            best_u = np.where(take, ustar, best_u)
    return best, xs[j] + best_u


def _box_bounds(line: StepLine, i0, i1, j0, j1, g: float):
    xs, x_ext, P_ext = line.xs, line.x_ext, line.prefix_ext
    Lmin = np.maximum(xs[j0] - xs[i1], 0.0)
    Lmax = x_ext[j1 + 1] - xs[i0]
    Mmax = P_ext[j1 + 1] - P_ext[i0]
    vmax = line.rmq.query(i0, j1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if g == 0.0:
            bound = np.minimum(Mmax, Lmax * vmax)
        else:
            Lc = Mmax / vmax
            b_low = np.power(Lmin, g) * Mmax
            b_high = np.power(Lmax, g + 1.0) * vmax
            b_mid = np.power(Lc, g) * Mmax
            bound = np.where(Lc <= Lmin, b_low, np.where(Lc >= Lmax, b_high, b_mid))
        bound = np.where((vmax > 0) & (Mmax > 0), bound, 0.0)
    return np.nan_to_num(bound, nan=np.inf)


def interval_sup(profile: RadialProfile, p: float, q: float, rtol: float = BNB_RTOL, batch: int = 65536):
    """Supremum of |I|^(1/q - 1/p) (int_I |f|^p)^(1/p) over intervals I.

    Returns (value, (center, radius), boxes_examined).  ``value`` is exact up
    to the relative pruning tolerance ``rtol`` (applied to the p-th power).
    """
    line = StepLine(profile, p)
    n = line.n
    if n == 0:
        return 0.0, (0.0, 1.0), 0
    g = p / q - 1.0

    # seed with the centered intervals [-s, s]
    half = n // 2
    i_seed = np.arange(half)
    j_mirror = n - 1 - i_seed
    seeds_i = np.concatenate([i_seed, i_seed])
    seeds_j = np.concatenate([j_mirror, j_mirror - 1])
    ok = seeds_j >= seeds_i
    vals, bends = _leaf_values(line, seeds_i[ok], seeds_j[ok], g)
    k = int(np.argmax(vals))
    best = float(vals[k])
    best_ab = (float(line.xs[seeds_i[ok][k]]), float(bends[k]))

    I0 = np.array([0])
    I1 = np.array([n - 1])
    J0 = np.array([0])
    J1 = np.array([n - 1])
    examined = 0
    while I0.size:
        if I0.size > batch:
            bnd = _box_bounds(line, I0, I1, J0, J1, g)
            order = np.argsort(-bnd, kind="stable")
            take, rest = order[:batch], order[batch:]
            R = (I0[rest], I1[rest], J0[rest], J1[rest])
            I0, I1, J0, J1 = I0[take], I1[take], J0[take], J1[take]
        else:
            R = None
        examined += I0.size
        bnd = _box_bounds(line, I0, I1, J0, J1, g)
        keep = (bnd > best * (1.0 + rtol)) & (J1 >= I0)
        I0, I1, J0, J1 = I0[keep], I1[keep], J0[keep], J1[keep]

        # probe one leaf per box to raise the incumbent early
        pi = I0
        pj = np.maximum(J1, I0)
        pv, pb = _leaf_values(line, pi, pj, g)
        if pv.size:
            k = int(np.argmax(pv))
            if pv[k] > best:
                best = float(pv[k])
                best_ab = (float(line.xs[pi[k]]), float(pb[k]))

        leaf = (I0 == I1) & (J0 == J1)
        if np.any(leaf):
            lv, lb = _leaf_values(line, I0[leaf], J0[leaf], g)
            k = int(np.argmax(lv))
            if lv[k] > best:
                best = float(lv[k])
                best_ab = (float(line.xs[I0[leaf][k]]), float(lb[k]))
        inner = ~leaf
        I0, I1, J0, J1 = I0[inner], I1[inner], J0[inner], J1[inner]

        split_i = (I1 - I0) >= (J1 - J0)
        mi = (I0 + I1) // 2
        mj = (J0 + J1) // 2
        # children along i
        ai0 = np.where(split_i, I0, I0)
        ai1 = np.where(split_i, mi, I1)
        aj0 = np.where(split_i, J0, J0)
        aj1 = np.where(split_i, J1, mj)
        bi0 = np.where(split_i, mi + 1, I0)
        bi1 = np.where(split_i, I1, I1)
        bj0 = np.where(split_i, J0, mj + 1)
        bj1 = np.where(split_i, J1, J1)
        I0 = np.concatenate([ai0, bi0])
        I1 = np.concatenate([ai1, bi1])
        J0 = np.concatenate([aj0, bj0])
        J1 = np.concatenate([aj1, bj1])
        if R is not None:
            I0 = np.concatenate([I0, R[0]])
            I1 = np.concatenate([I1, R[1]])
            J0 = np.concatenate([J0, R[2]])
            J1 = np.concatenate([J1, R[3]])

    a, b = best_ab
    value = best ** (1.0 / p) if best > 0 else 0.0
    return value, (0.5 * (a + b), 0.5 * (b - a)), examined


def interval_local_norm(profile: RadialProfile, p: float, q: float, center: float, radius: float) -> float:
    """Local norm of the even extension over [center - radius, center + radius]."""
    from .geometry import offcenter_mass

    m = offcenter_mass(1, abs(center), radius, profile, p)
    L = 2.0 * radius
    return L ** (1.0 / q - 1.0 / p) * m ** (1.0 / p)
