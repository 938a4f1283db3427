"""Centered Hardy-Littlewood maximal function of radial profiles.

Every number produced here is an evaluated ball average (or the Lebesgue
limit f(t) at a continuity point), so it is a genuine lower bound for Mf no
matter how coarse the candidate radii are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constructions import probe_family
from .geometry import offcenter_mass, unit_ball_volume
from .norms import SpaceParams, exact_norm_1d
from .optimize import golden_max
from .radial import MassTable, RadialProfile, evaluate


@dataclass
class MaximalEnvelope:
    radii: np.ndarray
    lower: np.ndarray
    upper: np.ndarray | None = None


def _nonintegrable_core(profile: RadialProfile, d: int) -> bool:
    active = np.nonzero(profile.coeff > 0)[0]
    if not active.size:
        return False
    i = active[0]
    return profile.lo[i] == 0 and profile.exponent[i] >= d


def _singular_at_origin(profile: RadialProfile) -> bool:
    active = np.nonzero(profile.coeff > 0)[0]
    return bool(active.size) and profile.lo[active[0]] == 0 and profile.exponent[active[0]] > 0


def _candidate_radii(profile: RadialProfile, t: float, n_grid: int) -> np.ndarray:
    k = profile.knots
    cands = np.concatenate([np.abs(t - k), t + k])
    scale = max(t, float(k[-1]) if k.size else 0.0) or 1.0
    grid = np.geomspace(scale * 1e-3, scale * 1e3, n_grid)
    cands = np.concatenate([cands, grid])
    return np.unique(cands[cands > 0])


def _average(d: int, profile: RadialProfile, t: float, r: float) -> float:
    return offcenter_mass(d, t, r, profile, 1.0) / (unit_ball_volume(d) * r ** d)


def _averages_1d(tab: MassTable, t, r):
    """Exact interval averages of the even extension over [t - r, t + r]."""
    right = tab.between(np.maximum(t - r, 0.0), t + r)
    left = tab.between(0.0, np.maximum(r - t, 0.0))
    # the d = 1 shell masses count both signs; each side is half
    return 0.25 * (right + left) / r


def maximal_value(d: int, profile: RadialProfile, t: float, mode: str = "certified", n_grid: int = 32) -> float:
    """Lower bound (``certified``) or refined estimate (``search``) of Mf at |x| = t."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if mode not in ("certified", "search"):
        raise ValueError(f"unknown mode {mode!r}")
    if profile.is_zero:
        return 0.0
    if _nonintegrable_core(profile, d):
        return math.inf
    if t == 0 and _singular_at_origin(profile):
        return math.inf

    radii = _candidate_radii(profile, t, n_grid)
    if d == 1:
        tab = MassTable(1, profile, 1.0)

        def avg(r):
            return _averages_1d(tab, t, np.asarray(r, dtype=float))
    else:
        def avg(r):
            r = np.atleast_1d(np.asarray(r, dtype=float))
            return np.array([_average(d, profile, t, float(x)) for x in r])

    vals = avg(radii)
    best = float(np.max(vals))
    if mode == "search" and radii.size > 1:
        k = int(np.argmax(vals))
        lr = np.log(radii)
        a, b = lr[max(k - 1, 0)], lr[min(k + 1, radii.size - 1)]
        _, fx = golden_max(lambda u: float(avg(math.exp(u))[()] if d == 1 else avg(math.exp(u))[0]), a, b, tol=1e-9)
        best = max(best, fx)
    if t > 0 and not np.any(np.isclose(profile.knots, t, rtol=0, atol=0)):
        # Lebesgue point: averages over shrinking balls tend to f(t)
        best = max(best, float(evaluate(profile, t)))
    return best


def maximal_envelope(d: int, profile: RadialProfile, ts, mode: str = "certified") -> MaximalEnvelope:
    ts = np.asarray(ts, dtype=float)
    lower = np.array([maximal_value(d, profile, float(t), mode="certified") for t in ts])
    upper = None
    if mode == "search":
        upper = np.array([maximal_value(d, profile, float(t), mode="search") for t in ts])
    return MaximalEnvelope(ts, lower, upper)


# ---------------------------------------------------------------------------
# d = 1 minorant of M f_N


def best_averages_1d(profile: RadialProfile, ts: np.ndarray, window: int = 8, n_grid: int = 8, chunk: int = 4096):
    """Best interval average and its radius for each t, in d = 1.

    Candidate radii are the distances to the ``window`` nearest knots on
    either side of t (and to their mirror images) plus a short log grid.
    Restricting candidates only lowers the result, which stays a valid
    lower bound for Mf.
    """
    ts = np.asarray(ts, dtype=float)
    tab = MassTable(1, profile, 1.0)
    knots = profile.knots
    nk = knots.size
    best = np.zeros(ts.size)
    best_r = np.ones(ts.size)
    offs = np.arange(-window, window + 1)
    for s in range(0, ts.size, chunk):
        t = ts[s:s + chunk]
        pos = np.searchsorted(knots, t)
        idx = np.clip(pos[:, None] + offs[None, :], 0, nk - 1)
        kk = knots[idx]
        scale = np.maximum(t, 1.0)[:, None]
        grid = scale * np.geomspace(0.5, 4.0, n_grid)[None, :]
        R = np.concatenate([np.abs(t[:, None] - kk), t[:, None] + kk, grid], axis=1)
        R = np.where(R > 0, R, np.inf)
        with np.errstate(invalid="ignore", divide="ignore"):
            A = _averages_1d(tab, t[:, None], R)
        A = np.where(np.isfinite(R), A, 0.0)
        j = np.argmax(A, axis=1)
        rows = np.arange(t.size)
        best[s:s + chunk] = A[rows, j]
        best_r[s:s + chunk] = R[rows, j]
    return best, best_r


def _gap_points(a: float, b: float, h0: float = 0.25, ratio: float = 2.0) -> np.ndarray:
    """a, b and geometrically spaced points from both ends toward the middle."""
    half = 0.5 * (b - a)
    steps = []
    h = h0
    while h < half:
        steps.append(h)
        h *= ratio
    steps = np.asarray(steps)
    return np.unique(np.concatenate([[a, b, 0.5 * (a + b)], a + steps, b - steps]))


def probe_minorant(N: int, window: int = 8, tail_factor: float = 4.0) -> RadialProfile:
    """Certified piecewise-constant minorant of M f_N (d = 1).

    On a bump the minorant is 1 (balls inside the bump average to 1).  In a
    gap, the best average found at grid point t_i over [t_i - r_i, t_i + r_i]
    gives, for every t within h of t_i, the bound
        Mf(t) >= 2 r_i avg_i / (2 (r_i + h)),
    because B(t, r_i + h) contains B(t_i, r_i).  Each cell takes the larger
    of the bounds from its two grid ends.
    """
    f = probe_family(N)
    j = np.arange(1, N + 1, dtype=float)
    starts = j * j
    ends = starts + 1.0
    gaps = [(0.0, 1.0)] + [(ends[i], starts[i + 1]) for i in range(N - 1)]
    gaps.append((ends[-1], tail_factor * ends[-1]))
    pts = [_gap_points(a, b) for a, b in gaps]
    counts = [p.size for p in pts]
    allpts = np.concatenate(pts)
    avg, rad = best_averages_1d(f, allpts, window=window)

    lo_l, hi_l, val_l = [], [], []
    off = 0
    for g, (a, b) in enumerate(gaps):
        n = counts[g]
        t = allpts[off:off + n]
        A = avg[off:off + n]
        R = rad[off:off + n]
        off += n
        h = np.diff(t)
        left = A[:-1] * R[:-1] / (R[:-1] + h)
        right = A[1:] * R[1:] / (R[1:] + h)
        lo_l.append(t[:-1])
        hi_l.append(t[1:])
        val_l.append(np.maximum(left, right))
        if g < N:
            lo_l.append(np.array([starts[g]]))
            hi_l.append(np.array([ends[g]]))
            val_l.append(np.array([1.0]))
    lo = np.concatenate(lo_l)
    hi = np.concatenate(hi_l)
    val = np.concatenate(val_l)
    order = np.argsort(lo, kind="stable")
    return RadialProfile(lo[order], hi[order], val[order], np.zeros(lo.size))


@dataclass
class ProbeResult:
    N: int
    q: float
    norm_f: float
    lower_bound_norm_Mf: float
    ratio: float


def maximal_morrey_lower_bound(q: float, N: int, window: int = 8) -> ProbeResult:
    """Exact ||f_N|| in M^1_q(R) and a certified lower bound for ||M f_N||."""
    if not q > 1:
        raise ValueError("need q > 1")
    params = SpaceParams(1, 1.0, q)
    norm_f = exact_norm_1d(params, probe_family(N)).value
    lb = exact_norm_1d(params, probe_minorant(N, window=window)).value
    return ProbeResult(N, q, norm_f, lb, lb / norm_f)
