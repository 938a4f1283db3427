"""Morrey norms and weak Morrey quasi-norms of radial profiles.

The reported strong norm is the supremum over centered balls.  Off-center
balls are checked separately by :func:`offcenter_audit`; in d = 1 the true
supremum over all intervals is available through :func:`exact_norm_1d`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .geometry import offcenter_mass, sphere_area, unit_ball_volume
from .interval1d import interval_sup
from .optimize import golden_max, grid_golden_max, loglog_fit, offset_power_fit, PowerFit
from .radial import LOG_CASE_TOL, AnnularSet, MassTable, RadialProfile, evaluate, superlevel_set

EXP_TOL = 1e-12
GROWTH_TOL = 1e-2
TIE_RTOL = 1e-12
AUDIT_RTOL = 1e-3

FINITE = "finite"
INFINITE = "infinite"
R_TO_ZERO = "r->0"
R_TO_INF = "r->inf"
CORE = "nonintegrable-core"
LEVEL = "level-limit"


@dataclass(frozen=True)
class SpaceParams:
    """Identifies M^p_q(R^d) (or its weak counterpart)."""

    d: int
    p: float
    q: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if not (1 <= self.p <= self.q < math.inf):
            raise ValueError(f"need 1 <= p <= q < inf, got p={self.p}, q={self.q}")

    @property
    def ball_exponent(self) -> float:
        """Exponent of |B| in the local norm: 1/q - 1/p."""
        return 1.0 / self.q - 1.0 / self.p


@dataclass
class NormVerdict:
    kind: str
    value: float | None = None
    witness: Any = None
    regime: str | None = None
    growth: float | None = None
    log_growth: bool = False
    audit: dict | None = field(default=None, compare=False)

    @property
    def finite(self) -> bool:
        return self.kind == FINITE

    def as_float(self) -> float:
        return self.value if self.finite else math.inf

    def to_json_obj(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.finite:
            out["value"] = self.value
        if self.witness is not None:
            w = self.witness
            out["witness"] = list(w) if isinstance(w, tuple) else w
            if isinstance(out["witness"], float) and math.isinf(out["witness"]):
                out["witness"] = "inf"
        if not self.finite:
            out["regime"] = self.regime
            out["growth"] = self.growth
            if self.log_growth:
                out["log"] = True
        if self.audit is not None:
            out["audit"] = self.audit
        return out


def _finite(value, witness) -> NormVerdict:
    return NormVerdict(FINITE, float(value), witness)


def _infinite(regime, growth=None, log_growth=False) -> NormVerdict:
    return NormVerdict(INFINITE, None, None, regime, None if growth is None else float(growth), log_growth)


# ---------------------------------------------------------------------------
# Centered local norm


def _phi(params: SpaceParams, r, mass):
    """(v_d r^d)^(1/q - 1/p) * mass^(1/p), vectorized."""
    v = unit_ball_volume(params.d)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.power(v * np.power(r, params.d), params.ball_exponent) * np.power(mass, 1.0 / params.p)


def _last_active(profile: RadialProfile):
    active = np.nonzero(profile.coeff > 0)[0]
    return (int(active[0]), int(active[-1])) if active.size else (None, None)


def _tail_limit(params: SpaceParams, profile: RadialProfile, tab: MassTable) -> float:
    """lim_{r -> inf} of the centered local norm (inf when it diverges)."""
    d, p, q = params.d, params.p, params.q
    _, last = _last_active(profile)
    if last is None:
        return 0.0
    if math.isinf(profile.hi[last]):
        e = d - p * profile.exponent[last]
        e_inf = d / q - d / p + max(e, 0.0) / p
        if e_inf > EXP_TOL or (abs(e) < LOG_CASE_TOL and p == q):
            return math.inf
        if e > LOG_CASE_TOL and abs(e_inf) <= EXP_TOL:
            # mass ~ (omega c^p / e) r^e and the ball factor cancels the growth exactly
            amp = sphere_area(d) * profile.coeff[last] ** p / e
            return float(unit_ball_volume(d) ** params.ball_exponent * amp ** (1.0 / p))
        if e < -LOG_CASE_TOL and p == q:
            return tab.total ** (1.0 / p)
        return 0.0
    return tab.total ** (1.0 / p) if p == q else 0.0


def local_norm(params: SpaceParams, profile: RadialProfile, r):
    """|B(0,r)|^(1/q - 1/p) (int_{B(0,r)} |f|^p)^(1/p); r may be an array or inf."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("radius must be positive")
    tab = MassTable(params.d, profile, params.p)
    fin = np.isfinite(r_arr)
    out = np.empty(r_arr.shape)
    out[fin] = _phi(params, r_arr[fin], tab.mass(r_arr[fin]))
    if np.any(~fin):
        out[~fin] = _tail_limit(params, profile, tab)
    return float(out) if np.ndim(r) == 0 else out


# ---------------------------------------------------------------------------
# Growth exponents


def growth_exponent_fit(
    params: SpaceParams,
    profile: RadialProfile,
    r_lo: float,
    r_hi: float,
    n_samples: int = 128,
    model: str = "loglog",
):
    """Growth exponent of r -> local_norm(r) on [r_lo, r_hi].

    ``model="loglog"`` is the plain least-squares line through
    (log r, log local_norm).  ``model="offset"`` fits the centered mass as
    A r^e + B before converting e to the local-norm exponent
    d/q - d/p + e/p; the constant B absorbs the mass of the core, which
    biases the plain slope on moderate ranges.
    """
    if not 0 < r_lo < r_hi:
        raise ValueError("need 0 < r_lo < r_hi")
    rs = np.geomspace(r_lo, r_hi, n_samples)
    tab = MassTable(params.d, profile, params.p)
    mass = tab.mass(rs)
    vals = _phi(params, rs, mass)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        raise ValueError("local norm is infinite or zero somewhere on the fit range")
    if model == "loglog":
        return loglog_fit(rs, vals)
    if model == "offset":
        d, p, q = params.d, params.p, params.q
        fit = offset_power_fit(rs, mass)
        slope = d / q - d / p + fit.exponent / p
        return PowerFit(slope, math.log(max(fit.amplitude, 1e-300)) / p, fit.max_rel_residual)
    raise ValueError(f"unknown fit model {model!r}")


def horizon_growth(params: SpaceParams, profile: RadialProfile, n_samples: int = 128) -> float:
    """Growth exponent over the top decades below a profile's horizon."""
    h = profile.horizon
    knots = profile.knots
    lo = max(h / 512.0, float(knots[0]) if knots.size else h / 512.0)
    lo = min(lo, h / 4.0)
    return growth_exponent_fit(params, profile, lo, h, n_samples, model="offset").slope


# ---------------------------------------------------------------------------
# Sup over centered balls


def _pick(cands: list[tuple[float, float]]):
    """Largest value; ties broken toward the smaller radius."""
    vmax = max(v for _, v in cands)
    thresh = vmax - TIE_RTOL * abs(vmax)
    return min(r for r, v in cands if v >= thresh)


def centered_norm(
    params: SpaceParams,
    profile: RadialProfile,
    n_grid: int = 64,
    tol: float = 1e-10,
    growth_tol: float = GROWTH_TOL,
) -> NormVerdict:
    """Supremum over r > 0 of the centered local norm.

    Divergence is classified from the power structure of the first and last
    pieces; a profile with a horizon is classified by its fitted growth
    below the horizon.  Otherwise every inter-knot interval is maximized by
    a log-grid bracket plus golden search in log r, and the unbounded last
    interval is handled in closed form.
    """
    d, p, q = params.d, params.p, params.q
    first, last = _last_active(profile)
    if first is None:
        return _finite(0.0, 1.0)
    tab = MassTable(d, profile, p)

    # behaviour as r -> 0
    core = profile.lo[first] == 0.0
    alpha0 = None
    if core:
        beta0 = profile.exponent[first]
        if d - p * beta0 <= LOG_CASE_TOL:
            return _infinite(CORE, d - p * beta0)
        alpha0 = d / q - beta0
        if alpha0 < -EXP_TOL:
            return _infinite(R_TO_ZERO, alpha0)

    # behaviour as r -> inf
    horizon = profile.horizon
    if horizon is not None:
        g = horizon_growth(params, profile)
        if g > growth_tol:
            return _infinite(R_TO_INF, g)
    elif math.isinf(profile.hi[last]):
        e = d - p * profile.exponent[last]
        e_inf = d / q - d / p + max(e, 0.0) / p
        is_log = abs(e) < LOG_CASE_TOL
        if e_inf > EXP_TOL:
            return _infinite(R_TO_INF, e_inf)
        if is_log and p == q:
            return _infinite(R_TO_INF, 0.0, log_growth=True)

    knots = profile.knots
    if horizon is not None:
        knots = np.unique(np.concatenate([knots[knots < horizon], [horizon]]))

    cands: list[tuple[float, float]] = []
    if knots.size == 0:
        # a single pure power on (0, inf) with zero exponent: constant local norm
        return _finite(local_norm(params, profile, 1.0), 1.0)
    if core:
        # pure power on (0, k0]: C r^alpha0 with alpha0 >= 0, maximal at k0
        cands.append((float(knots[0]), float(_phi(params, knots[0], tab.mass(knots[0])))))

    if knots.size > 1:
        lo = np.log(knots[:-1])
        hi = np.log(knots[1:])

        def f(u):
            r = np.exp(u)
            return _phi(params, r, tab.mass(r))

        xs, fs = grid_golden_max(f, lo, hi, n_grid=n_grid, tol=tol)
        k = int(np.argmax(fs))
        cands.extend(zip(np.exp(xs).tolist(), fs.tolist()))
        # knot values themselves (exact endpoints of the brackets)
        cands.extend(zip(knots.tolist(), f(np.log(knots)).tolist()))
    else:
        cands.append((float(knots[0]), float(_phi(params, knots[0], tab.mass(knots[0])))))

    if horizon is None:
        cands.extend(_last_interval_candidates(params, profile, tab, float(knots[-1])))

    r_best = _pick(cands)
    return _finite(local_norm(params, profile, r_best), r_best)


def _last_interval_candidates(params, profile, tab, k_last):
    """Closed-form maximization of the local norm on [k_last, inf).

    There the p-th power of the local norm is proportional to
    r^g (A + B r^e) (or r^g (A + B log r)) with g = d(p/q - 1), which has
    at most one stationary point.
    """
    d, p, q = params.d, params.p, params.q
    g = d * (p / q - 1.0)
    out = []
    _, last = _last_active(profile)
    m_k = tab.mass(k_last)
    if math.isinf(profile.hi[last]) and profile.lo[last] <= k_last:
        c = profile.coeff[last]
        e = d - p * profile.exponent[last]
        omega_c = sphere_area(d) * c ** p
        if abs(e) < LOG_CASE_TOL:
            B = omega_c
            A = m_k - B * math.log(k_last)
            if g != 0.0:
                ln_r = -(B + g * A) / (g * B)
                if ln_r > math.log(k_last) and ln_r < 700:
                    out.append(math.exp(ln_r))
        else:
            B = omega_c / e
            A = m_k - B * k_last ** e
            if g + e != 0.0:
                ratio = -g * A / ((g + e) * B)
                if ratio > 0:
                    log_r = math.log(ratio) / e
                    if math.log(k_last) < log_r < 700:
                        out.append(math.exp(log_r))
    cands = [(r, float(_phi(params, r, tab.mass(r)))) for r in out]
    limit = _tail_limit(params, profile, tab)
    if limit > 0:
        cands.append((math.inf, limit))
    return cands


# ---------------------------------------------------------------------------
# Weak quasi-norm


def _indicator_sup(params: SpaceParams, intervals, horizon: float | None = None):
    """Centered Morrey norm of the indicator of an annular set.

    On a set interval the local norm is increasing in r and on a gap it is
    nonincreasing, so the supremum sits at a right endpoint.
    """
    if len(intervals) == 0:
        return 0.0, 1.0
    arr = np.asarray(intervals, dtype=float)
    a, b = arr[:, 0], arr[:, 1]
    if horizon is not None:
        keep = a < horizon
        a, b = a[keep], np.minimum(b[keep], horizon)
        if a.size == 0:
            return 0.0, 1.0
    if np.isinf(b[-1]):
        return math.inf, math.inf
    v = unit_ball_volume(params.d)
    d = params.d
    pieces = v * (b ** d - a ** d)
    mass = np.cumsum(pieces)
    vals = _phi(params, b, mass)
    k = int(np.argmax(vals))
    return float(vals[k]), float(b[k])


def _level_norm(params, profile, gamma):
    """gamma * ||chi_{|f| >= gamma}||, the left limit of the weak-norm integrand.

    Truncated profiles go through :func:`centered_norm` so that growth up to
    the horizon is classified; a divergent level set gives +inf.
    """
    E = superlevel_set(profile, gamma, closed=True)
    if profile.horizon is not None and not E.is_empty:
        v = centered_norm(params, RadialProfile.indicator(E.intervals, horizon=profile.horizon))
        return gamma * v.as_float()
    val, _ = _indicator_sup(params, E.intervals, profile.horizon)
    return gamma * val


def _value_range(profile, i, s_floor, s_ceil):
    lo, hi = profile.lo[i], profile.hi[i]
    lo_eff = lo if lo > 0 else s_floor
    hi_eff = hi if math.isfinite(hi) else s_ceil
    if hi_eff <= lo_eff:
        hi_eff = lo_eff * 2.0
    c, beta = profile.coeff[i], profile.exponent[i]
    v1 = c * lo_eff ** (-beta)
    v2 = c * hi_eff ** (-beta)
    return min(v1, v2), max(v1, v2)


def weak_norm(
    params: SpaceParams,
    profile: RadialProfile,
    n_interior: int = 32,
    n_refine: int = 3,
    general: bool = False,
    audit: bool = False,
    audit_seed: int = 0,
) -> NormVerdict:
    """sup over gamma > 0 of gamma * ||chi_{|f| > gamma}||_{M^p_q} (centered).

    Indicator-valued profiles take a fast path (c times the norm of the
    support) unless ``general`` is set.  Otherwise candidate levels are all
    segment end values plus log-spaced interior values per segment, the best
    few are refined by golden search in log gamma, and the ends of the
    level range are classified in closed form.
    """
    d, p, q = params.d, params.p, params.q
    first, last = _last_active(profile)
    if first is None:
        return _finite(0.0, 1.0)

    c_ind = profile.indicator_value()
    if c_ind is not None and not general:
        support = RadialProfile(
            profile.lo[profile.coeff > 0],
            profile.hi[profile.coeff > 0],
            np.ones(int(np.sum(profile.coeff > 0))),
            np.zeros(int(np.sum(profile.coeff > 0))),
            horizon=profile.horizon,
        )
        strong = centered_norm(params, support)
        if strong.finite:
            out = _finite(c_ind * strong.value, c_ind)
        else:
            out = _infinite(strong.regime, strong.growth, strong.log_growth)
        if audit and out.finite:
            out.audit = offcenter_audit(params, support.scaled(c_ind), seed=audit_seed).to_json_obj()
        return out

    active = np.nonzero(profile.coeff > 0)[0]
    # unbounded level ranges
    for i in active:
        beta = profile.exponent[i]
        if profile.lo[i] == 0 and beta > 0:
            a_exp = 1.0 - d / (beta * q)
            if a_exp > EXP_TOL:
                return _infinite(LEVEL, a_exp)
        if math.isinf(profile.hi[i]):
            if beta <= 0:
                return _infinite(R_TO_INF, d / q)
            a_exp = 1.0 - d / (beta * q)
            if a_exp < -EXP_TOL:
                return _infinite(LEVEL, a_exp)

    knots = profile.knots
    s_floor = (knots[0] if knots.size else 1.0) * 1e-4
    s_ceil = (knots[-1] if knots.size else 1.0) * 1e4

    levels = set()
    for i in active:
        vmin, vmax = _value_range(profile, i, s_floor, s_ceil)
        levels.update((vmin, vmax))
        if vmax > vmin and profile.exponent[i] != 0:
            levels.update(np.geomspace(vmin, vmax, n_interior + 2)[1:-1].tolist())
    gam = np.array(sorted(levels))
    vals = np.array([_level_norm(params, profile, g) for g in gam])
    if np.any(np.isinf(vals)):
        k = int(np.argmax(np.isinf(vals)))
        E = superlevel_set(profile, float(gam[k]), closed=True)
        level_set = RadialProfile.indicator(E.intervals, horizon=profile.horizon)
        return _infinite(R_TO_INF, horizon_growth(params, level_set))

    cands = list(zip(gam.tolist(), vals.tolist()))
    order = np.argsort(-vals, kind="stable")[:n_refine]
    lg = np.log(gam)
    for k in order:
        a = lg[max(k - 1, 0)]
        b = lg[min(k + 1, gam.size - 1)]
        if b <= a:
            continue
        x, fx = golden_max(lambda u: _level_norm(params, profile, math.exp(u)), a, b, tol=1e-12 * (b - a))
        cands.append((math.exp(x), fx))

    # gamma -> 0 limit of a tail with beta = d/q
    if math.isinf(profile.hi[last]) and profile.exponent[last] > 0:
        cands.append((0.0, profile.coeff[last] * unit_ball_volume(d) ** (1.0 / q)))

    vmax = max(v for _, v in cands)
    thresh = vmax - TIE_RTOL * abs(vmax)
    g_best = max(g for g, v in cands if v >= thresh)
    out = _finite(vmax if g_best == 0.0 else _level_norm(params, profile, g_best), g_best)
    if audit:
        E = superlevel_set(profile, g_best, closed=True) if g_best > 0 else None
        if E is not None and not E.is_empty:
            out.audit = offcenter_audit(params, E.to_profile(g_best), seed=audit_seed).to_json_obj()
    return out


# ---------------------------------------------------------------------------
# Off-center audit


@dataclass
class AuditResult:
    max_value: float
    centered_value: float
    flag: bool
    witness: tuple[float, float]
    n_samples: int

    def to_json_obj(self) -> dict:
        return asdict(self)


def offcenter_local_norm(params: SpaceParams, profile: RadialProfile, t: float, r: float, rtol: float = 1e-8):
    m = offcenter_mass(params.d, t, r, profile, params.p, rtol=rtol)
    return float(_phi(params, r, m))


def _audit_samples(profile: RadialProfile, n_centers: int, n_radii: int, rng):
    knots = profile.knots
    if profile.horizon is not None:
        knots = knots[knots <= profile.horizon]
    if knots.size == 0:
        k_lo, k_hi, gap = 1e-2, 1e2, 1e-2
    else:
        k_lo, k_hi = float(knots[0]), float(knots[-1])
        gap = float(np.min(np.diff(knots))) if knots.size > 1 else k_lo
    t_lo, t_hi = k_lo / 4.0, 2.0 * k_hi
    n_log = n_centers - n_centers // 2
    ts = list(np.exp(rng.uniform(math.log(t_lo), math.log(t_hi), n_log)))
    # the rest sit inside randomly chosen finite pieces of the support
    fin = np.nonzero((profile.coeff > 0) & np.isfinite(profile.hi))[0]
    for _ in range(n_centers - n_log):
        if fin.size:
            i = fin[rng.integers(fin.size)]
            ts.append(profile.lo[i] + rng.uniform() * (profile.hi[i] - profile.lo[i]))
        else:
            ts.append(math.exp(rng.uniform(math.log(t_lo), math.log(t_hi))))
    r_lo, r_hi = gap / 4.0, 2.0 * k_hi
    rs = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), n_radii))
    return np.asarray(ts, dtype=float), rs


def offcenter_audit(
    params: SpaceParams,
    profile: RadialProfile,
    n_centers: int = 32,
    n_radii: int = 32,
    seed: int = 0,
    centered: NormVerdict | None = None,
    rtol: float = 1e-8,
) -> AuditResult:
    """Largest sampled off-center local norm versus the centered supremum.

    Samples n_centers x n_radii balls B(x, r) with |x| = t: centers are half
    log-uniform over the knot range and half inside random support pieces,
    radii are log-uniform from a quarter of the smallest knot gap up to twice
    the largest knot.  ``flag`` is set when some ball beats the centered
    value by more than the relative quadrature slack.
    """
    rng = np.random.default_rng(seed)
    if centered is None:
        centered = centered_norm(params, profile)
    ts, rs = _audit_samples(profile, n_centers, n_radii, rng)
    best, wit = -math.inf, (0.0, 1.0)
    h = profile.horizon
    n_eval = 0
    for t in ts:
        for r in rs:
            if h is not None and t + r > h:
                continue
            n_eval += 1
            val = offcenter_local_norm(params, profile, float(t), float(r), rtol=rtol)
            if val > best:
                best, wit = val, (float(t), float(r))
    cval = centered.as_float()
    flag = bool(math.isfinite(cval) and best > cval * (1.0 + AUDIT_RTOL))
    return AuditResult(float(best), float(cval), flag, wit, n_eval)


# ---------------------------------------------------------------------------
# Exact d = 1


def exact_norm_1d(params: SpaceParams, profile: RadialProfile, rtol: float = 1e-10) -> NormVerdict:
    """True supremum over all intervals for a step profile on R (d = 1)."""
    if params.d != 1:
        raise ValueError("exact_norm_1d is only defined for d = 1")
    if not profile.is_step:
        raise ValueError("exact_norm_1d needs a piecewise-constant profile")
    first, last = _last_active(profile)
    if first is None:
        return _finite(0.0, (0.0, 1.0))
    if math.isinf(profile.hi[last]):
        return _infinite(R_TO_INF, 1.0 / params.q)
    value, ball, _ = interval_sup(profile, params.p, params.q, rtol=rtol)
    return _finite(value, ball)


def step_weak_norm_bounds(params: SpaceParams, profile: RadialProfile, ratio: float = 1.01) -> tuple[float, float]:
    """Lower and upper bounds for the weak quasi-norm of a large step profile.

    Uses a geometric level grid g_0 < ... < g_J from the smallest to the
    largest value.  With N(g) the norm of the indicator of {f >= g}, every
    g_j N(g_j) is attained as a left limit, and for gamma in (g_j, g_{j+1}]
    monotonicity of the level sets gives gamma ||chi_{f > gamma}|| <=
    g_{j+1} N(g_j).  Cost is O(n) per level instead of one pass per
    distinct value.
    """
    if not profile.is_step:
        raise ValueError("step_weak_norm_bounds needs a piecewise-constant profile")
    if not ratio > 1:
        raise ValueError("ratio must exceed 1")
    live = profile.coeff > 0
    if not np.any(live):
        return 0.0, 0.0
    lo, hi, c = profile.lo[live], profile.hi[live], profile.coeff[live]
    if np.isinf(hi[-1]):
        return math.inf, math.inf
    cmin, cmax = float(c.min()), float(c.max())
    n = max(int(math.ceil(math.log(cmax / cmin) / math.log(ratio))), 1)
    levels = np.unique(np.concatenate([cmin * ratio ** np.arange(n), [cmax]]))
    norms = np.empty(levels.size)
    for k, g in enumerate(levels):
        m = c >= g
        norms[k], _ = _indicator_sup(params, np.stack([lo[m], hi[m]], axis=1), profile.horizon)
    lower = float(np.max(levels * norms))
    upper = float(max(np.max(levels[1:] * norms[:-1], initial=0.0), levels[0] * norms[0], levels[-1] * norms[-1]))
    return lower, upper
