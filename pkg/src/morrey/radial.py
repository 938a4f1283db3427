"""Radial piecewise-power functions on R^d.

A profile stores f(x) = F(|x|) where F is a finite list of power pieces
``coeff * s**(-exponent)`` on disjoint radius intervals ``[lo, hi)`` and zero
elsewhere.  Everything the norm code needs (masses of |f|^p over centered
balls, superlevel sets, powers) has a closed form on such profiles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .geometry import sphere_area, unit_ball_volume

MAX_SEGMENTS = 10_000_000
LOG_CASE_TOL = 1e-12


class ResourceGuardError(RuntimeError):
    """A construction exceeded the segment budget."""


@dataclass(frozen=True)
class PowerSegment:
    """``coeff * s**(-exponent)`` for ``lo <= s < hi``."""

    lo: float
    hi: float
    coeff: float
    exponent: float = 0.0

    def __post_init__(self):
        if not (self.lo >= 0 and math.isfinite(self.lo)):
            raise ValueError(f"segment lo must be finite and >= 0, got {self.lo}")
        if not self.hi > self.lo:
            raise ValueError(f"segment needs lo < hi, got [{self.lo}, {self.hi})")
        if not (self.coeff >= 0 and math.isfinite(self.coeff)):
            raise ValueError(f"segment coeff must be finite and >= 0, got {self.coeff}")
        if not math.isfinite(self.exponent):
            raise ValueError("segment exponent must be finite")

    def value(self, s: float) -> float:
        if self.lo <= s < self.hi and self.coeff > 0:
            return self.coeff * s ** (-self.exponent)
        return 0.0


class RadialProfile:
    """Immutable ordered collection of power segments.

    ``horizon`` marks a profile that truncates an infinite family (for
    instance the first K annuli of a staircase).  Balls up to that radius see
    exactly the untruncated function; norm code uses it to classify growth
    instead of reading off the artificial finite tail.
    """

    __slots__ = ("lo", "hi", "coeff", "exponent", "horizon", "__dict__")

    def __init__(self, lo, hi, coeff, exponent, horizon: float | None = None):
        lo = np.array(lo, dtype=float).reshape(-1)
        hi = np.array(hi, dtype=float).reshape(-1)
        coeff = np.array(coeff, dtype=float).reshape(-1)
        exponent = np.array(exponent, dtype=float).reshape(-1)
        n = lo.size
        if not (hi.size == coeff.size == exponent.size == n):
            raise ValueError("segment arrays must have equal length")
        if n > MAX_SEGMENTS:
            raise ResourceGuardError(f"{n} segments exceeds the limit of {MAX_SEGMENTS}")
        if n:
            if np.any(~np.isfinite(lo)) or np.any(lo < 0):
                raise ValueError("segment lo must be finite and >= 0")
            if np.any(~(hi > lo)):
                raise ValueError("every segment needs lo < hi")
            if np.any(~np.isfinite(coeff)) or np.any(coeff < 0):
                raise ValueError("coefficients must be finite and >= 0")
            if np.any(~np.isfinite(exponent)):
                raise ValueError("exponents must be finite")
            if np.any(hi[:-1] > lo[1:]):
                raise ValueError("segments must be sorted and non-overlapping")
            if np.any(~np.isfinite(hi[:-1])):
                raise ValueError("only the last segment may extend to infinity")
        if horizon is not None and not horizon > 0:
            raise ValueError("horizon must be positive")
        for arr in (lo, hi, coeff, exponent):
            arr.flags.writeable = False
        self.lo, self.hi, self.coeff, self.exponent = lo, hi, coeff, exponent
        self.horizon = None if horizon is None else float(horizon)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_segments(cls, segments: Iterable[PowerSegment], horizon=None) -> "RadialProfile":
        segs = list(segments)
        return cls(
            [s.lo for s in segs],
            [s.hi for s in segs],
            [s.coeff for s in segs],
            [s.exponent for s in segs],
            horizon=horizon,
        )

    @classmethod
    def power(cls, exponent: float, coeff: float = 1.0, lo: float = 0.0, hi: float = math.inf):
        return cls([lo], [hi], [coeff], [exponent])

    @classmethod
    def indicator(cls, intervals: Sequence[tuple[float, float]], value: float = 1.0, horizon=None):
        """Step profile equal to ``value`` on the given radius intervals."""
        if len(intervals) == 0:
            return cls([], [], [], [], horizon=horizon)
        arr = np.asarray(intervals, dtype=float)
        n = arr.shape[0]
        return cls(arr[:, 0], arr[:, 1], np.full(n, value), np.zeros(n), horizon=horizon)

    @classmethod
    def zero(cls) -> "RadialProfile":
        return cls([], [], [], [])

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return self.lo.size

    def __repr__(self) -> str:
        h = "" if self.horizon is None else f", horizon={self.horizon:g}"
        return f"RadialProfile({len(self)} segments{h})"

    @property
    def segments(self) -> tuple[PowerSegment, ...]:
        return tuple(
            PowerSegment(float(a), float(b), float(c), float(e))
            for a, b, c, e in zip(self.lo, self.hi, self.coeff, self.exponent)
        )

    @cached_property
    def knots(self) -> np.ndarray:
        """Sorted distinct finite positive segment endpoints."""
        pts = np.concatenate([self.lo, self.hi])
        pts = pts[np.isfinite(pts) & (pts > 0)]
        return np.unique(pts)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeff > 0)

    @property
    def is_step(self) -> bool:
        active = self.coeff > 0
        return bool(np.all(self.exponent[active] == 0))

    @property
    def bounded_support(self) -> bool:
        active = self.coeff > 0
        return bool(np.all(np.isfinite(self.hi[active])))

    def indicator_value(self) -> float | None:
        """The common value c if the profile only takes values in {0, c}."""
        active = self.coeff > 0
        if not np.any(active):
            return None
        if np.any(self.exponent[active] != 0):
            return None
        vals = self.coeff[active]
        if np.all(vals == vals[0]):
            return float(vals[0])
        return None

    def dilate(self, lam: float) -> "RadialProfile":
        """Profile of s -> F(s / lam)."""
        if not lam > 0:
            raise ValueError("dilation factor must be positive")
        h = None if self.horizon is None else self.horizon * lam
        return RadialProfile(
            self.lo * lam, self.hi * lam, self.coeff * lam ** self.exponent, self.exponent, horizon=h
        )

    def scaled(self, factor: float) -> "RadialProfile":
        return RadialProfile(self.lo, self.hi, self.coeff * factor, self.exponent, horizon=self.horizon)

    def with_horizon(self, horizon: float | None) -> "RadialProfile":
        return RadialProfile(self.lo, self.hi, self.coeff, self.exponent, horizon=horizon)

    # -- serialization ----------------------------------------------------

    def to_json_obj(self):
        segs = [
            {
                "lo": float(a),
                "hi": None if math.isinf(b) else float(b),
                "coeff": float(c),
                "exponent": float(e),
            }
            for a, b, c, e in zip(self.lo, self.hi, self.coeff, self.exponent)
        ]
        if self.horizon is None:
            return segs
        return {"segments": segs, "horizon": self.horizon}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_obj(), **kw)

    @classmethod
    def from_json_obj(cls, obj) -> "RadialProfile":
        horizon = None
        if isinstance(obj, dict):
            horizon = obj.get("horizon")
            obj = obj["segments"]
        segs = [
            PowerSegment(
                float(s["lo"]),
                math.inf if s.get("hi") is None else float(s["hi"]),
                float(s.get("coeff", 1.0)),
                float(s.get("exponent", 0.0)),
            )
            for s in obj
        ]
        return cls.from_segments(segs, horizon=horizon)

    @classmethod
    def from_json(cls, text: str) -> "RadialProfile":
        return cls.from_json_obj(json.loads(text))


@dataclass(frozen=True)
class AnnularSet:
    """Disjoint sorted radius intervals ``[a_i, b_i)``."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev = -math.inf
        for a, b in self.intervals:
            if not (0 <= a < b):
                raise ValueError(f"bad interval [{a}, {b})")
            if a < prev:
                raise ValueError("intervals must be sorted and disjoint")
            prev = b

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self, d: int) -> float:
        v = unit_ball_volume(d)
        return v * sum(b ** d - a ** d for a, b in self.intervals)

    def to_profile(self, value: float = 1.0) -> RadialProfile:
        return RadialProfile.indicator(self.intervals, value)

    def contains(self, s: float) -> bool:
        return any(a <= s < b for a, b in self.intervals)


# ---------------------------------------------------------------------------
# Evaluation and transforms


def evaluate(profile: RadialProfile, s):
    """Value of the profile at radius ``s`` (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    idx = np.searchsorted(profile.lo, s_arr, side="right") - 1
    out = np.zeros(s_arr.shape)
    if len(profile):
        ok = idx >= 0
        i = np.where(ok, idx, 0)
        inside = ok & (s_arr < profile.hi[i]) & (profile.coeff[i] > 0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = profile.coeff[i] * np.power(s_arr, -profile.exponent[i])
        out = np.where(inside, vals, 0.0)
    return float(out) if np.ndim(s) == 0 else out


def power_map(profile: RadialProfile, p: float) -> RadialProfile:
    """|f|^p as a profile: segment-wise (coeff**p, p * exponent)."""
    if p < 1:
        raise ValueError("power_map expects p >= 1")
    return RadialProfile(
        profile.lo, profile.hi, profile.coeff ** p, profile.exponent * p, horizon=profile.horizon
    )


def superlevel_set(profile: RadialProfile, gamma: float, closed: bool = False) -> AnnularSet:
    """Exact radius set where the profile exceeds ``gamma``.

    ``closed=True`` gives {f >= gamma} instead; the two differ only on
    constant pieces with value exactly gamma.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    lo, hi, c, beta = profile.lo, profile.hi, profile.coeff, profile.exponent
    live = c > 0
    flat = beta == 0
    keep_flat = c >= gamma if closed else c > gamma
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # c s^-beta > gamma  <=>  s < s0 (beta > 0) or s > s0 (beta < 0)
        s0 = np.exp(np.log(c / gamma) / np.where(flat, 1.0, beta))
    a = np.where(flat, lo, np.where(beta > 0, lo, np.maximum(lo, s0)))
    b = np.where(flat, hi, np.where(beta > 0, np.minimum(hi, s0), hi))
    sel = live & np.where(flat, keep_flat, a < b)
    a, b = a[sel], b[sel]
    if a.size == 0:
        return AnnularSet(())
    start = np.concatenate([[True], a[1:] > b[:-1]])
    gs = np.nonzero(start)[0]
    ge = np.concatenate([gs[1:] - 1, [a.size - 1]])
    return AnnularSet(tuple(zip(a[gs].tolist(), b[ge].tolist())))


# ---------------------------------------------------------------------------
# Closed-form masses


def _shell_integral(d, coeff, exponent, a, b, p):
    """omega * int_a^b c^p s^(d-1-p*beta) ds, vectorized, +inf when divergent."""
    coeff, exponent, a, b = np.broadcast_arrays(
        np.asarray(coeff, float), np.asarray(exponent, float), np.asarray(a, float), np.asarray(b, float)
    )
    e = d - p * exponent
    cp = coeff ** p
    out = np.zeros(e.shape)
    live = (b > a) & (cp > 0)
    if not np.any(live):
        return out
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        a_pos = a > 0
        b_inf = np.isinf(b)
        log_case = np.abs(e) < LOG_CASE_TOL
        # log(b/a) via log1p so thin shells far out keep their digits;
        # only meaningful where 0 < a and b finite
        a_safe = np.where(a_pos, a, 1.0)
        lr = np.log1p((np.where(b_inf, a_safe, b) - a_safe) / a_safe)
        # generic: a^e * expm1(e * log(b/a)) / e
        generic = np.power(np.where(a_pos, a, 1.0), e) * np.expm1(e * lr) / np.where(log_case, 1.0, e)
        from_zero = np.power(np.where(b_inf, 1.0, b), e) / np.where(log_case, 1.0, e)
        to_inf = -np.power(np.where(a_pos, a, 1.0), e) / np.where(log_case, 1.0, e)
        val = np.where(a_pos, np.where(b_inf, to_inf, generic), from_zero)
        val = np.where(log_case, lr, val)
        diverge = (~a_pos & (e <= LOG_CASE_TOL)) | (b_inf & (e >= -LOG_CASE_TOL))
        val = np.where(diverge, np.inf, val)
        res = sphere_area(d) * cp * val
    return np.where(live, res, 0.0)


def segment_mass(d: int, segment: PowerSegment, a: float, b: float, p: float) -> float:
    """Integral of |f|^p over the shell a <= |x| < b, restricted to the segment."""
    if not 0 <= a <= b:
        raise ValueError("segment_mass needs 0 <= a <= b")
    lo = max(a, segment.lo)
    hi = min(b, segment.hi)
    if hi <= lo:
        return 0.0
    return float(_shell_integral(d, segment.coeff, segment.exponent, lo, hi, p))


class MassTable:
    """Prefix sums of |f|^p masses at segment boundaries.

    Lets ``mass(r)`` be evaluated for many radii at once; this is the
    workhorse behind every centered computation.
    """

    def __init__(self, d: int, profile: RadialProfile, p: float):
        self.d, self.profile, self.p = d, profile, p
        full = _shell_integral(d, profile.coeff, profile.exponent, profile.lo, profile.hi, p)
        self.full = full
        self.cum = np.concatenate([[0.0], np.cumsum(full)])

    def mass(self, r):
        """Mass of |f|^p over B(0, r); scalar or array input."""
        prof = self.profile
        r_arr = np.asarray(r, dtype=float)
        if len(prof) == 0:
            out = np.zeros(r_arr.shape)
        else:
            idx = np.searchsorted(prof.lo, r_arr, side="right") - 1
            i = np.clip(idx, 0, None)
            top = np.minimum(r_arr, prof.hi[i])
            part = _shell_integral(self.d, prof.coeff[i], prof.exponent[i], prof.lo[i], top, self.p)
            out = np.where(idx >= 0, self.cum[i] + part, 0.0)
        return float(out) if np.ndim(r) == 0 else out

    def between(self, a, b):
        """Mass over the shell a <= |x| < b (vectorized over a, b)."""
        return self.mass(b) - self.mass(a)

    @property
    def total(self) -> float:
        return float(self.cum[-1])


def centered_mass(d: int, profile: RadialProfile, p: float, r):
    """Integral of |f|^p over B(0, r), exact."""
    if np.any(np.asarray(r) <= 0):
        raise ValueError("radius must be positive")
    return MassTable(d, profile, p).mass(r)


def shell_mass(d: int, profile: RadialProfile, p: float, a: float, b: float) -> float:
    """Integral of |f|^p over a <= |x| < b, summed segment by segment."""
    if not 0 <= a <= b:
        raise ValueError("shell_mass needs 0 <= a <= b")
    if b == a or len(profile) == 0:
        return 0.0
    lo = np.maximum(profile.lo, a)
    hi = np.minimum(profile.hi, b)
    return float(np.sum(_shell_integral(d, profile.coeff, profile.exponent, lo, hi, p)))


__all__ = [
    "AnnularSet",
    "MassTable",
    "PowerSegment",
    "RadialProfile",
    "ResourceGuardError",
    "centered_mass",
    "evaluate",
    "power_map",
    "segment_mass",
    "shell_mass",
    "superlevel_set",
    "unit_ball_volume",
]
