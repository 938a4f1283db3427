"""The function families used to separate Morrey-type spaces."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import radial
from .radial import RadialProfile, ResourceGuardError


def _check_count(n: int, what: str):
    """Refuse counts whose profile would trip the segment guard, before allocating."""
    if n > radial.MAX_SEGMENTS:
        raise ResourceGuardError(f"{what}={n} exceeds the limit of {radial.MAX_SEGMENTS} segments")


def power_function(d: int, q: float) -> RadialProfile:
    """|x|^(-d/q) on all of R^d."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return RadialProfile.power(d / q)


def staircase_beta(d: int, p1: float, p2: float, q: float) -> float:
    """Midpoint exponent d(p1 + p2) / (2q), strictly between d p1/q and d p2/q."""
    return d * (p1 + p2) / (2.0 * q)


def bounding_profile_g(d: int, beta: float) -> RadialProfile:
    """1 on the unit ball, |x|^-beta outside it."""
    if not 0 < beta < d:
        raise ValueError(f"need 0 < beta < d, got beta={beta}, d={d}")
    return RadialProfile([0.0, 1.0], [1.0, math.inf], [1.0, 1.0], [0.0, beta])


def matched_offsets(d: int, beta: float, K: int) -> np.ndarray:
    """r_k - k for k = 1..K, computed without cancellation.

    The annulus k <= |x| < r_k has the same volume as the mass of g on
    k <= |x| < k+1, which gives
        r_k^d = k^d + d ((k+1)^(d-beta) - k^(d-beta)) / (d - beta).
    """
    if not 0 < beta < d:
        raise ValueError(f"need 0 < beta < d, got beta={beta}, d={d}")
    k = np.arange(1, K + 1, dtype=float)
    e = d - beta
    # ((k+1)^e - k^e) = k^e expm1(e log1p(1/k)); divide by k^d for the relative increment
    x = d / e * np.power(k, e - d) * np.expm1(e * np.log1p(1.0 / k))
    return k * np.expm1(np.log1p(x) / d)


def matched_radii(d: int, beta: float, K: int) -> np.ndarray:
    """Radii r_1..r_K with r_k in (k, k+1)."""
    return np.arange(1, K + 1, dtype=float) + matched_offsets(d, beta, K)


@dataclass(frozen=True)
class Theorem13Spec:
    """Parameters of the staircase indicator separating M^{p2}_q from M^{p1}_q."""

    d: int
    p1: float
    p2: float
    q: float
    K: int
    beta: float = field(init=False)
    matched_radii: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not (1 <= self.p1 < self.p2 < self.q < math.inf):
            raise ValueError(f"need 1 <= p1 < p2 < q, got {self.p1}, {self.p2}, {self.q}")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        _check_count(self.K, "K")
        beta = staircase_beta(self.d, self.p1, self.p2, self.q)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "matched_radii", tuple(matched_radii(self.d, beta, self.K).tolist()))

    @property
    def horizon(self) -> float:
        """Largest radius at which truncation to K annuli is invisible."""
        return self.K / 2.0


def theorem13_function(spec: Theorem13Spec) -> RadialProfile:
    """chi_{B(0,1)} plus the annuli k <= |x| < r_k for k = 1..K.

    The first annulus touches the unit ball, so the two merge into [0, r_1).
    """
    r = np.asarray(spec.matched_radii)
    k = np.arange(1, spec.K + 1, dtype=float)
    lo = np.concatenate([[0.0], k[1:]])
    hi = r.copy()
    return RadialProfile(lo, hi, np.ones(spec.K), np.zeros(spec.K), horizon=spec.horizon)


def section4_function(d: int, q: float, epsilon: float, K: int, p: float = 1.0) -> RadialProfile:
    """chi_{|x| < 1} plus the shells j <= |x| <= j + j^-eps, j = 1..K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    _check_count(K, "K")
    if not 0 < epsilon < d * p / q:
        warnings.warn(
            f"epsilon={epsilon} outside (0, d p / q) = (0, {d * p / q:g})", RuntimeWarning, stacklevel=2
        )
    j = np.arange(1, K + 1, dtype=float)
    widths = np.power(j, -epsilon)
    lo = np.concatenate([[0.0], j[1:]])
    hi = j + widths
    return RadialProfile(lo, hi, np.ones(K), np.zeros(K))


def probe_family(N: int) -> RadialProfile:
    """Unit bumps j^2 <= |x| <= j^2 + 1, j = 1..N (used in d = 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_count(N, "N")
    j = np.arange(1, N + 1, dtype=float)
    return RadialProfile.indicator(np.stack([j * j, j * j + 1.0], axis=1))


maximal_probe_family = probe_family


def ball_indicator(R: float) -> RadialProfile:
    return RadialProfile.indicator([(0.0, R)])
