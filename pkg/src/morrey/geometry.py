"""Dimensional constants and ball/sphere intersection kernels."""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

COS_TOL = 1e-12


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class DimensionConstants:
    d: int
    v_d: float
    omega: float


def _check_dim(d) -> int:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if d > 170:
        raise ValueError("dimensions above 170 are not supported")
    return int(d)


@lru_cache(maxsize=None)
def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in R^d."""
    d = _check_dim(d)
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1))


def sphere_area(d: int) -> float:
    """Surface measure of S^{d-1}; equals d * v_d (2 when d = 1)."""
    return d * unit_ball_volume(d)


def dimension_constants(d: int) -> DimensionConstants:
    v = unit_ball_volume(d)
    return DimensionConstants(int(d), v, d * v)


def ball_volume(d: int, r):
    return unit_ball_volume(d) * np.power(r, d)


def cap_fraction(d: int, cos_theta: float) -> float:
    """Fraction of S^{d-1} within angle arccos(cos_theta) of a pole.

    For d >= 2 the cap of half-angle theta <= pi/2 has normalized area
    I_{sin^2 theta}((d-1)/2, 1/2) / 2; larger caps use the complement.
    Near the equator the same quantity is written as
    (1 - I_{cos^2 theta}(1/2, (d-1)/2)) / 2, which avoids evaluating the
    incomplete beta function next to its square-root endpoint.
    """
    d = _check_dim(d)
    c = float(cos_theta)
    if not (-1 - COS_TOL <= c <= 1 + COS_TOL):
        raise ValueError(f"cos_theta={c} outside [-1, 1]")
    c = min(1.0, max(-1.0, c))
    if c == 1.0:
        return 0.0
    if c == -1.0:
        return 1.0
    if d == 1:
        return 0.5
    a = 0.5 * (d - 1)
    if c * c < 0.5:
        # distance from the equator, measured by the polar band |cos| < |c|
        band = 0.5 * special.betainc(0.5, a, c * c)
        return float(0.5 - band if c >= 0 else 0.5 + band)
    half = 0.5 * special.betainc(a, 0.5, (1.0 - c) * (1.0 + c))
    return float(half if c >= 0 else 1.0 - half)


def shell_in_ball_fraction(d: int, t: float, r: float, s: float) -> float:
    """Fraction of the sphere {|y| = s} lying inside B(x, r), |x| = t."""
    d = _check_dim(d)
    if not (t >= 0 and r > 0 and s > 0) or not all(map(math.isfinite, (t, r, s))):
        raise ValueError("need finite t >= 0, r > 0, s > 0")
    if d == 1:
        # the sphere is {s, -s}; the ball is the open interval (t - r, t + r)
        inside = (t - r < s < t + r) + (t - r < -s < t + r)
        return inside / 2
    if t == 0:
        return 1.0 if s < r else 0.0
    if s <= r - t:
        return 1.0
    if s >= r + t or s <= t - r:
        return 0.0
    cstar = (t * t + (s - r) * (s + r)) / (2 * t * s)
    return cap_fraction(d, min(1.0, max(-1.0, cstar)))


def offcenter_mass(d: int, t: float, r: float, profile, p: float = 1.0, rtol: float = 1e-8) -> float:
    """Integral of |f|^p over B(x, r) with |x| = t, for a radial profile.

    The part of the ball inside the sphere of radius r - t is a centered
    ball and is integrated in closed form; the transition shells between
    |r - t| and r + t go through adaptive quadrature, one profile piece at a
    time so every integrand is smooth.  d = 1 is exact.
    """
    from .radial import PowerSegment, RadialProfile, shell_mass

    if isinstance(profile, PowerSegment):
        profile = RadialProfile.from_segments([profile])
    d = _check_dim(d)
    if not (t >= 0 and r > 0):
        raise ValueError("need t >= 0 and r > 0")

    if d == 1:
        right = shell_mass(1, profile, p, max(0.0, t - r), t + r)
        left = shell_mass(1, profile, p, 0.0, max(0.0, r - t))
        return 0.5 * (right + left)
    if t == 0:
        return shell_mass(d, profile, p, 0.0, r)

    inner = shell_mass(d, profile, p, 0.0, max(0.0, r - t))
    if math.isinf(inner):
        return math.inf
    a, b = abs(r - t), r + t
    omega = sphere_area(d)
    # the full transition shells bound their in-ball part
    scale = inner + shell_mass(d, profile, p, a, b)
    total = inner
    for lo, hi, c, beta in zip(profile.lo, profile.hi, profile.coeff, profile.exponent):
        lo_, hi_ = max(lo, a), min(hi, b)
        if hi_ <= lo_ or c <= 0:
            continue
        e = d - 1 - p * beta
        if lo_ == 0 and e <= -1:
            return math.inf
        cp = c ** p
        loose = rtol * scale / (omega * cp) if math.isfinite(scale) else 0.0

        def kernel(s, e=e):
            return shell_in_ball_fraction(d, t, r, s) * s ** e

        def run(epsabs):
            if lo_ == 0:
                # algebraic endpoint singularity s^e at the origin (t == r)
                return integrate.quad(
                    lambda s: shell_in_ball_fraction(d, t, r, s) if s > 0 else 0.5,
                    lo_, hi_, weight="alg", wvar=(e, 0.0), epsabs=epsabs, epsrel=rtol, limit=200,
                )[0]
            return integrate.quad(kernel, lo_, hi_, epsabs=epsabs, epsrel=rtol, limit=200)[0]

        if hi_ - lo_ <= 64 * sys.float_info.epsilon * hi_:
            # a piece a few ulps wide (clipping roundoff); the midpoint rule is exact to that width
            total += omega * cp * kernel(0.5 * (lo_ + hi_)) * (hi_ - lo_)
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val = run(0.0)
            except integrate.IntegrationWarning:
                # a thin shell whose contribution is tiny next to the ball's
                # mass can stall on roundoff; accept rtol relative to that mass
                try:
                    val = run(loose)
                except integrate.IntegrationWarning as exc:
                    raise QuadratureError(f"quadrature failed on [{lo_}, {hi_}]: {exc}") from exc
        total += omega * cp * val
    return total
