import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morrey.geometry import (
    ball_volume,
    cap_fraction,
    dimension_constants,
    offcenter_mass,
    shell_in_ball_fraction,
    sphere_area,
    unit_ball_volume,
)
from morrey.radial import RadialProfile, centered_mass

# Independent oracle: polar quadrature about the ball center with explicit
# angular breakpoints where |x| crosses a knot (see test_offcenter_mass_oracle).
PROFILE = RadialProfile([0, 2, 3], [1, 2.5, 5], [1, 1, 1.5], [0, 0, 0.5])
OFFCENTER_ORACLE = {
    (2, 2.2, 1.7): 4.226884292122669,
    (2, 0.5, 3.0): 12.724060447257884,
    (2, 4.0, 0.6): 0.8488299563705441,
    (3, 2.2, 1.7): 9.478441712391655,
    (3, 0.5, 3.0): 48.010676792401846,
    (3, 4.0, 0.6): 0.6782011518272578,
}


@pytest.mark.parametrize("d,expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)])
def test_unit_ball_volume_low_dimensions(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("d", range(1, 12))
def test_unit_ball_volume_gamma_formula(d):
    assert unit_ball_volume(d) == pytest.approx(math.pi ** (d / 2) / math.gamma(d / 2 + 1), rel=1e-14)
    assert sphere_area(d) == pytest.approx(d * unit_ball_volume(d), rel=1e-15)
    c = dimension_constants(d)
    assert c.omega == pytest.approx(d * c.v_d)


def test_ball_volume_scales():
    assert ball_volume(3, 2.0) == pytest.approx(8 * unit_ball_volume(3))


@pytest.mark.parametrize("d", [0, -1, 2.5])
def test_bad_dimension(d):
    with pytest.raises(ValueError):
        unit_ball_volume(d)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_cap_degenerate(d):
    assert cap_fraction(d, 1.0) == 0.0
    assert cap_fraction(d, -1.0) == 1.0


@given(st.floats(-1.0, 1.0))
def test_cap_on_two_sphere_is_linear(c):
    assert cap_fraction(3, c) == pytest.approx((1 - c) / 2, abs=1e-13)


def test_cap_circle_is_arc_length():
    for c in np.linspace(-0.99, 0.99, 21):
        assert cap_fraction(2, c) == pytest.approx(math.acos(c) / math.pi, abs=1e-13)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_cap_matches_angular_quadrature(d):
    from scipy import integrate

    norm = integrate.quad(lambda a: math.sin(a) ** (d - 2), 0, math.pi)[0]
    for c in (-0.7, -0.1, 0.3, 0.9):
        want = integrate.quad(lambda a: math.sin(a) ** (d - 2), 0, math.acos(c))[0] / norm
        assert cap_fraction(d, c) == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cap_monte_carlo(d):
    rng = np.random.default_rng(d)
    x = rng.standard_normal((200_000, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    for c in (-0.5, 0.2, 0.8):
        frac = np.mean(x[:, 0] > c)
        se = math.sqrt(frac * (1 - frac) / x.shape[0])
        assert abs(cap_fraction(d, c) - frac) < 4 * se


def test_shell_fraction_examples():
    assert shell_in_ball_fraction(1, 2.0, 1.0, 1.5) == 0.5
    assert shell_in_ball_fraction(2, 1.0, 1.0, 1.0) == pytest.approx(1 / 3, abs=1e-14)
    assert shell_in_ball_fraction(3, 0.0, 2.0, 1.0) == 1.0
    assert shell_in_ball_fraction(3, 0.0, 2.0, 2.5) == 0.0


@given(
    st.integers(2, 4),
    st.floats(0.1, 3.0),
    st.floats(0.1, 3.0),
    st.floats(0.0, 1.0),
)
def test_shell_fraction_nonincreasing(d, t, r, u):
    # the cap angle shrinks once s passes sqrt(t^2 - r^2) (or from s = r - t when r >= t)
    s0 = max(r - t, math.sqrt(max(t * t - r * r, 0.0))) + 1e-9
    s1 = s0 + u * (r + t - s0)
    s2 = s1 + 0.5 * (r + t - s1)
    assert shell_in_ball_fraction(d, t, r, s2) <= shell_in_ball_fraction(d, t, r, s1) + 1e-13


@pytest.mark.parametrize("seed", range(4))
def test_shell_fraction_monte_carlo(seed):
    rng = np.random.default_rng(100 + seed)
    d = int(rng.integers(2, 5))
    t, r = rng.uniform(0.2, 2.0, 2)
    s = rng.uniform(abs(r - t), r + t)
    pts = rng.standard_normal((100_000, d))
    pts *= s / np.linalg.norm(pts, axis=1, keepdims=True)
    pts[:, 0] -= t
    frac = np.mean(np.linalg.norm(pts, axis=1) < r)
    se = max(math.sqrt(frac * (1 - frac) / pts.shape[0]), 1e-6)
    assert abs(shell_in_ball_fraction(d, t, r, s) - frac) < 3 * se + 1e-6


def test_offcenter_mass_examples():
    f = RadialProfile.indicator([(1.0, 2.0)])
    assert offcenter_mass(1, 1.5, 0.25, f) == pytest.approx(0.5, abs=1e-15)
    one = RadialProfile.power(0.0)
    assert offcenter_mass(2, 1.3, 0.7, one) == pytest.approx(math.pi * 0.49, rel=1e-8)


@given(st.integers(1, 4), st.floats(0.0, 5.0), st.floats(0.05, 5.0))
def test_offcenter_mass_of_constant(d, t, r):
    assert offcenter_mass(d, t, r, RadialProfile.power(0.0)) == pytest.approx(unit_ball_volume(d) * r ** d, rel=1e-8)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_offcenter_at_origin_is_centered(d):
    for r in (0.3, 1.0, 2.2, 4.0, 7.0):
        assert offcenter_mass(d, 0.0, r, PROFILE, 1.5) == pytest.approx(centered_mass(d, PROFILE, 1.5, r), rel=1e-10)


@pytest.mark.parametrize("key", sorted(OFFCENTER_ORACLE))
def test_offcenter_mass_oracle(key):
    d, t, r = key
    assert offcenter_mass(d, t, r, PROFILE) == pytest.approx(OFFCENTER_ORACLE[key], rel=1e-9)


@given(st.integers(1, 3), st.floats(0.0, 6.0), st.floats(0.05, 6.0))
def test_offcenter_mass_bounds(d, t, r):
    m = offcenter_mass(d, t, r, PROFILE)
    sup = 1.5 * 3 ** -0.5
    sup = max(1.0, sup)
    total = centered_mass(d, PROFILE, 1.0, 10.0)
    assert m <= min(unit_ball_volume(d) * r ** d * sup, total) * (1 + 1e-8)
    assert m >= 0


def test_offcenter_mass_through_singular_origin():
    # t = r puts the origin on the sphere; |x|^{-1/2} in d = 2 stays integrable
    f = RadialProfile.power(0.5)
    m = offcenter_mass(2, 1.0, 1.0, f)
    assert math.isfinite(m) and m > 0
    assert offcenter_mass(2, 0.3, 1.0, RadialProfile.power(2.5)) == math.inf
