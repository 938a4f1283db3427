import math
import warnings
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from morrey.constructions import (
    Theorem13Spec,
    ball_indicator,
    bounding_profile_g,
    matched_offsets,
    matched_radii,
    power_function,
    probe_family,
    section4_function,
    staircase_beta,
    theorem13_function,
)
from morrey.geometry import sphere_area, unit_ball_volume
from morrey.optimize import loglog_fit
from morrey.radial import centered_mass, evaluate

# r_1..r_3 found by brentq on v_d (r^d - k^d) = quadrature of g over k <= |x| < k + 1
MATCHED_ORACLE = {
    (1, 0.625): (1.7915721457360256, 2.567904250202921, 3.458637818747531),
    (2, 1.3): (1.6686220086496275, 2.3501759735099, 3.2210674989916863),
    (3, 0.9): (1.7858821896433397, 2.5316371635707617, 3.388479093868474),
}


def shell_mass_of_g(d, beta, k):
    return sphere_area(d) * integrate.quad(lambda s: s ** (d - 1 - beta), k, k + 1, epsabs=0, epsrel=1e-13)[0]


def test_power_function():
    f = power_function(1, 2.0)
    assert f.lo.tolist() == [0.0] and f.hi.tolist() == [math.inf] and f.exponent.tolist() == [0.5]
    assert power_function(2, 2.0).exponent.tolist() == [1.0]
    assert power_function(3, 3.0).exponent.tolist() == [1.0]
    with pytest.raises(ValueError):
        power_function(1, 0.5)


def test_bounding_profile_g():
    g = bounding_profile_g(1, 0.625)
    assert evaluate(g, 0.5) == 1.0
    assert evaluate(g, 2.0) == pytest.approx(2 ** -0.625)
    assert evaluate(g, 2.0) == pytest.approx(0.64842, abs=1e-5)
    for beta in (0.0, -0.1, 1.0, 1.5):
        with pytest.raises(ValueError):
            bounding_profile_g(1, beta)


def test_g_mass_growth():
    # m(r) = v_d + omega (r^(d - beta) - 1) / (d - beta) for r > 1
    d, beta = 2, 1.3
    g = bounding_profile_g(d, beta)
    r = np.geomspace(2.0, 1e8, 30)
    ratio = centered_mass(d, g, 1.0, r) / r ** (d - beta)
    assert ratio[-1] == pytest.approx(sphere_area(d) / (d - beta), rel=1e-3)
    assert np.all(np.diff(ratio) > 0)


def test_staircase_beta_range():
    for d, p1, p2, q in [(1, 1.0, 1.5, 2.0), (2, 1.0, 2.0, 3.0), (3, 1.2, 2.9, 3.0)]:
        beta = staircase_beta(d, p1, p2, q)
        assert d * p1 / q < beta < d * p2 / q < d


@pytest.mark.parametrize("key", sorted(MATCHED_ORACLE))
def test_matched_radii_oracle(key):
    d, beta = key
    assert matched_radii(d, beta, 3) == pytest.approx(MATCHED_ORACLE[key], rel=1e-12)


def test_matched_radius_closed_form_d1():
    assert matched_radii(1, 0.625, 1)[0] == pytest.approx(1 + (2 ** 0.375 - 1) / 0.375, rel=1e-14)
    assert matched_radii(1, 0.625, 1)[0] == pytest.approx(1.791573, abs=1e-6)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("frac", [0.3, 0.625, 0.9])
def test_matched_radii_in_unit_window_and_match_mass(d, frac):
    beta = frac * d
    K = 1000
    r = matched_radii(d, beta, K)
    k = np.arange(1, K + 1, dtype=float)
    assert np.all(r > k) and np.all(r < k + 1)
    off = matched_offsets(d, beta, K)
    for i in (0, 1, 9, 99, 499, 999):
        # r^d - k^d = k^d expm1(d log1p(offset / k)), free of cancellation
        lhs = unit_ball_volume(d) * k[i] ** d * math.expm1(d * math.log1p(off[i] / k[i]))
        assert lhs == pytest.approx(shell_mass_of_g(d, beta, k[i]), rel=1e-10)


def test_matched_radii_small_beta_limit():
    r = matched_radii(1, 1e-9, 50)
    assert r == pytest.approx(np.arange(2, 52), abs=1e-6)


@pytest.mark.parametrize("d,beta", [(1, 0.625), (3, 2.7), (2, 0.1)])
def test_matched_offsets_high_precision(d, beta):
    # 50-digit decimal evaluation of the closed form, where float64 would cancel
    getcontext().prec = 50
    D, B = Decimal(d), Decimal(repr(beta))
    off = matched_offsets(d, beta, 10 ** 6)
    for k in (1, 1000, 10 ** 6):
        K = Decimal(k)
        rd = K ** D + D * ((K + 1) ** (D - B) - K ** (D - B)) / (D - B)
        want = rd ** (1 / D) - K
        assert off[k - 1] == pytest.approx(float(want), rel=1e-12)


def test_staircase_parameter_validation():
    spec = Theorem13Spec(1, 1.0, 1.5, 2.0, 4)
    assert spec.beta == pytest.approx(0.625)
    assert spec.horizon == 2.0
    assert len(spec.matched_radii) == 4
    for args in [(1, 1.5, 1.0, 2.0, 4), (1, 1.0, 2.0, 2.0, 4), (1, 0.5, 1.5, 2.0, 4), (1, 1.0, 1.5, 2.0, 0)]:
        with pytest.raises(ValueError):
            Theorem13Spec(*args)


def test_staircase_shape():
    spec = Theorem13Spec(1, 1.0, 1.5, 2.0, 5)
    f = theorem13_function(spec)
    assert f.lo.tolist() == [0.0, 2.0, 3.0, 4.0, 5.0]
    assert f.hi.tolist() == pytest.approx(list(spec.matched_radii))
    assert f.horizon == spec.horizon
    assert set(np.unique(evaluate(f, np.linspace(0, 7, 1001))).tolist()) <= {0.0, 1.0}


@given(st.integers(1, 3), st.floats(1.0, 2.0), st.floats(0.1, 1.0), st.floats(0.05, 0.9), st.integers(1, 200))
def test_staircase_invariants(d, p1, dp, dq, K):
    p2 = p1 + dp
    q = p2 + dq
    f = theorem13_function(Theorem13Spec(d, p1, p2, q, K))
    assert np.all(f.lo[1:] >= f.hi[:-1]) and np.all(f.hi > f.lo)
    r = np.geomspace(0.1, K + 1.0, 40)
    m1 = centered_mass(d, f, 1.0, r)
    assert np.allclose(centered_mass(d, f, p2, r), m1, rtol=1e-13)


@pytest.mark.parametrize("d,p1,p2,q", [(1, 1.0, 1.5, 2.0), (2, 1.0, 2.0, 3.0), (3, 1.0, 2.0, 3.0)])
def test_staircase_mass_sandwich(d, p1, p2, q):
    # B(0, floor r) collects exactly the mass of g up to floor r; B(0, r) sits inside B(0, floor r + 1)
    spec = Theorem13Spec(d, p1, p2, q, 4096)
    f = theorem13_function(spec)
    g = bounding_profile_g(d, spec.beta)
    r = np.geomspace(2.0, spec.horizon, 200)
    m = centered_mass(d, f, 1.0, r)
    fl = np.floor(r)
    # equality holds at integer radii and in the gaps.  Storing r_k = k + offset in
    # float64 perturbs each annulus mass by ~ulp(k) / offset (up to 1e-8 when d = 3)
    assert np.all(m >= centered_mass(d, g, 1.0, fl) * (1 - 1e-8))
    assert np.all(m <= centered_mass(d, g, 1.0, fl + 1) * (1 + 1e-8))


@pytest.mark.parametrize("d,p1,p2,q", [(1, 1.0, 1.5, 2.0), (2, 1.0, 2.0, 3.0), (3, 1.0, 2.0, 3.0)])
def test_staircase_loglog_mass_slope(d, p1, p2, q):
    # far enough out that the core constant no longer biases the plain fit
    spec = Theorem13Spec(d, p1, p2, q, 2 ** 20)
    r = np.geomspace(2.0 ** 10, 2.0 ** 19, 64)
    fit = loglog_fit(r, centered_mass(d, theorem13_function(spec), 1.0, r))
    assert fit.slope == pytest.approx(d - spec.beta, abs=0.02)


def test_section4_function():
    f = section4_function(1, 2.0, 0.25, 1)
    assert f.lo.tolist() == [0.0] and f.hi.tolist() == [2.0]
    f = section4_function(1, 2.0, 0.25, 6)
    assert f.lo[3] == 4.0 and f.hi[3] == pytest.approx(4.70711, abs=1e-5)
    assert np.all(f.lo[1:] > f.hi[:-1] - 1e-15)
    with pytest.warns(RuntimeWarning):
        section4_function(1, 2.0, 0.7, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        section4_function(2, 3.0, 0.5, 3, p=1.0)
    with pytest.raises(ValueError):
        section4_function(1, 2.0, 0.25, 0)


def test_section4_mass_scaling():
    # total mass of the bumps up to K grows like K^(1 - eps) in d = 1
    eps = 0.3
    Ks = np.array([2 ** i for i in range(6, 13)])
    m = [centered_mass(1, section4_function(1, 2.0, eps, int(K)), 1.0, K + K ** -eps) for K in Ks]
    assert loglog_fit(Ks, np.array(m)).slope == pytest.approx(1 - eps, abs=0.02)


def test_probe_family():
    assert probe_family(1).lo.tolist() == [1.0] and probe_family(1).hi.tolist() == [2.0]
    f = probe_family(3)
    assert list(zip(f.lo.tolist(), f.hi.tolist())) == [(1.0, 2.0), (4.0, 5.0), (9.0, 10.0)]
    with pytest.raises(ValueError):
        probe_family(0)


def test_ball_indicator():
    b = ball_indicator(2.5)
    assert b.lo.tolist() == [0.0] and b.hi.tolist() == [2.5] and b.is_step
