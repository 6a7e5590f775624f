import math

import mpmath
import numpy as np
import pytest
from scipy import special

from maternfield.specfun import (
    SERIES_THRESHOLD,
    bessel_k,
    ln_gamma,
    matern_correlation,
    real_sph_harm,
    sph_bessel_j,
)


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, math.log(math.sqrt(math.pi))), (5.0, math.log(24.0))])
def test_ln_gamma_values(x, expected):
    assert ln_gamma(x) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_ln_gamma_domain(x):
    with pytest.raises(ValueError):
        ln_gamma(x)


def test_bessel_k_half_integer():
    assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-14)
    assert bessel_k(1.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2) * 1.5, rel=1e-14)
    assert bessel_k(0.5, 1.0) == pytest.approx(0.4610685, abs=1e-7)
    assert bessel_k(1.5, 2.0) == pytest.approx(0.1799066, abs=1e-7)


@pytest.mark.parametrize("nu", [0.3, 1.0, 2.7])
def test_bessel_k_small_argument_limit(nu):
    x = 1e-30
    assert x**nu * bessel_k(nu, x) == pytest.approx(2 ** (nu - 1) * math.gamma(nu), rel=1e-6)


def test_bessel_k_against_mpmath():
    for nu in (0.0, 0.3, 1.7, 4.2):
        for x in (1e-3, 0.7, 12.0, 150.0):
            assert bessel_k(nu, x) == pytest.approx(float(mpmath.besselk(nu, x)), rel=1e-12)


def test_bessel_k_errors():
    with pytest.raises(ValueError):
        bessel_k(1.0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(-1.0, 1.0)
    with pytest.raises(OverflowError):
        bessel_k(200.0, 1e-5)


def test_sph_bessel_examples():
    assert sph_bessel_j(0, math.pi) == pytest.approx(0.0, abs=1e-16)
    assert sph_bessel_j(2, 0.001) == pytest.approx(6.6667e-8, rel=1e-4)
    assert sph_bessel_j(4, 0.0) == 0.0
    assert sph_bessel_j(0, 0.0) == 1.0


@pytest.mark.parametrize("ell", range(5))
def test_sph_bessel_against_mpmath(ell):
    t = np.concatenate([np.geomspace(1e-6, 1.0, 40), np.linspace(1.0, 60.0, 80), [SERIES_THRESHOLD[ell]]])
    got = sph_bessel_j(ell, t)
    ref = np.array([float(mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.besselj(ell + 0.5, x)) for x in t])
    # absolute error relative to the envelope 1/max(1, t)
    err = np.abs(got - ref) / np.maximum(np.abs(ref), 1e-13 / np.maximum(1.0, t))
    assert err.max() < 1e-12


def test_sph_bessel_continuous_at_switch():
    for ell, t0 in SERIES_THRESHOLD.items():
        a, b = sph_bessel_j(ell, np.nextafter(t0, 0)), sph_bessel_j(ell, t0)
        assert abs(a - b) <= 1e-13 * max(abs(a), 1e-300)


def test_sph_bessel_shape_and_errors():
    assert sph_bessel_j(1, np.ones((2, 3))).shape == (2, 3)
    assert isinstance(sph_bessel_j(1, 0.5), float)
    with pytest.raises(ValueError):
        sph_bessel_j(5, 1.0)
    with pytest.raises(ValueError):
        sph_bessel_j(0, -1.0)


def test_real_sph_harm_values():
    assert real_sph_harm(0, 0, 0.3, 1.2) == pytest.approx(1 / math.sqrt(4 * math.pi), abs=1e-15)
    assert real_sph_harm(2, 0, 0.0, 0.0) == pytest.approx(math.sqrt(5 / (4 * math.pi)), abs=1e-15)
    assert real_sph_harm(2, 0, 0.0, 0.0) == pytest.approx(0.6307831, abs=1e-7)


def _sphere_rule(n_t=20, n_p=40):
    x, w = np.polynomial.legendre.leggauss(n_t)
    th = np.repeat(np.arccos(x), n_p)
    ph = np.tile(np.arange(n_p) * 2 * np.pi / n_p, n_t)
    return th, ph, np.repeat(w, n_p) * 2 * np.pi / n_p


def test_real_sph_harm_orthonormal():
    th, ph, w = _sphere_rule()
    S = np.array([real_sph_harm(l, m, th, ph) for l in range(7) for m in range(-l, l + 1)])
    np.testing.assert_allclose((S * w) @ S.T, np.eye(S.shape[0]), atol=1e-12)


def test_real_sph_harm_zonal_matches_legendre():
    th = np.linspace(0, np.pi, 17)
    for ell in range(7):
        ref = np.sqrt((2 * ell + 1) / (4 * np.pi)) * special.eval_legendre(ell, np.cos(th))
        np.testing.assert_allclose(real_sph_harm(ell, 0, th, 0.0), ref, atol=1e-14)


def test_real_sph_harm_magnitude_matches_complex():
    # |S_l^m|^2 + |S_l^-m|^2 = 2 |Y_l^m|^2 for the complex harmonic
    th, ph = np.meshgrid(np.linspace(0.1, 3.0, 7), np.linspace(0.0, 6.0, 9))
    for ell in range(1, 5):
        for m in range(1, ell + 1):
            y = special.sph_harm_y(ell, m, th, ph)
            lhs = real_sph_harm(ell, m, th, ph) ** 2 + real_sph_harm(ell, -m, th, ph) ** 2
            np.testing.assert_allclose(lhs, 2 * np.abs(y) ** 2, atol=1e-13)


def test_real_sph_harm_invalid():
    with pytest.raises(ValueError):
        real_sph_harm(2, 3, 0.0, 0.0)


def test_matern_correlation():
    rho = np.linspace(0, 4, 9)
    np.testing.assert_allclose(matern_correlation(0.5, 1.3, rho), np.exp(-1.3 * rho), rtol=1e-14)
    np.testing.assert_allclose(matern_correlation(1.5, 2.0, rho), (1 + 2 * rho) * np.exp(-2 * rho), rtol=1e-13)
    assert matern_correlation(2.7, 0.5, 0.0) == 1.0
