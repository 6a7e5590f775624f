"""Special functions used by the kernels.

Spherical Bessel functions of order 0 to 4 are evaluated in closed form,
switching to a power series near the origin where the closed form suffers
from cancellation. Real spherical harmonics follow the sign convention that
makes them the zero-weight column of the real SO(3) representations built in
:mod:`maternfield.so3`.
"""

import math

import numpy as np
from scipy import special

__all__ = [
    "ln_gamma",
    "bessel_k",
    "sph_bessel_j",
    "SERIES_THRESHOLD",
    "real_sph_harm",
    "matern_correlation",
]

# Below these arguments the closed form of j_ell loses more than about three
# digits to cancellation, so the power series is used instead.
SERIES_THRESHOLD = {0: 0.5, 1: 0.5, 2: 1.0, 3: 1.6, 4: 2.4}
_SERIES_TERMS = 24


def ln_gamma(x):
    """Natural logarithm of the Gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind ``K_nu(x)``.

    Parameters
    ----------
    nu : float
        Order, ``nu >= 0``.
    x : float or array_like
        Argument, strictly positive.

    Returns
    -------
    float or ndarray

    Raises
    ------
    ValueError
        If any ``x <= 0`` or ``nu < 0``.
    OverflowError
        If the result is not representable.
    """
    if nu < 0:
        raise ValueError(f"bessel_k requires nu >= 0, got {nu}")
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise ValueError("bessel_k requires x > 0")
    with np.errstate(over="ignore"):
        out = special.kv(nu, xa)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"K_{nu} overflows for the smallest argument {xa.min()}")
    return float(out) if np.ndim(out) == 0 else out


def _double_factorial_odd(n):
    # (2n+1)!!
    return math.prod(range(1, 2 * n + 2, 2))


def _series(ell, t):
    t2 = -0.5 * t * t
    term = np.full_like(t, 1.0 / _double_factorial_odd(ell))
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * t2 / (k * (2 * ell + 2 * k + 1))
        total += term
    return total * t**ell


def _closed(ell, t):
    s, c = np.sin(t), np.cos(t)
    if ell == 0:
        return s / t
    if ell == 1:
        return s / t**2 - c / t
    if ell == 2:
        return (3.0 / t**2 - 1.0) * s / t - 3.0 * c / t**2
    if ell == 3:
        return (15.0 / t**3 - 6.0 / t) * s / t - (15.0 / t**2 - 1.0) * c / t
    return (105.0 / t**4 - 45.0 / t**2 + 1.0) * s / t - (105.0 / t**3 - 10.0 / t) * c / t


def sph_bessel_j(ell, t):
    """Spherical Bessel function of the first kind ``j_ell(t)``.

    Parameters
    ----------
    ell : int
        Order, 0 to 4.
    t : float or array_like
        Non-negative argument.

    Returns
    -------
    float or ndarray
    """
    if ell not in SERIES_THRESHOLD:
        raise ValueError(f"sph_bessel_j supports orders 0..4, got {ell}")
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise ValueError("sph_bessel_j requires t >= 0")
    flat = np.atleast_1d(ta).ravel()
    out = np.empty_like(flat)
    small = flat < SERIES_THRESHOLD[ell]
    out[small] = _series(ell, flat[small])
    big = ~small
    out[big] = _closed(ell, flat[big])
    if ta.ndim == 0:
        return float(out[0])
    return out.reshape(ta.shape)


def _legendre_table(ell_max, x):
    """Normalised associated Legendre values without the Condon-Shortley phase.

    Returns ``P[l, m]`` equal to ``N_lm P_l^m(x)`` with
    ``N_lm = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)``.
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((ell_max + 1, ell_max + 1) + x.shape)
    P[0, 0] = np.sqrt(1.0 / (4.0 * np.pi))
    for m in range(1, ell_max + 1):
        P[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, ell_max):
        P[m + 1, m] = np.sqrt(2.0 * m + 3) * x * P[m, m]
    for m in range(0, ell_max + 1):
        for ell in range(m + 2, ell_max + 1):
            a = np.sqrt((4.0 * ell * ell - 1) / (ell * ell - m * m))
            b = np.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1))
            P[ell, m] = a * (x * P[ell - 1, m] - b * P[ell - 2, m])
    return P


def real_sph_harm(ell, m, theta, phi):
    """Real orthonormal spherical harmonic ``S_ell^m(theta, phi)``.

    ``theta`` is the polar angle from the ``x_0`` axis and ``phi`` the
    azimuth measured from ``x_1`` towards ``x_{-1}``. For ``m > 0`` the
    harmonic is proportional to ``cos(m phi)``, for ``m < 0`` to
    ``sin(|m| phi)``, with sign ``(-1)**(|m|+1)`` relative to the usual
    positive normalised Legendre function.

    Parameters
    ----------
    ell : int
    m : int
        ``-ell <= m <= ell``.
    theta, phi : float or array_like

    Returns
    -------
    float or ndarray
    """
    if ell < 0 or abs(m) > ell:
        raise ValueError(f"invalid (ell, m) = ({ell}, {m})")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    am = abs(m)
    P = _legendre_table(ell, np.cos(theta))[ell, am]
    if m == 0:
        out = P * np.ones_like(phi)
    else:
        sign = (-1.0) ** (am + 1) * np.sqrt(2.0)
        trig = np.cos(am * phi) if m > 0 else np.sin(am * phi)
        out = sign * P * trig
    return float(out) if np.ndim(out) == 0 else out


def matern_correlation(nu, a, rho):
    """Matern correlation ``2^(1-nu)/Gamma(nu) (a rho)^nu K_nu(a rho)``.

    Equal to one at ``rho = 0``.
    """
    rho = np.asarray(rho, dtype=float)
    z = a * rho
    out = np.ones_like(z)
    pos = z > 0
    if np.any(pos):
        zp = z[pos]
        out[pos] = np.exp((1 - nu) * np.log(2.0) - math.lgamma(nu) + nu * np.log(zp)) * special.kv(nu, zp)
    return float(out) if out.ndim == 0 else out
