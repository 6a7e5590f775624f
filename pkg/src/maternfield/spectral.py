"""Radial spectral measures on ``[0, inf)`` and their quadrature grids.

A scalar isotropic field on R^3 with spectral density ``f`` has radial
spectral measure ``d mu(lambda) = 4 pi lambda^2 f(lambda) d lambda``; the
covariance at distance ``rho`` is the integral of ``sin(lambda rho) /
(lambda rho)`` against ``mu``. Each measure carries an optional atom at the
origin and a Gauss-Legendre grid on which every kernel integral is done.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy import integrate, special

__all__ = [
    "MaternParams",
    "DualMaternParams",
    "Tabulated",
    "PointMass",
    "ConfigurationError",
    "matern_spectral_density",
    "matern_radial_density",
    "dual_matern_spectral_density",
    "dual_matern_radial_density",
    "radial_density",
    "QuadratureGrid",
    "RadialMeasure",
    "build_grid",
    "PANEL_ORDER",
]

logger = logging.getLogger(__name__)

PANEL_ORDER = 16
# Maximum phase lambda * rho swept by one panel; 16 Gauss nodes integrate
# two full periods to about 1e-10.
_PANEL_PHASE = 4.0 * math.pi
_MAX_NODES = 2_000_000
_GL_X, _GL_W = np.polynomial.legendre.leggauss(PANEL_ORDER)


class ConfigurationError(ValueError):
    """A measure cannot be discretised to the requested accuracy."""


@dataclass(frozen=True)
class MaternParams:
    """Matern measure: smoothness ``nu``, inverse length ``a``, variance ``sigma2``."""

    nu: float
    a: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not (self.nu > 0 and self.a > 0 and self.sigma2 >= 0):
            raise ValueError(f"invalid Matern parameters {self}")


@dataclass(frozen=True)
class DualMaternParams:
    """Dual Matern measure of unit mass, covariance ``(1 + rho^2)^-(nu + 3/2)``."""

    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"dual Matern requires nu > 0, got {self.nu}")


@dataclass(frozen=True)
class Tabulated:
    """Radial density given at strictly increasing nodes, linear in between, zero outside."""

    nodes: tuple
    values: tuple

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise ValueError("tabulated density needs matching node and value lists of length >= 2")
        if x[0] < 0 or np.any(np.diff(x) <= 0):
            raise ValueError("tabulated nodes must be non-negative and strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("tabulated values must be finite and non-negative")
        object.__setattr__(self, "nodes", tuple(map(float, x)))
        object.__setattr__(self, "values", tuple(map(float, v)))


@dataclass(frozen=True)
class PointMass:
    """Mass concentrated at a single wavenumber ``lambda0 > 0``."""

    lambda0: float
    mass: float = 1.0

    def __post_init__(self):
        if not (self.lambda0 > 0 and self.mass >= 0):
            raise ValueError(f"invalid point mass {self}")


def _check_lambda(lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be non-negative")
    return lam


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def matern_spectral_density(p, lam):
    """Isotropic spectral density ``f`` of the Matern covariance.

    ``f(lambda) = sigma2 Gamma(nu + 3/2) a^(2 nu) / (Gamma(nu) pi^(3/2) (a^2 + lambda^2)^(nu + 3/2))``,
    normalised so that ``4 pi lambda^2 f`` has total mass ``sigma2``.
    """
    lam = _check_lambda(lam)
    logc = math.lgamma(p.nu + 1.5) - math.lgamma(p.nu) - 1.5 * math.log(math.pi) + 2 * p.nu * math.log(p.a)
    out = p.sigma2 * np.exp(logc - (p.nu + 1.5) * np.log(p.a**2 + lam**2))
    return _scalar(out)


def matern_radial_density(p, lam):
    """Radial density ``4 pi lambda^2 f(lambda)`` of the Matern measure."""
    lam = _check_lambda(lam)
    return _scalar(4 * np.pi * lam**2 * matern_spectral_density(p, lam))


def dual_matern_spectral_density(p, lam):
    """Spectral density ``lambda^nu K_nu(lambda) / (2^(nu+2) pi^(3/2) Gamma(nu + 3/2))``.

    Its Fourier transform is ``(1 + rho^2)^-(nu + 3/2)``.
    """
    lam = _check_lambda(lam)
    nu = p.nu
    logc = -(nu + 2) * math.log(2.0) - 1.5 * math.log(math.pi) - math.lgamma(nu + 1.5)
    lam1 = np.atleast_1d(lam)
    out = np.empty_like(lam1)
    tiny = lam1 < 1e-12
    # lambda^nu K_nu(lambda) -> 2^(nu-1) Gamma(nu) at the origin
    out[tiny] = math.exp(logc + (nu - 1) * math.log(2.0) + math.lgamma(nu))
    lt = lam1[~tiny]
    out[~tiny] = np.exp(logc + nu * np.log(lt) - lt) * special.kve(nu, lt)
    return _scalar(out.reshape(lam.shape))


def dual_matern_radial_density(p, lam):
    """Radial density ``4 pi lambda^2 s(lambda)`` of the dual Matern measure."""
    lam = _check_lambda(lam)
    return _scalar(4 * np.pi * lam**2 * dual_matern_spectral_density(p, lam))


def radial_density(density, lam):
    """Evaluate the radial density of any absolutely continuous measure type."""
    if isinstance(density, MaternParams):
        return matern_radial_density(density, lam)
    if isinstance(density, DualMaternParams):
        return dual_matern_radial_density(density, lam)
    if isinstance(density, Tabulated):
        lam = _check_lambda(lam)
        return _scalar(np.interp(lam, density.nodes, density.values, left=0.0, right=0.0))
    if isinstance(density, PointMass):
        raise TypeError("a point mass has no density")
    raise TypeError(f"unknown density type {type(density).__name__}")


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes, weights and density values; ``masses = weights * values``."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    tail_bound: float
    rho_max: float

    @property
    def masses(self):
        return self.weights * self.values

    @property
    def mass(self):
        return float(np.sum(self.masses))


def _gl_linear(a, b):
    h = 0.5 * (b - a)
    return a + h * (_GL_X + 1.0), h * _GL_W


def _gl_log(a, b):
    ua, ub = math.log(a), math.log(b)
    h = 0.5 * (ub - ua)
    x = np.exp(ua + h * (_GL_X + 1.0))
    return x, h * _GL_W * x


def _gl_integral(fun, a, b, pieces=1):
    edges = np.linspace(a, b, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = _gl_linear(lo, hi)
        total += float(np.dot(w, fun(x)))
    return total


def _matern_tail(p):
    C = 4 * p.sigma2 * math.exp(
        math.lgamma(p.nu + 1.5) - math.lgamma(p.nu) - 0.5 * math.log(math.pi) + 2 * p.nu * math.log(p.a)
    )
    # integral of C lambda^(-2 nu - 1) from x to infinity bounds the true tail
    return lambda x: C * x ** (-2 * p.nu) / (2 * p.nu)


def _dual_tail(p):
    def tail(x):
        # beyond x + 200 the density is below exp(-200) relative to its peak
        return _gl_integral(lambda t: dual_matern_radial_density(p, t), x, x + 200.0, pieces=20)

    return tail


def _bisect_cutoff(tail, target, lo, hi_max):
    hi = lo
    while tail(hi) > target:
        hi *= 2.0
        if hi > hi_max:
            raise ConfigurationError(f"tail mass stays above {target:.3g} up to lambda = {hi_max:.3g}")
    lo_ = hi / 2.0
    for _ in range(40):
        mid = 0.5 * (lo_ + hi)
        if tail(mid) > target:
            lo_ = mid
        else:
            hi = mid
    return hi


def _default_rho_max(density):
    if isinstance(density, MaternParams):
        return 10.0 / density.a
    if isinstance(density, Tabulated):
        x = np.asarray(density.nodes)
        v = np.asarray(density.values)
        mean = np.sum(x * v) / max(np.sum(v), 1e-300)
        return 10.0 / max(mean, x[-1] * 1e-3)
    return 10.0


def build_grid(density, n_nodes=256, rho_max=None, tol=1e-10, osc_tol=1e-7):
    """Gauss-Legendre grid for a radial measure.

    The support is cut at ``Lambda`` where the tail mass drops below
    ``tol`` times the total. The base grid has ``n_nodes // 16`` panels of
    16 nodes, a linear panel near the origin followed by panels equally
    spaced in ``log(lambda)``. Panels are then split so that each one sweeps
    a phase ``lambda * rho`` of at most ``4 pi`` for every distance up to
    ``rho_max``, or up to the smaller distance beyond which the unresolved
    tail contributes less than ``osc_tol`` of the total mass.

    Parameters
    ----------
    density : MaternParams, DualMaternParams, Tabulated or PointMass
    n_nodes : int
        Base node count, at least 16.
    rho_max : float, optional
        Largest distance at which kernels are accurate. Defaults to ten
        correlation lengths.
    tol, osc_tol : float
        Relative tail and oscillation tolerances.

    Returns
    -------
    QuadratureGrid
    """
    if int(n_nodes) != n_nodes or n_nodes < PANEL_ORDER:
        raise ValueError(f"n_nodes must be an integer >= {PANEL_ORDER}, got {n_nodes}")
    if rho_max is None:
        rho_max = _default_rho_max(density)
    if not rho_max >= 0:
        raise ValueError("rho_max must be non-negative")
    n_panels = int(n_nodes) // PANEL_ORDER
    empty = np.zeros(0)

    if isinstance(density, PointMass):
        return QuadratureGrid(
            np.array([density.lambda0]), np.array([density.mass]), np.array([1.0]), 0.0, math.inf
        )

    if isinstance(density, Tabulated):
        x = np.asarray(density.nodes)
        edges = list(x)
        total = float(integrate.trapezoid(density.values, x))
        tail = None
        lo = None
        if total == 0.0:
            return QuadratureGrid(empty, empty, empty, 0.0, math.inf)
    else:
        if isinstance(density, MaternParams):
            if density.sigma2 == 0.0:
                return QuadratureGrid(empty, empty, empty, 0.0, math.inf)
            scale, total, tail = density.a, density.sigma2, _matern_tail(density)
        elif isinstance(density, DualMaternParams):
            scale, total, tail = 1.0, 1.0, _dual_tail(density)
        else:
            raise TypeError(f"unknown density type {type(density).__name__}")
        lo = 1e-3 * scale
        cutoff = _bisect_cutoff(tail, tol * total, 10.0 * scale, 1e300)
        n_log = max(1, n_panels - 1)
        edges = [0.0] + list(np.exp(np.linspace(math.log(lo), math.log(cutoff), n_log + 1)))

    nodes, weights = [], []
    count = 0
    for a, b in zip(edges[:-1], edges[1:]):
        rho_eff = rho_max
        if tail is not None and a > 0:
            rho_eff = min(rho_max, tail(a) / (a * osc_tol * total))
        k = max(1, math.ceil((b - a) * rho_eff / _PANEL_PHASE))
        count += k * PANEL_ORDER
        if count > _MAX_NODES:
            raise ConfigurationError(
                f"more than {_MAX_NODES} nodes needed to resolve distances up to {rho_max}"
            )
        if k == 1 and lo is not None and a >= lo:
            x, w = _gl_log(a, b)
            nodes.append(x)
            weights.append(w)
            continue
        sub = np.linspace(a, b, k + 1)
        for sa, sb in zip(sub[:-1], sub[1:]):
            x, w = _gl_linear(sa, sb)
            nodes.append(x)
            weights.append(w)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    values = np.asarray(radial_density(density, nodes), dtype=float)
    tail_bound = 0.0 if tail is None else float(tail(edges[-1]))
    if tail_bound > 1e-8 * total:
        raise ConfigurationError(f"tail bound {tail_bound:.3g} exceeds 1e-8 of the total mass")
    logger.debug("grid for %s: %d nodes up to %.4g", density, nodes.size, edges[-1])
    for arr in (nodes, weights, values):
        arr.setflags(write=False)
    return QuadratureGrid(nodes, weights, values, tail_bound, float(rho_max))


@dataclass(frozen=True)
class RadialMeasure:
    """Finite measure on ``[0, inf)``: an atom at zero plus a discretised part.

    Use :meth:`build` to construct one with its grid.
    """

    density: object
    atom0: float = 0.0
    grid: QuadratureGrid = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.atom0 >= 0:
            raise ValueError("atom0 must be non-negative")
        if self.grid is None:
            object.__setattr__(self, "grid", build_grid(self.density))

    @classmethod
    def build(cls, density, atom0=0.0, n_nodes=256, rho_max=None):
        return cls(density, float(atom0), build_grid(density, n_nodes=n_nodes, rho_max=rho_max))

    @property
    def continuous_mass(self):
        return self.grid.mass

    @property
    def total_mass(self):
        return self.atom0 + self.grid.mass
