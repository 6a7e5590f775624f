"""Two-point correlation tensors of isotropic random fields and quadrature oracles.

Every kernel is an integral over radial spectral measures of spherical
Bessel functions at ``lambda * rho``; the integrals use the grid stored on
each :class:`~maternfield.spectral.RadialMeasure`. Atoms at zero contribute
through ``j_0(0) = 1`` and ``j_2(0) = j_4(0) = 0``.

Points are arrays of shape ``(3,)`` or ``(n, 3)`` in coordinates
``(x_{-1}, x_0, x_1)``. Kernels depend only on ``r = y - x``.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as F
import warnings

import numpy as np

from .models import (
    ConstraintViolation,
    Rank0,
    Rank1,
    Rank2Simplex,
    Rank2Triangle,
    check_constraints,
    field_dimension,
)
from .so3 import rotation_to_pole
from .specfun import sph_bessel_j
from .tensor_bases import (
    MANDEL_PAIRS,
    TRIANGLE_VERTICES,
    mandel_rotation,
    simplex_vertex,
    tau_inv,
)

__all__ = [
    "Rank0",
    "Rank1",
    "Rank2Triangle",
    "Rank2Simplex",
    "ConstraintViolation",
    "AccuracyWarning",
    "NTILDE",
    "ntilde",
    "radial_transform",
    "kernel_rank0",
    "kernel_rank1",
    "kernel_rank2_triangle",
    "kernel_rank2_simplex",
    "covariance",
    "covariance_batch",
    "gram_matrix",
    "rank1_projector_oracle",
    "rank2_quadrature_oracle",
]

_CHUNK = 1 << 22


class AccuracyWarning(UserWarning):
    """A kernel was requested beyond the distance its grid resolves."""


# Coefficients of (j0, j2, j4) in the scalar function multiplying L^q for
# simplex component n. Checked against spherical quadrature of the rotated
# vertex densities; see tests/test_kernels.py.
NTILDE = {
    1: ((F(-1, 15), F(-2, 21), F(-1, 35)), (F(1, 10), F(1, 14), F(-1, 35)), (0, F(-3, 28), F(1, 7)),
        (0, F(1, 7), F(1, 7)), (0, 0, F(-1))),
    2: ((F(-1, 15), F(4, 21), F(1, 140)), (F(1, 10), F(-1, 7), F(1, 140)), (0, F(3, 14), F(-1, 28)),
        (0, F(-2, 7), F(-1, 28)), (0, 0, F(1, 4))),
    3: ((F(1, 3), 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0), (0, 0, 0)),
    4: ((F(-1, 15), F(-4, 21), F(3, 70)), (F(1, 10), F(1, 7), F(3, 70)), (0, F(-3, 14), F(-3, 14)),
        (0, F(2, 7), F(-3, 14)), (0, 0, F(3, 2))),
    5: ((F(1, 5), F(-2, 7), F(1, 70)), (F(1, 30), F(1, 21), F(1, 70)), (0, F(-1, 14), F(-1, 14)),
        (0, F(3, 7), F(-1, 14)), (0, 0, F(1, 2))),
}
_NT = np.array([[[float(c) for c in NTILDE[n][q]] for q in range(5)] for n in range(1, 6)])


def ntilde(n, q, lam, rho):
    """Scalar coefficient of ``L^q`` for simplex component ``n`` at wavenumber ``lam``."""
    if n not in NTILDE or not 1 <= q <= 5:
        raise ValueError(f"index out of range: n={n}, q={q}")
    t = np.asarray(lam, dtype=float) * np.asarray(rho, dtype=float)
    c = _NT[n - 1, q - 1]
    out = c[0] * sph_bessel_j(0, t) + c[1] * sph_bessel_j(2, t) + c[2] * sph_bessel_j(4, t)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Radial integrals


def radial_transform(measure, rho, orders=(0,)):
    """Integrals of ``j_ell(lambda rho)`` against a measure, including its atom.

    Parameters
    ----------
    measure : RadialMeasure
    rho : array_like
        Non-negative distances.
    orders : tuple of int
        Bessel orders.

    Returns
    -------
    ndarray, shape (len(orders),) + rho.shape
    """
    rho = np.asarray(rho, dtype=float)
    flat = rho.ravel()
    g = measure.grid
    out = np.zeros((len(orders), flat.size))
    for k, ell in enumerate(orders):
        if ell == 0:
            out[k] += measure.atom0
    if g.nodes.size == 0 or flat.size == 0:
        return out.reshape((len(orders),) + rho.shape)
    if flat.max() > g.rho_max * (1 + 1e-12):
        warnings.warn(
            f"distance {flat.max():.4g} exceeds the resolved range {g.rho_max:.4g} of the grid",
            AccuracyWarning,
            stacklevel=3,
        )
    masses = g.masses
    step = max(1, _CHUNK // g.nodes.size)
    for start in range(0, flat.size, step):
        t = np.multiply.outer(flat[start:start + step], g.nodes)
        for k, ell in enumerate(orders):
            # einsum keeps each row's sum independent of the batch shape
            out[k, start:start + step] += np.einsum("pn,n->p", sph_bessel_j(ell, t), masses)
    return out.reshape((len(orders),) + rho.shape)


def _separations(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = y - x
    if r.shape[-1] != 3:
        raise ValueError("points must have three coordinates")
    single = r.ndim == 1
    r = np.atleast_2d(r)
    rho = np.linalg.norm(r, axis=1)
    u = np.zeros_like(r)
    pos = rho > 0
    u[pos] = r[pos] / rho[pos, None]
    return single, rho, u


def _finish(single, out):
    return out[0] if single else out


def kernel_rank0(mu, x, y):
    """Covariance ``atom0 + sum_i m_i sin(lambda_i rho) / (lambda_i rho)`` of a scalar field."""
    single, rho, _ = _separations(x, y)
    return _finish(single, radial_transform(mu, rho, (0,))[0])


def kernel_rank1(phi1, phi2, x, y):
    """Correlation tensor of a vector field, shape ``(3, 3)`` per pair.

    ``phi1`` weights ``-j2 u u^T + (j1/t) I`` and ``phi2`` weights
    ``j2 u u^T + (j0 - j1/t) I`` with ``u`` the unit separation. The identity
    ``j1(t)/t = (j0 + j2)/3`` removes the removable singularity at ``t = 0``,
    so the limits ``I/3`` and ``2 I/3`` at coincident points are exact.
    """
    report = check_constraints(Rank1(phi1, phi2))
    report.raise_if_violated()
    single, rho, u = _separations(x, y)
    a0, a2 = radial_transform(phi1, rho, (0, 2))
    b0, b2 = radial_transform(phi2, rho, (0, 2))
    iso = (a0 + a2) / 3.0 + (2.0 * b0 - b2) / 3.0
    uu = b2 - a2
    out = iso[:, None, None] * np.eye(3) + uu[:, None, None] * np.einsum("ni,nj->nij", u, u)
    return _finish(single, out)


def kernel_rank2_triangle(phi, x, y):
    """Two-component kernel ``sum_m K_m(rho) C^m``, shape ``(2, 2)`` per pair."""
    if len(phi) != 3:
        raise ValueError("the triangle model needs three measures")
    single, rho, _ = _separations(x, y)
    out = np.zeros((rho.size, 2, 2))
    for m, C in zip(phi, TRIANGLE_VERTICES):
        out += radial_transform(m, rho, (0,))[0][:, None, None] * C
    return _finish(single, out)


_I3 = np.eye(3)
_PA = np.array([(i + 1, j + 1) for i, j in MANDEL_PAIRS])
_MW = np.where(_PA[:, 0] == _PA[:, 1], 1.0, np.sqrt(2.0))


def _tau_l_stack(u):
    # tau(L^q(u)) for each row of u, shape (n, 5, 6, 6); rows of u may be zero
    d, e = _I3, np.einsum
    L = np.empty((u.shape[0], 5, 3, 3, 3, 3))
    L[:, 0] = e("ij,kl->ijkl", d, d)
    L[:, 1] = e("ik,jl->ijkl", d, d) + e("il,jk->ijkl", d, d)
    L[:, 2] = (e("il,nj,nk->nijkl", d, u, u) + e("jk,ni,nl->nijkl", d, u, u)
               + e("jl,ni,nk->nijkl", d, u, u) + e("ik,nj,nl->nijkl", d, u, u))
    L[:, 3] = e("kl,ni,nj->nijkl", d, u, u) + e("ij,nk,nl->nijkl", d, u, u)
    L[:, 4] = e("ni,nj,nk,nl->nijkl", u, u, u, u)
    a, b = _PA[:, 0], _PA[:, 1]
    M = L[:, :, a[:, None], b[:, None], a[None, :], b[None, :]]
    return M * _MW[:, None] * _MW[None, :]


def kernel_rank2_simplex(phi, x, y, mandel=False):
    """Correlation tensor of the five-component symmetric-matrix field.

    Parameters
    ----------
    phi : sequence of 5 RadialMeasure
    x, y : array_like
    mandel : bool
        Return the 6x6 Mandel flattening instead of the rank-4 tensor.

    Returns
    -------
    ndarray, shape (3, 3, 3, 3) or (6, 6) per pair
    """
    if len(phi) != 5:
        raise ValueError("the simplex model needs five measures")
    check_constraints(Rank2Simplex(tuple(phi))).raise_if_violated()
    single, rho, u = _separations(x, y)
    coeff = np.zeros((rho.size, 5))
    for n, m in enumerate(phi):
        J = radial_transform(m, rho, (0, 2, 4))
        coeff += np.einsum("qk,kp->pq", _NT[n], J)
    # at rho = 0 only the j0 terms of L^1 and L^2 survive
    coeff[rho == 0, 2:] = 0.0
    out = np.einsum("pq,pqab->pab", coeff, _tau_l_stack(u))
    if not mandel:
        out = np.array([tau_inv(M) for M in out])
    return _finish(single, out)


def covariance(model, x, y):
    """Covariance matrix between the field components at ``x`` and ``y``.

    Components are the scalar value, the vector ``(T_{-1}, T_0, T_1)``, the
    two triangle-model components, or the Mandel 6-vector of the
    symmetric-matrix field.
    """
    if isinstance(model, Rank0):
        k = kernel_rank0(model.mu, x, y)
        return np.asarray(k)[..., None, None]
    if isinstance(model, Rank1):
        return kernel_rank1(model.phi1, model.phi2, x, y)
    if isinstance(model, Rank2Triangle):
        return kernel_rank2_triangle(model.phi, x, y)
    if isinstance(model, Rank2Simplex):
        return kernel_rank2_simplex(model.phi, x, y, mandel=True)
    raise TypeError(f"unknown model type {type(model).__name__}")


def covariance_batch(model, x, y, workers=1):
    """:func:`covariance` over pairs of point arrays, optionally on threads.

    The result does not depend on ``workers``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if workers <= 1 or x.shape[0] < 2 * workers:
        return covariance(model, x, y)
    bounds = np.linspace(0, x.shape[0], workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda ab: covariance(model, x[ab[0]:ab[1]], y[ab[0]:ab[1]]), zip(bounds[:-1], bounds[1:]))
        return np.concatenate(list(parts))


def gram_matrix(model, points):
    """Covariance of all components at all points, shape ``(n d, n d)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    d = field_dimension(model)
    ii, jj = np.triu_indices(n)
    blocks = covariance(model, pts[ii], pts[jj]).reshape(-1, d, d)
    G = np.zeros((n, d, n, d))
    G[ii, :, jj, :] = blocks
    G[jj, :, ii, :] = np.transpose(blocks, (0, 2, 1))
    return G.reshape(n * d, n * d)


# ---------------------------------------------------------------------------
# Oracles


def _sphere_rule(order):
    n_t, n_p = order
    x, w = np.polynomial.legendre.leggauss(n_t)
    theta = np.repeat(np.arccos(x), n_p)
    phi = np.tile(np.arange(n_p) * 2 * np.pi / n_p, n_t)
    weights = np.repeat(w, n_p) * (2 * np.pi / n_p) / (4 * np.pi)
    return theta, phi, weights


def rank1_projector_oracle(phi1, phi2, x, y, order=(64, 128)):
    """Rank-1 kernel by direct quadrature over wavevectors.

    Averages ``cos(lambda p.r)`` times the longitudinal projector ``p p^T``
    (weight ``phi1``) and the transverse projector ``I - p p^T`` (weight
    ``phi2``) over the unit sphere, then over each radial grid. Accurate
    while ``lambda rho`` stays well below ``order[0]`` on the bulk of the
    measures.
    """
    r = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    theta, phi, w = _sphere_rule(order)
    p = np.stack([np.sin(theta) * np.sin(phi), np.cos(theta), np.sin(theta) * np.cos(phi)], axis=1)
    pp = np.einsum("si,sj->sij", p, p)
    proj = (pp, np.eye(3) - pp)
    dot = p @ r
    out = np.zeros((3, 3))
    for m, P in zip((phi1, phi2), proj):
        out += m.atom0 * np.einsum("s,sij->ij", w, P)
        g = m.grid
        step = max(1, _CHUNK // dot.size)
        for start in range(0, g.nodes.size, step):
            lam = g.nodes[start:start + step]
            c = np.cos(np.multiply.outer(lam, dot)) @ (w[:, None, None] * P).reshape(dot.size, 9)
            out += (g.masses[start:start + step] @ c).reshape(3, 3)
    return out


def rank2_quadrature_oracle(n, lambda0, s, order=(64, 128), sine_tol=1e-10):
    """Simplex component ``n`` at a single wavenumber by spherical quadrature.

    Computes the sphere average of ``Q(g_p) D Q(g_p)^T cos(lambda0 p.r)``
    with ``D`` the vertex of component ``n`` and ``g_p`` the rotation taking
    the polar axis to ``p``. The matching sine average must vanish.

    Parameters
    ----------
    n : int
        Component, 1 to 5.
    lambda0 : float
    s : Separation or array_like
        Separation vector.
    order : (int, int)
        Gauss nodes in ``cos(theta)`` and uniform nodes in ``phi``.

    Returns
    -------
    ndarray, shape (6, 6)
        Mandel matrix.
    """
    r = np.asarray(getattr(s, "r", s), dtype=float)
    D = simplex_vertex(n)
    theta, phi, w = _sphere_rule(order)
    R = rotation_to_pole(theta, phi)
    Q = mandel_rotation(R)
    Fp = np.einsum("sab,bc,sdc->sad", Q, D, Q)
    phase = lambda0 * (R[:, :, 1] @ r)
    cos_part = np.einsum("s,sab->ab", w * np.cos(phase), Fp)
    sin_part = np.einsum("s,sab->ab", w * np.sin(phase), Fp)
    if np.abs(sin_part).max() > sine_tol:
        raise ArithmeticError(f"sine part {np.abs(sin_part).max():.3g} does not vanish")
    return 0.5 * (cos_part + cos_part.T)
