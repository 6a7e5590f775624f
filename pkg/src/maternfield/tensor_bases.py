"""Symmetric rank-4 tensors, their 6x6 Mandel flattening and the extreme points.

Index values ``-1, 0, 1`` map to array positions ``0, 1, 2``. The Mandel
flattening ``tau`` orders index pairs as::

    (-1,-1), (0,0), (1,1), (-1,0), (1,-1), (0,1)

and scales off-diagonal pairs by ``sqrt(2)``, so that it is an isometry and
the rotation of a symmetric matrix ``X -> R X R^T`` becomes an orthogonal
6x6 matrix ``Q(R)``. With this ordering the extreme points below are
invariant under rotations about the polar axis ``x_0``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np

from .so3 import rotation_from_euler, EulerAngles

__all__ = [
    "MANDEL_PAIRS",
    "Separation",
    "l_basis",
    "tau",
    "tau_inv",
    "check_rank4_symmetry",
    "mandel_vector",
    "mandel_matrix",
    "mandel_rotation",
    "THETA_STAR",
    "THETA_D4",
    "extreme_point",
    "simplex_vertex",
    "TRIANGLE_VERTICES",
    "barycentric_triangle",
    "isotropic_average",
]

MANDEL_PAIRS = ((-1, -1), (0, 0), (1, 1), (-1, 0), (1, -1), (0, 1))
_PAIR_IDX = np.array([(i + 1, j + 1) for i, j in MANDEL_PAIRS])
_W = np.array([1.0, 1.0, 1.0, math.sqrt(2.0), math.sqrt(2.0), math.sqrt(2.0)])
_SYM_TOL = 1e-12


@dataclass(frozen=True)
class Separation:
    """Separation ``r = y - x`` with its norm and direction angles."""

    r: np.ndarray
    rho: float
    theta: float
    phi: float

    @classmethod
    def from_vector(cls, r):
        r = np.asarray(r, dtype=float).reshape(3)
        rho = float(np.linalg.norm(r))
        if rho == 0.0:
            return cls(r, 0.0, 0.0, 0.0)
        theta = float(np.arccos(np.clip(r[1] / rho, -1.0, 1.0)))
        phi = float(np.arctan2(r[0], r[2]) % (2 * np.pi))
        return cls(r, rho, theta, phi)

    @classmethod
    def from_points(cls, x, y):
        return cls.from_vector(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))


_I3 = np.eye(3)


def l_basis(q, s):
    """Unit-normalised covariant ``L^q`` of symmetric rank-4 tensors.

    Parameters
    ----------
    q : int
        1 to 5. ``L^1 = d_ij d_kl``, ``L^2 = d_ik d_jl + d_il d_jk``; ``L^3``
        and ``L^4`` are quadratic and ``L^5 = u_i u_j u_k u_l`` quartic in
        the unit direction ``u`` of the separation.
    s : Separation or array_like
        Separation vector; only its direction matters.

    Returns
    -------
    ndarray, shape (3, 3, 3, 3)
    """
    if q == 1:
        return np.einsum("ij,kl->ijkl", _I3, _I3)
    if q == 2:
        return np.einsum("ik,jl->ijkl", _I3, _I3) + np.einsum("il,jk->ijkl", _I3, _I3)
    if q not in (3, 4, 5):
        raise ValueError(f"q must be 1..5, got {q}")
    r = s.r if isinstance(s, Separation) else np.asarray(s, dtype=float)
    rho = np.linalg.norm(r)
    if rho == 0.0:
        raise ValueError(f"L^{q} is undefined at zero separation")
    u = r / rho
    if q == 3:
        return (
            np.einsum("il,j,k->ijkl", _I3, u, u)
            + np.einsum("jk,i,l->ijkl", _I3, u, u)
            + np.einsum("jl,i,k->ijkl", _I3, u, u)
            + np.einsum("ik,j,l->ijkl", _I3, u, u)
        )
    if q == 4:
        return np.einsum("kl,i,j->ijkl", _I3, u, u) + np.einsum("ij,k,l->ijkl", _I3, u, u)
    return np.einsum("i,j,k,l->ijkl", u, u, u, u)


def check_rank4_symmetry(f, tol=_SYM_TOL):
    """Raise ``ValueError`` unless ``f`` has the minor and major symmetries."""
    f = np.asarray(f, dtype=float)
    if f.shape != (3, 3, 3, 3):
        raise ValueError(f"expected shape (3, 3, 3, 3), got {f.shape}")
    scale = max(1.0, np.abs(f).max())
    for perm, name in (((1, 0, 2, 3), "ij"), ((0, 1, 3, 2), "kl"), ((2, 3, 0, 1), "major")):
        if np.abs(f - f.transpose(perm)).max() > tol * scale:
            raise ValueError(f"tensor violates the {name} symmetry")


def tau(f):
    """Flatten a symmetric rank-4 tensor to a symmetric 6x6 matrix."""
    f = np.asarray(f, dtype=float)
    check_rank4_symmetry(f)
    a, b = _PAIR_IDX[:, 0], _PAIR_IDX[:, 1]
    M = f[a[:, None], b[:, None], a[None, :], b[None, :]]
    return _W[:, None] * M * _W[None, :]


def tau_inv(M):
    """Inverse of :func:`tau`."""
    M = np.asarray(M, dtype=float)
    if M.shape != (6, 6):
        raise ValueError(f"expected a 6x6 matrix, got {M.shape}")
    if np.abs(M - M.T).max() > _SYM_TOL * max(1.0, np.abs(M).max()):
        raise ValueError("Mandel matrix is not symmetric")
    V = M / _W[:, None] / _W[None, :]
    f = np.empty((3, 3, 3, 3))
    for A, (i, j) in enumerate(_PAIR_IDX):
        for B, (k, l) in enumerate(_PAIR_IDX):
            v = V[A, B]
            for p, q in {(i, j), (j, i)}:
                for r, s in {(k, l), (l, k)}:
                    f[p, q, r, s] = v
    return f


def mandel_vector(X):
    """Mandel 6-vector of symmetric 3x3 matrices, shape ``(..., 3, 3) -> (..., 6)``."""
    X = np.asarray(X, dtype=float)
    return X[..., _PAIR_IDX[:, 0], _PAIR_IDX[:, 1]] * _W


def mandel_matrix(v):
    """Inverse of :func:`mandel_vector`."""
    v = np.asarray(v, dtype=float)
    X = np.empty(v.shape[:-1] + (3, 3))
    vals = v / _W
    for A, (i, j) in enumerate(_PAIR_IDX):
        X[..., i, j] = vals[..., A]
        X[..., j, i] = vals[..., A]
    return X


def mandel_rotation(R):
    """Orthogonal 6x6 matrix ``Q(R)`` with ``mandel_vector(R X R^T) = Q(R) mandel_vector(X)``.

    Accepts a stack of rotations of shape ``(..., 3, 3)``.
    """
    R = np.asarray(R, dtype=float)
    i, j = _PAIR_IDX[:, 0][:, None], _PAIR_IDX[:, 1][:, None]
    k, l = _PAIR_IDX[:, 0][None, :], _PAIR_IDX[:, 1][None, :]
    Q = R[..., i, k] * R[..., j, l] + R[..., i, l] * R[..., j, k]
    diag_col = (k == l).astype(float)
    return Q * (_W[:, None] / _W[None, :]) / (1.0 + diag_col)


# ---------------------------------------------------------------------------
# Extreme points

THETA_STAR = 2.0 * math.asin(math.sqrt(2.0 / 3.0))
THETA_D4 = 2.0 * (math.pi - math.asin(math.sqrt(1.0 / 3.0)))


def _rational(entries):
    M = [[Fraction(0)] * 6 for _ in range(6)]
    for (a, b), v in entries.items():
        M[a][b] = M[b][a] = Fraction(v)
    return M


_F = Fraction
_EXACT = {
    "C1": _rational({(a, b): _F(1, 3) for a in range(3) for b in range(a, 3)}),
    "C2": _rational(
        {
            **{(a, a): _F(2, 15) for a in range(3)},
            **{(a, b): _F(-1, 15) for a in range(3) for b in range(a + 1, 3)},
            **{(a, a): _F(1, 5) for a in range(3, 6)},
        }
    ),
    "D1": _rational({(3, 3): _F(1, 2), (5, 5): _F(1, 2)}),
    "D2": _rational({(0, 0): _F(1, 4), (2, 2): _F(1, 4), (0, 2): _F(-1, 4), (4, 4): _F(1, 2)}),
    "D4": _rational(
        {
            (0, 0): _F(1, 6), (2, 2): _F(1, 6), (0, 2): _F(1, 6), (1, 1): _F(2, 3),
            (0, 1): _F(-1, 3), (1, 2): _F(-1, 3),
        }
    ),
    "D5": _rational({(0, 0): _F(1, 2), (2, 2): _F(1, 2), (0, 2): _F(1, 2)}),
}
_EXACT["D3"] = _EXACT["C1"]


def _d_theta(theta):
    s2 = 0.5 * math.sin(0.5 * theta) ** 2
    off = math.sin(theta) / (2.0 * math.sqrt(2.0))
    M = np.zeros((6, 6))
    M[0, 0] = M[2, 2] = M[0, 2] = M[2, 0] = s2
    M[1, 1] = math.cos(0.5 * theta) ** 2
    M[0, 1] = M[1, 0] = M[1, 2] = M[2, 1] = off
    return M


def extreme_point(tag, theta=None, exact=False):
    """Extreme-point matrix in Mandel form for a spectral density along ``x_0``.

    Parameters
    ----------
    tag : {"C1", "C2", "D1", "D2", "Dtheta", "D3", "D4", "D5"}
        ``C1`` and ``C2`` are the isotropic extreme points. ``Dtheta`` is the
        one-parameter family, ``D3``, ``D4`` and ``D5`` its members at
        :data:`THETA_STAR`, :data:`THETA_D4` and ``pi``.
    theta : float, optional
        Angle for ``Dtheta``, in ``[0, 2 pi)``.
    exact : bool
        Return a 6x6 object array of :class:`fractions.Fraction` for the
        rational points.

    Returns
    -------
    ndarray, shape (6, 6)
    """
    if tag == "Dtheta":
        if theta is None or not 0.0 <= theta < 2 * math.pi:
            raise ValueError("Dtheta needs theta in [0, 2 pi)")
        if exact:
            raise ValueError("Dtheta has no exact rational form")
        return _d_theta(theta)
    if theta is not None:
        raise ValueError(f"{tag} takes no angle")
    if tag not in _EXACT:
        raise ValueError(f"unknown extreme point {tag!r}")
    M = _EXACT[tag]
    if exact:
        out = np.empty((6, 6), dtype=object)
        for a in range(6):
            for b in range(6):
                out[a, b] = M[a][b]
        return out
    return np.array([[float(v) for v in row] for row in M])


def simplex_vertex(n):
    """Vertex ``n`` (1..5) of the simplex model: D1, D2, C1, D4, D5."""
    tags = {1: "D1", 2: "D2", 3: "D3", 4: "D4", 5: "D5"}
    if n not in tags:
        raise ValueError(f"simplex component must be 1..5, got {n}")
    return extreme_point(tags[n])


# ---------------------------------------------------------------------------
# Triangle model

_S3 = math.sqrt(3.0)
TRIANGLE_VERTICES = (
    np.array([[0.0, 0.0], [0.0, 1.0]]),
    0.25 * np.array([[1.0, _S3], [_S3, 3.0]]),
    0.25 * np.array([[1.0, -_S3], [-_S3, 3.0]]),
)


def barycentric_triangle(M, check=True):
    """Barycentric coordinates of a unit-trace 2x2 matrix in the triangle.

    Parameters
    ----------
    M : array_like, shape (2, 2)
        Symmetric with unit trace.
    check : bool
        If true, raise when a coordinate is negative.

    Returns
    -------
    ndarray, shape (3,)
        Coordinates summing to one with ``M = sum a_m C^m``.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2) or abs(M[0, 1] - M[1, 0]) > 1e-12:
        raise ValueError("M must be a symmetric 2x2 matrix")
    if abs(np.trace(M) - 1.0) > 1e-12:
        raise ValueError("M must have unit trace")
    A = np.array([[C[0, 0] for C in TRIANGLE_VERTICES], [C[0, 1] for C in TRIANGLE_VERTICES], [1.0, 1.0, 1.0]])
    coords = np.linalg.solve(A, np.array([M[0, 0], M[0, 1], 1.0]))
    if check and coords.min() < -1e-12:
        raise ValueError(f"matrix lies outside the triangle, coordinates {coords}")
    return coords


# ---------------------------------------------------------------------------
# Haar average


@lru_cache(maxsize=1)
def _haar_rule():
    # Exact for all matrix entries of degree <= 4 in R.
    x, wt = np.polynomial.legendre.leggauss(8)
    n_az = 10
    az = np.arange(n_az) * 2 * np.pi / n_az
    Rs, ws = [], []
    for ct, w in zip(x, wt):
        th = math.acos(ct)
        for psi in az:
            for phi in az:
                Rs.append(rotation_from_euler(EulerAngles(psi, th, phi)))
                ws.append(w / (2.0 * n_az * n_az))
    return mandel_rotation(np.array(Rs)), np.array(ws)


def isotropic_average(M):
    """Average of ``Q(R) M Q(R)^T`` over the rotation group."""
    M = np.asarray(M, dtype=float)
    if M.shape != (6, 6) or np.abs(M - M.T).max() > _SYM_TOL * max(1.0, np.abs(M).max()):
        raise ValueError("M must be a symmetric 6x6 matrix")
    Q, ws = _haar_rule()
    out = np.einsum("n,nab,bc,ndc->ad", ws, Q, M, Q)
    return 0.5 * (out + out.T)

