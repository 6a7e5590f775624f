"""Rotations, SU(2) Clebsch-Gordan coefficients and real representations of SO(3).

Coordinates are ordered ``(x_{-1}, x_0, x_1)`` with ``x_0`` the polar axis.
A rotation is parametrised by Euler angles ``(psi, theta, phi)`` and acts as
``Rz(phi) @ Ry(theta) @ Rz(psi)``, where ``Rz`` turns about ``x_0`` and ``Ry``
about ``x_{-1}``.

Complex representations are realised on homogeneous polynomials of degree
``2 ell`` in two variables. A unitary change of basis ``W`` makes them real;
the resulting real representation of degree one is the rotation matrix
itself, and the zero-weight column of degree ``ell`` reproduces the real
spherical harmonics of :func:`maternfield.specfun.real_sph_harm`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np

__all__ = [
    "EulerAngles",
    "rot_z",
    "rot_y",
    "rotation_from_euler",
    "rotation_to_pole",
    "random_rotation",
    "cg_su2",
    "wigner_D",
    "gordienko_transform",
    "real_rep",
    "clebsch_gordan_matrix",
    "gg_coeff",
    "gg_table",
    "gaunt_numeric",
    "gaunt_from_gg",
    "gaunt_numeric_table",
    "multiplicity",
]


@dataclass(frozen=True)
class EulerAngles:
    """Euler angles in radians, ``0 <= theta <= pi``."""

    psi: float
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def rot_z(angle):
    """Rotation by ``angle`` about the ``x_0`` axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_y(angle):
    """Rotation by ``angle`` about the ``x_{-1}`` axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_from_euler(a):
    """Rotation matrix ``Rz(phi) Ry(theta) Rz(psi)``."""
    return rot_z(a.phi) @ rot_y(a.theta) @ rot_z(a.psi)


def rotation_to_pole(theta, phi):
    """Rotation taking the ``x_0`` axis to the direction ``(theta, phi)``.

    Accepts arrays of angles, returning a stack of matrices of shape
    ``theta.shape + (3, 3)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    R = np.empty(np.broadcast(theta, phi).shape + (3, 3))
    # Rz(phi) @ Ry(theta)
    R[..., 0, 0] = cp
    R[..., 0, 1] = sp * st
    R[..., 0, 2] = sp * ct
    R[..., 1, 0] = 0.0
    R[..., 1, 1] = ct
    R[..., 1, 2] = -st
    R[..., 2, 0] = -sp
    R[..., 2, 1] = cp * st
    R[..., 2, 2] = cp * ct
    return R


def random_rotation(rng):
    """Haar-distributed rotation matrix."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    R = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )
    return R


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients


def _twice(j):
    t = Fraction(j) * 2
    if t.denominator != 1:
        raise ValueError(f"{j} is not an integer or half-integer")
    return int(t)


def cg_su2(j1, m1, j2, m2, j, m):
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | j m>``.

    Condon-Shortley phase convention, evaluated with the Racah formula in
    exact integer arithmetic. Arguments may be integers, half-integers given
    as floats or :class:`fractions.Fraction`.
    """
    J1, M1, J2, M2, J, M = (_twice(v) for v in (j1, m1, j2, m2, j, m))
    if min(J1, J2, J) < 0:
        raise ValueError("angular momenta must be non-negative")
    for jj, mm in ((J1, M1), (J2, M2), (J, M)):
        if abs(mm) > jj or (jj - mm) % 2:
            raise ValueError(f"projection {mm / 2} incompatible with {jj / 2}")
    if M1 + M2 != M:
        return 0.0
    if J > J1 + J2 or J < abs(J1 - J2) or (J1 + J2 + J) % 2:
        return 0.0
    f = math.factorial
    a = (J1 + J2 - J) // 2
    b = (J1 - J2 + J) // 2
    c = (-J1 + J2 + J) // 2
    pref = Fraction((J + 1) * f(a) * f(b) * f(c), f((J1 + J2 + J) // 2 + 1))
    pref *= (
        f((J + M) // 2) * f((J - M) // 2) * f((J1 - M1) // 2) * f((J1 + M1) // 2)
        * f((J2 - M2) // 2) * f((J2 + M2) // 2)
    )
    total = Fraction(0)
    for k in range(0, a + 1):
        d = [
            k,
            a - k,
            (J1 - M1) // 2 - k,
            (J2 + M2) // 2 - k,
            (J - J2 + M1) // 2 + k,
            (J - J1 - M2) // 2 + k,
        ]
        if min(d) < 0:
            continue
        total += Fraction((-1) ** k, math.prod(f(x) for x in d))
    return float(total) * math.sqrt(pref) if total else 0.0


# ---------------------------------------------------------------------------
# Complex and real representations


def _e_norm(ell, m):
    return (-1) ** (ell + m) * math.sqrt(
        math.factorial(2 * ell + 1) / (math.factorial(ell + m) * math.factorial(ell - m))
    )


def _su2_matrix(ell, alpha, beta):
    # Action h(xi, eta) -> h(conj(alpha) xi - beta eta, conj(beta) xi + alpha eta)
    # on e_m ~ xi^(ell+m) eta^(ell-m); coefficient arrays indexed by power of xi.
    X = np.array([-beta, np.conj(alpha)])
    Y = np.array([alpha, np.conj(beta)])
    n = 2 * ell + 1
    M = np.zeros((n, n), dtype=complex)
    for col in range(-ell, ell + 1):
        p = np.array([1.0 + 0j])
        for _ in range(ell + col):
            p = np.convolve(p, X)
        for _ in range(ell - col):
            p = np.convolve(p, Y)
        for row in range(-ell, ell + 1):
            M[row + ell, col + ell] = p[ell + row] * _e_norm(ell, col) / _e_norm(ell, row)
    return M


def wigner_D(ell, a):
    """Complex unitary representation matrix of degree ``ell``.

    Parameters
    ----------
    ell : int
    a : EulerAngles

    Returns
    -------
    ndarray, shape (2 ell + 1, 2 ell + 1), complex
        Rows and columns indexed by ``m + ell``.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    dz = lambda ang: _su2_matrix(ell, np.exp(0.5j * ang), 0.0)  # noqa: E731
    dy = _su2_matrix(ell, np.cos(0.5 * a.theta), -np.sin(0.5 * a.theta))
    return dz(a.phi) @ dy @ dz(a.psi)


@lru_cache(maxsize=None)
def _gordienko(ell):
    n = 2 * ell + 1
    W = np.zeros((n, n), dtype=complex)
    ph_neg = (-1j) ** (ell - 1)
    ph_pos = (-1j) ** ell
    r = 1.0 / math.sqrt(2.0)
    for m in range(1, ell + 1):
        W[m + ell, -m + ell] = ph_neg * r * (-1) ** m
        W[-m + ell, -m + ell] = -ph_neg * r
        W[m + ell, m + ell] = -ph_pos * r * (-1) ** m
        W[-m + ell, m + ell] = -ph_pos * r
    W[ell, ell] = ph_pos
    W.setflags(write=False)
    return W


def gordienko_transform(ell):
    """Unitary matrix whose columns are the real basis in the complex one.

    ``W.conj().T @ wigner_D(ell, a) @ W`` is real for every rotation.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    return _gordienko(ell).copy()


def real_rep(ell, a):
    """Real orthogonal representation matrix of degree ``ell``."""
    W = _gordienko(ell)
    U = W.conj().T @ wigner_D(ell, a) @ W
    if np.abs(U.imag).max() > 1e-10:
        raise ArithmeticError("real basis change left an imaginary part")
    return U.real


def clebsch_gordan_matrix(ell1, ell2, ell):
    """Isometry from degree ``ell`` into the tensor product, complex basis."""
    C = np.zeros(((2 * ell1 + 1) * (2 * ell2 + 1), 2 * ell + 1))
    for m1 in range(-ell1, ell1 + 1):
        for m2 in range(-ell2, ell2 + 1):
            m = m1 + m2
            if abs(m) <= ell:
                C[(m1 + ell1) * (2 * ell2 + 1) + m2 + ell2, m + ell] = cg_su2(ell1, m1, ell2, m2, ell, m)
    return C


@lru_cache(maxsize=None)
def _gg_block(ell1, ell2, ell):
    C = clebsch_gordan_matrix(ell1, ell2, ell)
    W1, W2, W = _gordienko(ell1), _gordienko(ell2), _gordienko(ell)
    g = np.kron(W1.conj().T, W2.conj().T) @ C @ W
    if np.abs(g.imag).max() > 1e-12:
        raise ArithmeticError("real-basis coupling block has an imaginary part")
    g = g.real.reshape(2 * ell1 + 1, 2 * ell2 + 1, 2 * ell + 1)
    g.setflags(write=False)
    return g


def gg_coeff(ell, m, ell1, m1, ell2, m2):
    """Real Clebsch-Gordan coefficient in the real basis.

    Entries of the orthogonal matrix intertwining the real representation of
    degree ``ell`` with the product of those of degrees ``ell1`` and ``ell2``.
    Zero outside the triangle ``|ell1 - ell2| <= ell <= ell1 + ell2``.
    """
    for L, M in ((ell, m), (ell1, m1), (ell2, m2)):
        if L < 0 or abs(M) > L:
            raise ValueError(f"invalid (ell, m) = ({L}, {M})")
    if not abs(ell1 - ell2) <= ell <= ell1 + ell2:
        return 0.0
    return float(_gg_block(ell1, ell2, ell)[m1 + ell1, m2 + ell2, m + ell])


def gg_table(ell_max=4):
    """All coefficients up to ``ell_max`` as ``{(ell1, ell2, ell): array[m1, m2, m]}``."""
    return {
        (l1, l2, l): _gg_block(l1, l2, l)
        for l1 in range(ell_max + 1)
        for l2 in range(ell_max + 1)
        for l in range(abs(l1 - l2), min(l1 + l2, ell_max) + 1)
    }


def gaunt_from_gg(l1, m1, l2, m2, l3, m3):
    """Integral of three real harmonics expressed through real CG coefficients."""
    if not abs(l1 - l2) <= l3 <= l1 + l2:
        return 0.0
    pref = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) / (4 * math.pi * (2 * l3 + 1)))
    return pref * gg_coeff(l3, m3, l1, m1, l2, m2) * gg_coeff(l3, 0, l1, 0, l2, 0)


def gaunt_numeric(l1, m1, l2, m2, l3, m3):
    """Integral of three real harmonics by exact product quadrature."""
    from .specfun import real_sph_harm

    L = l1 + l2 + l3
    n_t = L // 2 + 2
    n_p = L + 2
    x, w = np.polynomial.legendre.leggauss(n_t)
    theta = np.arccos(x)[:, None]
    phi = (np.arange(n_p) * 2 * np.pi / n_p)[None, :]
    f = real_sph_harm(l1, m1, theta, phi) * real_sph_harm(l2, m2, theta, phi) * real_sph_harm(l3, m3, theta, phi)
    return float((w[:, None] * f).sum() * 2 * np.pi / n_p)


def gaunt_numeric_table(ell_max=4):
    """All triple-harmonic integrals with degrees up to ``ell_max`` by one product rule.

    Returns
    -------
    dict
        ``{(l1, l2, l3): array[m1 + l1, m2 + l2, m3 + l3]}`` for every triple
        satisfying the triangle inequality.
    """
    from .specfun import real_sph_harm

    L = 3 * ell_max
    x, w = np.polynomial.legendre.leggauss(L // 2 + 2)
    n_p = L + 2
    theta = np.repeat(np.arccos(x), n_p)
    phi = np.tile(np.arange(n_p) * 2 * np.pi / n_p, x.size)
    wts = np.repeat(w, n_p) * 2 * np.pi / n_p
    S = {ell: np.array([real_sph_harm(ell, m, theta, phi) for m in range(-ell, ell + 1)]) for ell in range(ell_max + 1)}
    out = {}
    for l1 in range(ell_max + 1):
        for l2 in range(ell_max + 1):
            for l3 in range(abs(l1 - l2), min(l1 + l2, ell_max) + 1):
                out[(l1, l2, l3)] = np.einsum("as,bs,cs,s->abc", S[l1], S[l2], S[l3], wts)
    return out


def multiplicity(ell, r):
    """Number of copies of degree ``ell`` in the ``r``-fold tensor power of degree one."""
    if r < 0 or ell < 0:
        raise ValueError("ell and r must be non-negative")
    if r == 0:
        return 1 if ell == 0 else 0
    if r == 1:
        return 1 if ell == 1 else 0
    total = 0
    for k in range(0, (r - ell) // 3 + 1):
        top = 2 * r - 3 * k - ell - 2
        if top < r - 2:
            continue
        total += (-1) ** k * math.comb(r, k) * math.comb(top, r - 2)
    return total
