"""Spectral Monte-Carlo synthesis of centred Gaussian isotropic fields.

Each realisation is a sum of ``N`` random plane waves

    T(x) = sqrt(2 / N) sum_k A_k cos(lambda_k p_k . x + phi_k)

with the component ``n`` of every wave drawn in proportion to its total
mass ``M_n``, ``lambda_k`` from the normalised measure of that component,
``p_k`` uniform on the sphere, ``phi_k`` uniform on ``[0, 2 pi)`` and
``A_k`` Gaussian with covariance ``M F_n(p_k)``, ``M`` the total mass of
all components. ``F_n(p)`` is the unit spectral matrix of the component,
for example the longitudinal projector ``p p^T``. The covariance of ``T``
equals the model kernel for any ``N``; higher moments approach the
Gaussian ones as ``N`` grows.

Every sample has its own Philox stream keyed by ``(seed, sample index)``,
so output does not depend on how samples are split across threads.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np

from .models import Rank0, Rank1, Rank2Simplex, Rank2Triangle, check_constraints, field_dimension
from .so3 import rotation_to_pole
from .tensor_bases import TRIANGLE_VERTICES, mandel_matrix, mandel_vector, simplex_vertex

__all__ = ["SimConfig", "UnsupportedModelError", "simulate", "empirical_cov", "sample_rng"]

logger = logging.getLogger(__name__)


class UnsupportedModelError(ValueError):
    """The model cannot be simulated, for instance because it has an atom at zero."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation request.

    Attributes
    ----------
    model : Rank0, Rank1, Rank2Triangle or Rank2Simplex
    points : array_like, shape (n_points, 3)
    n_samples : int
    n_modes : int
        Plane waves per sample; at least 64 is recommended.
    seed : int
        Non-negative 64-bit seed.
    """

    model: object
    points: np.ndarray
    n_samples: int
    n_modes: int = 512
    seed: int = 0

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (n_points, 3)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if int(self.n_samples) < 1 or int(self.n_modes) < 1:
            raise ValueError("n_samples and n_modes must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a non-negative 64-bit integer")
        if self.n_modes < 64:
            logger.warning("n_modes = %d is below the recommended 64; marginals will be far from Gaussian", self.n_modes)


def sample_rng(seed, index):
    """Independent counter-based generator for one sample."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def _psd_sqrt(M):
    w, V = np.linalg.eigh(M)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


class _Component:
    """Normalised inverse-CDF table of one measure."""

    def __init__(self, measure):
        g = measure.grid
        m = g.masses
        self.mass = float(m.sum())
        if self.mass > 0:
            c = np.cumsum(m) - 0.5 * m
            self.cdf = c / self.mass
            self.nodes = g.nodes
        else:
            self.cdf = self.nodes = None

    def draw(self, u):
        return np.interp(u, self.cdf, self.nodes)


def _amplitude_fn(model):
    """Map (rotations to p, Gaussian draws, component index) to unit-spectrum amplitudes."""
    if isinstance(model, Rank0):
        return 1, lambda R, z, comp: z
    if isinstance(model, Rank1):

        def amp1(R, z, comp):
            p = R[:, :, 1]
            longi = p * np.einsum("ki,ki->k", p, z)[:, None]
            return np.where(comp[:, None] == 0, longi, z - longi)

        return 3, amp1
    if isinstance(model, Rank2Triangle):
        # every vertex is rank one: C^m = v v^T
        vecs = np.array([_rank_one_factor(C) for C in TRIANGLE_VERTICES])
        return 1, lambda R, z, comp: vecs[comp] * z
    if isinstance(model, Rank2Simplex):
        S = np.array([_psd_sqrt(simplex_vertex(n)) for n in range(1, 6)])

        def amp2(R, z, comp):
            # Q(R) v computed as the Mandel vector of R X R^T
            X = mandel_matrix(np.matmul(S[comp], z[:, :, None])[:, :, 0])
            return mandel_vector(R @ X @ np.swapaxes(R, 1, 2))

        return 6, amp2
    raise TypeError(f"unknown model type {type(model).__name__}")


def _rank_one_factor(C):
    w, V = np.linalg.eigh(C)
    return V[:, -1] * np.sqrt(w[-1])


_BATCH = 256


class _Sampler:
    def __init__(self, cfg):
        model = cfg.model
        check_constraints(model).raise_if_violated()
        if any(m.atom0 > 0 for m in model.measures):
            raise UnsupportedModelError("measures with an atom at zero cannot be simulated")
        self.comps = [_Component(m) for m in model.measures]
        masses = np.array([c.mass for c in self.comps])
        self.total = float(masses.sum())
        if self.total <= 0:
            raise UnsupportedModelError("the model has zero total mass")
        self.cum = np.cumsum(masses) / self.total
        self.cum[-1] = 1.0
        self.zdim, self.amp = _amplitude_fn(model)
        self.dim = field_dimension(model)
        self.points = cfg.points
        self.n_modes = int(cfg.n_modes)
        self.seed = int(cfg.seed)

    def _draws(self, index):
        rng = sample_rng(self.seed, index)
        u = rng.random((5, self.n_modes))
        z = rng.standard_normal((self.n_modes, self.zdim))
        return u, z

    def batch(self, out, start, stop):
        """Fill ``out[start:stop]``; arithmetic is shared across the batch."""
        draws = [self._draws(i) for i in range(start, stop)]
        u = np.stack([d[0] for d in draws], axis=1)  # (5, B, N)
        z = np.stack([d[1] for d in draws]).reshape(-1, self.zdim)
        B, N = u.shape[1], u.shape[2]
        comp = np.minimum(np.searchsorted(self.cum, u[0].ravel(), side="right"), len(self.comps) - 1)
        lam = np.empty(B * N)
        ul = u[1].ravel()
        for n, c in enumerate(self.comps):
            sel = comp == n
            if np.any(sel):
                lam[sel] = c.draw(ul[sel])
        R = rotation_to_pole(np.arccos(2.0 * u[2].ravel() - 1.0), 2 * np.pi * u[3].ravel())
        A = (np.sqrt(self.total) * self.amp(R, z, comp)).reshape(B, N, self.dim)
        k = (lam[:, None] * R[:, :, 1]).reshape(B, N, 3)
        waves = np.cos(np.einsum("pi,bni->bpn", self.points, k) + 2 * np.pi * u[4][:, None, :])
        out[start:stop] = np.sqrt(2.0 / N) * np.matmul(waves, A)


def simulate(cfg, workers=1):
    """Draw realisations of the field at the configured points.

    Parameters
    ----------
    cfg : SimConfig
    workers : int
        Threads to use; the output is identical for any value.

    Returns
    -------
    ndarray, shape (n_samples, n_points, dim)
        Field components; the symmetric-matrix field is returned as Mandel
        6-vectors.
    """
    s = _Sampler(cfg)
    n = int(cfg.n_samples)
    out = np.empty((n, cfg.points.shape[0], s.dim))
    # batch boundaries are fixed so results do not depend on the thread count
    bounds = [(b, min(b + _BATCH, n)) for b in range(0, n, _BATCH)]
    workers = max(1, int(workers))
    if workers == 1 or len(bounds) == 1:
        for a, b in bounds:
            s.batch(out, a, b)
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda ab: s.batch(out, *ab), bounds))
    return out


def empirical_cov(real, i, j):
    """Unbiased cross-covariance of the components at points ``i`` and ``j``.

    Returns
    -------
    estimate, stderr : ndarray, shape (dim, dim)
        Estimate of ``Cov(T(x_i), T(x_j))`` and per-entry standard errors.
    """
    real = np.asarray(real, dtype=float)
    n = real.shape[0]
    if n < 2:
        raise ValueError("at least two samples are needed")
    X = real[:, i, :] - real[:, i, :].mean(axis=0)
    Y = real[:, j, :] - real[:, j, :].mean(axis=0)
    prod = X[:, :, None] * Y[:, None, :]
    est = prod.sum(axis=0) / (n - 1)
    se = prod.std(axis=0, ddof=1) / np.sqrt(n)
    return est, se
