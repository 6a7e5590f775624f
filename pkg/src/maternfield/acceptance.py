"""Acceptance checks shared by the test-suite and ``maternfield selftest``.

Each check returns a :class:`CheckResult`. Oracles are independent of the
code under test wherever possible: closed forms, SciPy routines, exact
rational arithmetic or direct quadrature over wavevectors.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
import time

import numpy as np
from scipy import integrate, special

from . import kernels, multivariate, simulate, so3, specfun, spectral, tensor_bases
from .models import Rank0, Rank1, Rank2Simplex, Rank2Triangle

__all__ = ["CheckResult", "CHECKS", "run_all"]


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(number, name, budget=None):
    def deco(fn):
        def run():
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            if budget is not None and dt > budget:
                ok = False
                detail += f"; runtime {dt:.1f} s exceeds {budget} s"
            return CheckResult(number, name, bool(ok), detail, dt)

        run.number = number
        run.check_name = name
        return run

    return deco


def _measure(density, **kw):
    return spectral.RadialMeasure.build(density, **kw)


@_timed(1, "special functions", budget=1.0)
def check_special_functions():
    worst_k = 0.0
    for x in (0.1, 1.0, 10.0):
        base = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        exact = {0.5: base, 1.5: base * (1 + 1 / x), 2.5: base * (1 + 3 / x + 3 / x**2)}
        for nu, v in exact.items():
            worst_k = max(worst_k, abs(specfun.bessel_k(nu, x) / v - 1))
    t = np.linspace(0.1, 50.0, 5000)
    j = [specfun.sph_bessel_j(ell, t) for ell in range(5)]
    worst_j = 0.0
    for ell in (1, 2, 3):
        lhs = j[ell - 1] + j[ell + 1]
        rhs = (2 * ell + 1) * j[ell] / t
        scale = np.maximum.reduce([np.abs(j[ell - 1]), np.abs(j[ell + 1]), np.abs(rhs)])
        worst_j = max(worst_j, float(np.max(np.abs(lhs - rhs) / scale)))
    ok = worst_k <= 1e-10 and worst_j <= 1e-10
    return ok, f"K rel err {worst_k:.2e}, recurrence rel err {worst_j:.2e}"


@_timed(2, "Matern Fourier consistency", budget=5.0)
def check_matern_fourier():
    rho = np.linspace(0.01, 5.0, 20)
    worst = 0.0
    for nu, a in ((0.5, 1.0), (1.5, 2.0), (2.7, 0.5)):
        mu = _measure(spectral.MaternParams(nu, a, 1.0), rho_max=5.0)
        k = kernels.kernel_rank0(mu, np.zeros((rho.size, 3)), np.column_stack([0 * rho, rho, 0 * rho]))
        exact = specfun.matern_correlation(nu, a, rho)
        worst = max(worst, float(np.max(np.abs(k / exact - 1))))
    return worst <= 1e-5, f"max rel err {worst:.2e}"


@_timed(3, "dual Matern normalisation")
def check_dual_normalisation():
    worst = 0.0
    parts = []
    for nu in (0.3, 1.0, 2.5):
        p = spectral.DualMaternParams(nu)
        quad, _ = integrate.quad(lambda x: spectral.dual_matern_radial_density(p, x), 0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=500)
        grid_mass = _measure(p).total_mass
        err = max(abs(quad - 1), abs(grid_mass - 1))
        worst = max(worst, err)
        parts.append(f"nu={nu}: {quad:.10f}")
    return worst <= 1e-6, ", ".join(parts) + f"; max err {worst:.1e}"


@_timed(4, "CND suite")
def check_cnd():
    rng = np.random.default_rng(4)
    t = np.array([1.0, 2.0, 3.0])
    examples = {
        "(i)": t[:, None] + t[None, :],
        "(ii)": np.full((3, 3), 2.5),
        "(v)": np.maximum(t[:, None], t[None, :]),
        "(vi)": -np.outer(t, t),
    }
    ok = all(multivariate.is_cnd(v) for v in examples.values())
    ok &= not multivariate.is_cnd(np.eye(2))
    n_cnd = disagreements = 0
    for trial in range(60):
        m = int(rng.integers(2, 7))
        if trial % 2:
            # CND by construction: Euclidean distances plus an additive part
            pts = rng.normal(size=(m, 2))
            v = rng.normal(size=m)
            theta = v[:, None] + v[None, :] + np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        else:
            A = rng.normal(size=(m, m))
            theta = A + A.T
        c = rng.normal(size=(10_000, m))
        c -= c.mean(axis=1, keepdims=True)
        qf = np.einsum("ni,ij,nj->n", c, theta, c) / np.einsum("ni,ni->n", c, c)
        brute = qf.max() <= 1e-10 * np.linalg.norm(theta, 2)
        verdict = multivariate.is_cnd(theta)
        n_cnd += verdict
        if verdict != brute:
            disagreements += 1
    ok &= disagreements == 0
    return ok, f"examples accepted, identity rejected, {disagreements} disagreements in 60 random matrices ({n_cnd} CND)"


@_timed(5, "parsimonious validity")
def check_parsimonious():
    beta = 0.9 ** np.abs(np.subtract.outer(np.arange(3), np.arange(3)))
    spec = multivariate.MultiMaternSpec.parsimonious([0.5, 1.0, 1.5], 1.0, [1.0, 1.0, 1.0], beta)
    verdict = multivariate.validate(spec)
    worst = 0.0
    for lam in np.geomspace(1e-3, 1e3, 200):
        w = np.linalg.eigvalsh(multivariate.spectral_matrix(spec, lam))
        worst = min(worst, w.min() / w.max())
    b = multivariate.parsimonious_b(0.5, 1.5, 1.0)
    ok = verdict.status == "valid" and verdict.rule == "parsimonious" and worst >= -1e-10 and abs(b - 8 / (3 * math.pi)) <= 1e-12
    return ok, f"verdict {verdict.status}/{verdict.rule}, min eig ratio {worst:.1e}, b err {abs(b - 8 / (3 * math.pi)):.1e}"


@_timed(6, "real Clebsch-Gordan and Gaunt", budget=30.0)
def check_gg():
    worst_orth = 0.0
    for l1 in range(5):
        for l2 in range(5):
            cols = [so3.gg_table(8)[(l1, l2, ell)].reshape(-1, 2 * ell + 1) for ell in range(abs(l1 - l2), l1 + l2 + 1)]
            G = np.hstack(cols)
            worst_orth = max(worst_orth, np.abs(G.T @ G - np.eye(G.shape[1])).max(), np.abs(G @ G.T - np.eye(G.shape[0])).max())
    num = so3.gaunt_numeric_table(4)
    worst_gaunt = 0.0
    for (l1, l2, l3), arr in num.items():
        for m1 in range(-l1, l1 + 1):
            for m2 in range(-l2, l2 + 1):
                for m3 in range(-l3, l3 + 1):
                    v = so3.gaunt_from_gg(l1, m1, l2, m2, l3, m3)
                    worst_gaunt = max(worst_gaunt, abs(v - arr[m1 + l1, m2 + l2, m3 + l3]))
    ok = worst_orth <= 1e-12 and worst_gaunt <= 1e-8
    return ok, f"orthogonality err {worst_orth:.1e}, Gaunt err {worst_gaunt:.1e} over {len(num)} triples"


@_timed(7, "simplex geometry")
def check_simplex_geometry():
    E = lambda tag: tensor_bases.extreme_point(tag, exact=True)  # noqa: E731
    exact_ok = bool(np.all(E("C2") == Fraction(2, 5) * (E("D1") + E("D2")) + Fraction(1, 5) * E("D4")))
    dstar = np.abs(tensor_bases.extreme_point("Dtheta", tensor_bases.THETA_STAR) - tensor_bases.extreme_point("C1")).max()
    worst = 0.0
    mats = [tensor_bases.extreme_point(t) for t in ("C1", "C2", "D1", "D2", "D3", "D4", "D5")]
    mats += [tensor_bases.extreme_point("Dtheta", th) for th in np.linspace(0, 2 * np.pi, 13)[:-1]]
    for M in mats:
        worst = max(worst, np.abs(M - M.T).max(), -np.linalg.eigvalsh(M).min(), abs(np.trace(M) - 1))
    ok = exact_ok and dstar <= 1e-15 and worst <= 1e-14
    return ok, f"exact identity {exact_ok}, |D(theta*) - C1| {dstar:.1e}, geometry err {worst:.1e}"


@_timed(8, "simplex coefficients vs spherical quadrature", budget=60.0)
def check_table_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    zero = spectral.RadialMeasure.build(spectral.PointMass(1.3, 0.0))
    one = spectral.RadialMeasure.build(spectral.PointMass(1.3, 1.0))
    for n in range(1, 6):
        phi = [one if k == n - 1 else zero for k in range(5)]
        for rho in (0.5, 2.0):
            for _ in range(5):
                u = rng.normal(size=3)
                r = rho * u / np.linalg.norm(u)
                K = kernels.kernel_rank2_simplex(phi, np.zeros(3), r, mandel=True)
                O = kernels.rank2_quadrature_oracle(n, 1.3, r)
                worst = max(worst, np.abs(K - O).max())
    return worst <= 1e-6, f"max abs diff {worst:.1e}"


def _test_models():
    M = lambda nu, a, s: _measure(spectral.MaternParams(nu, a, s))  # noqa: E731
    return {
        "rank0": Rank0(M(1.5, 1.0, 1.0)),
        "rank1": Rank1(M(1.5, 1.0, 0.7), M(2.5, 1.5, 1.3)),
        "triangle": Rank2Triangle((M(1.5, 1.0, 0.5), M(2.0, 0.8, 0.3), M(2.5, 1.2, 0.2))),
        "simplex": Rank2Simplex(tuple(M(1.5 + 0.25 * k, 1.0 + 0.1 * k, 0.2 + 0.1 * k) for k in range(5))),
    }


@_timed(9, "Gram matrices positive semidefinite")
def check_gram():
    rng = np.random.default_rng(9)
    pts = rng.uniform(-1.5, 1.5, size=(20, 3))
    worst = 0.0
    for model in _test_models().values():
        w = np.linalg.eigvalsh(kernels.gram_matrix(model, pts))
        worst = min(worst, w.min() / w.max())
    return worst >= -1e-8, f"min eig / max eig {worst:.1e}"


@_timed(10, "isotropy and stationarity")
def check_invariance():
    rng = np.random.default_rng(10)
    models = _test_models()
    worst_rot = worst_shift = 0.0
    for _ in range(20):
        R = so3.random_rotation(rng)
        Q = tensor_bases.mandel_rotation(R)
        x, y, h = rng.uniform(-1.5, 1.5, size=(3, 3))
        K1 = kernels.covariance(models["rank1"], x, y)
        K1r = kernels.covariance(models["rank1"], R @ x, R @ y)
        K2 = kernels.covariance(models["simplex"], x, y)
        K2r = kernels.covariance(models["simplex"], R @ x, R @ y)
        worst_rot = max(worst_rot, np.abs(K1r - R @ K1 @ R.T).max(), np.abs(K2r - Q @ K2 @ Q.T).max())
        for key in ("rank1", "simplex"):
            a = kernels.covariance(models[key], x, y)
            b = kernels.covariance(models[key], x + h, y + h)
            worst_shift = max(worst_shift, np.abs(a - b).max())
    ok = worst_rot <= 1e-8 and worst_shift <= 1e-8
    return ok, f"rotation err {worst_rot:.1e}, translation err {worst_shift:.1e}"


@_timed(11, "simulation consistency", budget=120.0)
def check_simulation():
    pts = np.array([[0.0, 0.0, 0.0], [0.6, 0.0, 0.8], [0.0, -1.0, 0.0]])
    M = lambda nu, a, s: _measure(spectral.MaternParams(nu, a, s))  # noqa: E731
    models = {"rank0": Rank0(M(0.5, 1.0, 1.0)), "rank1": Rank1(M(1.5, 1.0, 0.7), M(0.5, 2.0, 1.3))}
    worst = 0.0
    same = True
    for model in models.values():
        cfg = simulate.SimConfig(model, pts, n_samples=20_000, n_modes=512, seed=20240611)
        real = simulate.simulate(cfg)
        for i in range(3):
            for j in range(3):
                est, se = simulate.empirical_cov(real, i, j)
                K = kernels.covariance(model, pts[i], pts[j])
                worst = max(worst, float(np.max(np.abs(est - K) / se)))
        small = simulate.SimConfig(model, pts, n_samples=300, n_modes=512, seed=7)
        same &= bool(np.array_equal(simulate.simulate(small), simulate.simulate(small, workers=3)))
    ok = worst < 5.0 and same
    return ok, f"max |z| {worst:.2f}, reproducible {same}"


@_timed(12, "rank-1 origin limit")
def check_rank1_origin():
    p1 = _measure(spectral.MaternParams(1.5, 1.0, 0.7))
    p2 = _measure(spectral.MaternParams(0.5, 2.0, 1.3))
    target = (p1.total_mass / 3 + 2 * p2.total_mass / 3) * np.eye(3)
    worst = 0.0
    for r in (np.zeros(3), np.array([1e-7, 0.0, 0.0]), np.array([0.0, 3e-8, 4e-8])):
        worst = max(worst, np.abs(kernels.kernel_rank1(p1, p2, np.zeros(3), r) - target).max())
    analytic = abs(p1.total_mass - 0.7) + abs(p2.total_mass - 1.3)
    return worst <= 1e-6 and analytic <= 1e-8, f"max abs err {worst:.1e}"


CHECKS = (
    check_special_functions,
    check_matern_fourier,
    check_dual_normalisation,
    check_cnd,
    check_parsimonious,
    check_gg,
    check_simplex_geometry,
    check_table_oracle,
    check_gram,
    check_invariance,
    check_simulation,
    check_rank1_origin,
)


def run_all(skip=()):
    """Run every check not listed in ``skip`` and return the results."""
    return [c() for c in CHECKS if c.number not in skip]
