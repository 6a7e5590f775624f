"""Scalar Matern and dual Matern fields: kernels, grids and simulation.

Run with ``python demos/01_scalar_matern.py``.
"""

import numpy as np

from maternfield import MaternParams, DualMaternParams, RadialMeasure, Rank0, SimConfig, empirical_cov
from maternfield.kernels import kernel_rank0
from maternfield.simulate import simulate
from maternfield.specfun import matern_correlation

rho = np.array([0.0, 0.25, 0.5, 1.0, 2.0, 4.0])
y = np.column_stack([np.zeros_like(rho), rho, np.zeros_like(rho)])
x = np.zeros_like(y)

# The kernel is a radial integral of sin(lambda rho) / (lambda rho) against
# the spectral measure; compare it with the Bessel closed form.
for nu, a in [(0.5, 1.0), (1.5, 2.0), (2.7, 0.5)]:
    mu = RadialMeasure.build(MaternParams(nu, a))
    k = kernel_rank0(mu, x, y)
    err = np.max(np.abs(k - matern_correlation(nu, a, rho)))
    print(f"Matern nu={nu} a={a}: {mu.grid.nodes.size} nodes, mass {mu.total_mass:.12f}, max err {err:.1e}")

# Dual Matern: the covariance is algebraic, (1 + rho^2)^-(nu + 3/2).
mu = RadialMeasure.build(DualMaternParams(1.0))
print("dual Matern nu=1:", np.max(np.abs(kernel_rank0(mu, x, y) - (1 + rho**2) ** -2.5)))

# Spectral Monte-Carlo: empirical covariance against the kernel.
model = Rank0(RadialMeasure.build(MaternParams(0.5, 1.0)))
pts = y[:4]
real = simulate(SimConfig(model, pts, n_samples=5000, n_modes=512, seed=1))
for j in range(1, 4):
    est, se = empirical_cov(real, 0, j)
    print(f"rho={rho[j]}: empirical {est[0, 0]:+.4f} +- {se[0, 0]:.4f}, exact {np.exp(-rho[j]):.4f}")
