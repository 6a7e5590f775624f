"""Symmetric-matrix fields built from five spectral components.

Run with ``python demos/04_symmetric_matrix_field.py``.
"""

import numpy as np

from maternfield import MaternParams, PointMass, RadialMeasure, Rank2Simplex
from maternfield.kernels import covariance, kernel_rank2_simplex, rank2_quadrature_oracle
from maternfield.so3 import gg_coeff, random_rotation
from maternfield.tensor_bases import extreme_point, mandel_rotation, simplex_vertex

# Vertices of the simplex in Mandel form; vertex 3 is the isotropic C1.
for n in range(1, 6):
    V = simplex_vertex(n)
    print(f"vertex {n}: trace {np.trace(V):.3f}, eigenvalues {np.round(np.linalg.eigvalsh(V), 4)}")
print("D(theta*) == C1:", np.allclose(extreme_point("Dtheta", 2 * np.arcsin(np.sqrt(2 / 3))), extreme_point("C1")))

# Each component's kernel against direct averaging over wavevector directions.
zero = RadialMeasure.build(PointMass(1.0, 0.0))
r = np.array([0.4, -1.1, 0.9])
for n in range(1, 6):
    phi = tuple(RadialMeasure.build(PointMass(1.3)) if k == n - 1 else zero for k in range(5))
    K = kernel_rank2_simplex(phi, np.zeros(3), r, mandel=True)
    print(f"component {n}: max difference to oracle {np.abs(K - rank2_quadrature_oracle(n, 1.3, r)).max():.1e}")

# Rotating both points conjugates the 6x6 covariance by Q(R).
model = Rank2Simplex(tuple(RadialMeasure.build(MaternParams(1.5 + 0.25 * k, 1.0, 0.2)) for k in range(5)))
R = random_rotation(np.random.default_rng(0))
Q = mandel_rotation(R)
x, y = np.zeros(3), r
print("isotropy error:", np.abs(covariance(model, R @ x, R @ y) - Q @ covariance(model, x, y) @ Q.T).max())

print("real Clebsch-Gordan g(0,0; 1,1; 1,1) =", gg_coeff(0, 0, 1, 1, 1, 1))
