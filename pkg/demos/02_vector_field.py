"""Isotropic vector fields: longitudinal and transverse spectral parts.

Run with ``python demos/02_vector_field.py``.
"""

import numpy as np

from maternfield import MaternParams, PointMass, RadialMeasure, Rank1, SimConfig, empirical_cov
from maternfield.kernels import kernel_rank1, rank1_projector_oracle
from maternfield.simulate import simulate

phi1 = RadialMeasure.build(MaternParams(2.5, 1.0, 0.7))
phi2 = RadialMeasure.build(MaternParams(3.5, 1.5, 1.3))
r = np.array([0.3, 0.8, -0.4])

B = kernel_rank1(phi1, phi2, np.zeros(3), r)
O = rank1_projector_oracle(phi1, phi2, np.zeros(3), r)
print("kernel at r =", r)
print(np.array2string(B, precision=6))
print("max difference to the wavevector quadrature:", np.abs(B - O).max())

# At coincident points the longitudinal part contributes a third of its
# mass to each diagonal entry and the transverse part two thirds.
print("B(0) =", np.diag(kernel_rank1(phi1, phi2, np.zeros(3), np.zeros(3))), "expected", 0.7 / 3 + 2 * 1.3 / 3)

# A single wavenumber makes the structure explicit: along the separation
# the longitudinal correlation at lambda rho = pi is -2 / pi^2.
zero = RadialMeasure.build(PointMass(1.0, 0.0))
B = kernel_rank1(RadialMeasure.build(PointMass(1.0)), zero, np.zeros(3), [0.0, np.pi, 0.0])
print("point mass:", np.diag(B), "vs", [1 / np.pi**2, -2 / np.pi**2, 1 / np.pi**2])

model = Rank1(phi1, phi2)
pts = np.array([np.zeros(3), r])
real = simulate(SimConfig(model, pts, n_samples=5000, seed=2), workers=4)
est, se = empirical_cov(real, 0, 1)
print("largest |empirical - kernel| / stderr:", np.max(np.abs(est - kernel_rank1(phi1, phi2, pts[0], pts[1])) / se))
