"""Validity of multivariate Matern models.

Run with ``python demos/03_multivariate_validity.py``.
"""

import numpy as np

from maternfield import MultiMaternSpec, validate
from maternfield.multivariate import is_cnd, parsimonious_b

t = np.array([1.0, 2.0, 3.0])
print("theta_i + theta_j CND:", is_cnd(t[:, None] + t[None, :]))
print("max(theta_i, theta_j) CND:", is_cnd(np.maximum(t[:, None], t[None, :])))
print("identity CND:", is_cnd(np.eye(2)))

# Parsimonious model with smoothness 1/2, 1, 3/2 and correlations 0.9^|i-j|.
beta = 0.9 ** np.abs(np.subtract.outer(np.arange(3), np.arange(3)))
spec = MultiMaternSpec.parsimonious([0.5, 1.0, 1.5], 1.0, [1.0, 1.0, 1.0], beta)
print("b(1/2, 3/2) =", parsimonious_b(0.5, 1.5), "= 8 / (3 pi) =", 8 / (3 * np.pi))
print("parsimonious:", validate(spec).to_dict())

# Too strong a cross-covariance between a rough and a smooth component.
spec = MultiMaternSpec([[0.5, 1.0], [1.0, 1.5]], np.ones((2, 2)), [[1.0, 0.99], [0.99, 1.0]])
print("over-correlated:", validate(spec).to_dict())

# Common smoothness, scales a_ij^2 = (a_i^2 + a_j^2) / 2.
ai = np.array([1.0, 2.0, 3.0])
a2 = 0.5 * (ai[:, None] ** 2 + ai[None, :] ** 2)
sigma = (0.5 + 0.5 * np.eye(3)) / a2
sigma /= np.sqrt(np.outer(np.diag(sigma), np.diag(sigma)))
print("common smoothness:", validate(MultiMaternSpec(np.ones((3, 3)), np.sqrt(a2), sigma)).to_dict())
