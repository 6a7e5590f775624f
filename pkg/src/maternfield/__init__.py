"""Isotropic tensor-valued random fields with Matern-type spectral measures.

Kernels of scalar, vector and symmetric-matrix fields, validity checks for
multivariate Matern models, real Clebsch-Gordan coefficients of SO(3) and
spectral Monte-Carlo simulation.
"""

from .models import (
    ConstraintReport,
    ConstraintViolation,
    Rank0,
    Rank1,
    Rank2Simplex,
    Rank2Triangle,
    check_constraints,
    field_dimension,
)
from .spectral import (
    ConfigurationError,
    DualMaternParams,
    MaternParams,
    PointMass,
    RadialMeasure,
    Tabulated,
    build_grid,
)
from .kernels import (
    AccuracyWarning,
    covariance,
    covariance_batch,
    gram_matrix,
    kernel_rank0,
    kernel_rank1,
    kernel_rank2_simplex,
    kernel_rank2_triangle,
)
from .multivariate import MultiMaternSpec, Verdict, is_cnd, validate
from .simulate import SimConfig, UnsupportedModelError, empirical_cov

# the simulation entry point stays at maternfield.simulate.simulate so the
# submodule name is not shadowed
__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "ConfigurationError",
    "ConstraintReport",
    "ConstraintViolation",
    "DualMaternParams",
    "MaternParams",
    "MultiMaternSpec",
    "PointMass",
    "RadialMeasure",
    "Rank0",
    "Rank1",
    "Rank2Simplex",
    "Rank2Triangle",
    "SimConfig",
    "Tabulated",
    "UnsupportedModelError",
    "Verdict",
    "build_grid",
    "check_constraints",
    "covariance",
    "covariance_batch",
    "empirical_cov",
    "field_dimension",
    "gram_matrix",
    "is_cnd",
    "kernel_rank0",
    "kernel_rank1",
    "kernel_rank2_simplex",
    "kernel_rank2_triangle",
    "validate",
]
