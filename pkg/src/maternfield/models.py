"""Isotropic random-field models and the constraints on their atoms at zero."""

from dataclasses import dataclass
import math

from .spectral import RadialMeasure

__all__ = [
    "Rank0",
    "Rank1",
    "Rank2Triangle",
    "Rank2Simplex",
    "ConstraintViolation",
    "ConstraintReport",
    "check_constraints",
    "field_dimension",
]


class ConstraintViolation(ValueError):
    """The atoms at zero of a model are inconsistent."""


def _check_measures(measures, n, kind):
    if len(measures) != n or not all(isinstance(m, RadialMeasure) for m in measures):
        raise TypeError(f"{kind} needs {n} RadialMeasure instances")


@dataclass(frozen=True)
class Rank0:
    """Scalar field with radial spectral measure ``mu``."""

    mu: RadialMeasure

    def __post_init__(self):
        _check_measures((self.mu,), 1, "Rank0")

    @property
    def measures(self):
        return (self.mu,)


@dataclass(frozen=True)
class Rank1:
    """Vector field: ``phi1`` weights the longitudinal and ``phi2`` the transverse part."""

    phi1: RadialMeasure
    phi2: RadialMeasure

    def __post_init__(self):
        _check_measures((self.phi1, self.phi2), 2, "Rank1")

    @property
    def measures(self):
        return (self.phi1, self.phi2)


@dataclass(frozen=True)
class Rank2Triangle:
    """Two-component field; measure ``m`` carries the triangle vertex ``C^m``."""

    phi: tuple

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))
        _check_measures(self.phi, 3, "Rank2Triangle")

    @property
    def measures(self):
        return self.phi


@dataclass(frozen=True)
class Rank2Simplex:
    """Symmetric-matrix field; measure ``n`` carries the simplex vertex ``n``."""

    phi: tuple

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(self.phi))
        _check_measures(self.phi, 5, "Rank2Simplex")

    @property
    def measures(self):
        return self.phi


def field_dimension(model):
    """Number of real components of the field values."""
    return {Rank0: 1, Rank1: 3, Rank2Triangle: 2, Rank2Simplex: 6}[type(model)]


@dataclass(frozen=True)
class ConstraintReport:
    ok: bool
    violations: tuple = ()

    def raise_if_violated(self):
        if not self.ok:
            raise ConstraintViolation("; ".join(self.violations))


def _same(x, y):
    return math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-300)


def check_constraints(model):
    """Check the equalities between atoms at zero.

    A rank-1 field needs ``Phi1({0}) = Phi2({0})``; the simplex model needs
    ``Phi1({0}) = Phi2({0}) = 2 Phi4({0})`` and ``Phi5({0}) = 0``. Scalar and
    triangle models are unconstrained.

    Returns
    -------
    ConstraintReport
    """
    v = []
    if isinstance(model, Rank1):
        a1, a2 = model.phi1.atom0, model.phi2.atom0
        if not _same(a1, a2):
            v.append(f"Phi1({{0}}) = {a1!r} differs from Phi2({{0}}) = {a2!r}")
    elif isinstance(model, Rank2Simplex):
        a = [m.atom0 for m in model.phi]
        if not _same(a[0], a[1]):
            v.append(f"Phi1({{0}}) = {a[0]!r} differs from Phi2({{0}}) = {a[1]!r}")
        if not _same(a[0], 2 * a[3]):
            v.append(f"Phi1({{0}}) = {a[0]!r} differs from 2 Phi4({{0}}) = {2 * a[3]!r}")
        if a[4] != 0.0:
            v.append(f"Phi5({{0}}) = {a[4]!r} is not zero")
    elif not isinstance(model, (Rank0, Rank2Triangle)):
        raise TypeError(f"unknown model type {type(model).__name__}")
    return ConstraintReport(not v, tuple(v))
