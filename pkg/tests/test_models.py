import pytest

from maternfield.models import (
    ConstraintViolation,
    Rank0,
    Rank1,
    Rank2Simplex,
    Rank2Triangle,
    check_constraints,
    field_dimension,
)
from maternfield.spectral import MaternParams, RadialMeasure


def m(atom0=0.0):
    return RadialMeasure.build(MaternParams(1.5, 1.0), atom0=atom0)


def test_no_atoms_ok():
    for model in (Rank0(m()), Rank1(m(), m()), Rank2Triangle((m(), m(), m())), Rank2Simplex(tuple(m() for _ in range(5)))):
        assert check_constraints(model).ok


def test_rank1_atoms():
    rep = check_constraints(Rank1(m(0.2), m(0.1)))
    assert not rep.ok
    assert "Phi1({0})" in rep.violations[0] and "Phi2({0})" in rep.violations[0]
    with pytest.raises(ConstraintViolation):
        rep.raise_if_violated()
    assert check_constraints(Rank1(m(0.2), m(0.2))).ok


def test_simplex_atoms():
    assert check_constraints(Rank2Simplex(tuple(m(a) for a in (0.2, 0.2, 0.5, 0.1, 0.0)))).ok
    rep = check_constraints(Rank2Simplex(tuple(m(a) for a in (0.2, 0.3, 0.5, 0.2, 0.1))))
    assert len(rep.violations) == 3


def test_unconstrained_models():
    assert check_constraints(Rank0(m(0.4))).ok
    assert check_constraints(Rank2Triangle((m(0.1), m(0.0), m(0.3)))).ok


def test_model_shapes():
    assert [field_dimension(x) for x in (Rank0(m()), Rank1(m(), m()), Rank2Triangle((m(),) * 3), Rank2Simplex((m(),) * 5))] == [1, 3, 2, 6]
    with pytest.raises(TypeError):
        Rank2Simplex((m(),) * 4)
    with pytest.raises(TypeError):
        Rank0(MaternParams(1.5, 1.0))
