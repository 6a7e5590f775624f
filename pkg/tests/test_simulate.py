import numpy as np
import pytest
from scipy import stats

from maternfield.kernels import covariance
from maternfield.models import ConstraintViolation, Rank0, Rank1, Rank2Simplex, Rank2Triangle
from maternfield.simulate import SimConfig, UnsupportedModelError, empirical_cov, simulate
from maternfield.spectral import MaternParams, RadialMeasure
from maternfield.tensor_bases import mandel_matrix, mandel_vector

PTS = np.array([[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, -0.2, 0.8]])


def matern(nu, a, s2=1.0, atom0=0.0):
    return RadialMeasure.build(MaternParams(nu, a, s2), atom0=atom0)


MODELS = {
    "rank0": Rank0(matern(0.5, 1.0)),
    "rank1": Rank1(matern(1.5, 1.0, 0.7), matern(0.5, 2.0, 1.3)),
    "triangle": Rank2Triangle((matern(1.5, 1.0, 0.5), matern(2.0, 0.8, 0.3), matern(2.5, 1.2, 0.2))),
    "simplex": Rank2Simplex(tuple(matern(1.5 + 0.25 * k, 1.0, 0.2) for k in range(5))),
}


def _z_scores(model, real):
    worst = 0.0
    for i in range(len(PTS)):
        for j in range(len(PTS)):
            est, se = empirical_cov(real, i, j)
            K = covariance(model, PTS[i], PTS[j])
            worst = max(worst, float(np.max(np.abs(est - K) / se)))
    return worst


def test_rank0_mean_and_variance():
    real = simulate(SimConfig(MODELS["rank0"], PTS, n_samples=10_000, seed=1))
    assert real.shape == (10_000, 3, 1)
    mean = real.mean(axis=0)
    se = real.std(axis=0, ddof=1) / np.sqrt(real.shape[0])
    assert np.all(np.abs(mean) < 5 * se)
    est, se = empirical_cov(real, 0, 0)
    assert abs(est[0, 0] - 1.0) < 5 * se[0, 0]


def test_deterministic():
    cfg = SimConfig(MODELS["rank1"], PTS, n_samples=300, n_modes=128, seed=42)
    a = simulate(cfg)
    np.testing.assert_array_equal(a, simulate(cfg))
    np.testing.assert_array_equal(a, simulate(cfg, workers=3))
    assert not np.array_equal(a, simulate(SimConfig(MODELS["rank1"], PTS, n_samples=300, n_modes=128, seed=43)))


def test_samples_independent_of_count():
    # sample k does not depend on how many samples are drawn
    a = simulate(SimConfig(MODELS["rank0"], PTS, n_samples=10, seed=5))
    b = simulate(SimConfig(MODELS["rank0"], PTS, n_samples=300, seed=5))
    np.testing.assert_array_equal(a, b[:10])


def test_rank1_trace():
    real = simulate(SimConfig(MODELS["rank1"], PTS, n_samples=20_000, seed=2))
    x = real[:, 0, :] - real[:, 0, :].mean(axis=0)
    tr = np.sum(x * x, axis=1)
    se = tr.std(ddof=1) / np.sqrt(tr.size)
    assert abs(tr.mean() - (0.7 + 2 * 1.3)) < 5 * se


@pytest.mark.slow
@pytest.mark.parametrize("key", ["rank0", "rank1", "triangle", "simplex"])
def test_consistency(key):
    model = MODELS[key]
    real = simulate(SimConfig(model, PTS, n_samples=20_000, n_modes=512, seed=3), workers=4)
    assert _z_scores(model, real) < 5.0


def test_rank2_samples_symmetric():
    real = simulate(SimConfig(MODELS["simplex"], PTS, n_samples=20, seed=4))
    X = mandel_matrix(real)
    np.testing.assert_array_equal(X, np.swapaxes(X, -1, -2))
    np.testing.assert_allclose(mandel_vector(X), real, atol=1e-15)


@pytest.mark.slow
def test_gaussian_marginals():
    real = simulate(SimConfig(MODELS["rank0"], PTS[:1], n_samples=100_000, seed=6), workers=4)[:, 0, 0]
    z = (real - real.mean()) / real.std()
    assert abs(stats.skew(z)) < 0.1
    assert abs(stats.kurtosis(z, fisher=False) - 3.0) < 0.2


def test_errors():
    with pytest.raises(ValueError):
        empirical_cov(np.zeros((1, 2, 1)), 0, 1)
    with pytest.raises(UnsupportedModelError):
        simulate(SimConfig(Rank0(matern(1.5, 1.0, atom0=0.1)), PTS, n_samples=2))
    with pytest.raises(UnsupportedModelError):
        simulate(SimConfig(Rank0(matern(1.5, 1.0, 0.0)), PTS, n_samples=2))
    with pytest.raises(ConstraintViolation):
        simulate(SimConfig(Rank1(matern(1.5, 1.0, atom0=0.1), matern(1.5, 1.0)), PTS, n_samples=2))
    with pytest.raises(ValueError):
        SimConfig(MODELS["rank0"], np.zeros((3, 2)), n_samples=2)
    with pytest.raises(ValueError):
        SimConfig(MODELS["rank0"], PTS, n_samples=0)
    with pytest.raises(ValueError):
        SimConfig(MODELS["rank0"], PTS, n_samples=2, seed=-1)


def test_few_modes_warns(caplog):
    SimConfig(MODELS["rank0"], PTS, n_samples=2, n_modes=16)
    assert "below the recommended" in caplog.text
