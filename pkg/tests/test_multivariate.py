import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maternfield.multivariate import (
    MultiMaternSpec,
    Verdict,
    is_cnd,
    is_psd,
    parsimonious_b,
    sampling_grid,
    spectral_matrix,
    validate,
)
from maternfield.spectral import MaternParams, matern_spectral_density

BETA3 = 0.9 ** np.abs(np.subtract.outer(np.arange(3), np.arange(3)))


def _min_eig_ratio(spec, lams):
    worst = np.inf
    for lam in lams:
        w = np.linalg.eigvalsh(spectral_matrix(spec, lam))
        worst = min(worst, w.min() / np.abs(w).max())
    return worst


def test_cnd_examples():
    t = np.array([1.0, 2.0, 3.0])
    assert is_cnd(t[:, None] + t[None, :])
    assert is_cnd(np.full((3, 3), -4.0))
    assert is_cnd(np.abs(t[:, None] - t[None, :]))
    assert is_cnd((t[:, None] - t[None, :]) ** 2)
    assert is_cnd(np.maximum(t[:, None], t[None, :]))
    assert is_cnd(-np.outer(t, t))
    assert not is_cnd(np.eye(2))
    assert is_cnd(np.array([[3.0]]))


def test_cnd_input_checks():
    with pytest.raises(ValueError):
        is_cnd(np.ones((2, 3)))
    with pytest.raises(ValueError):
        is_cnd(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_cnd_matches_brute_force(m, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, m))
    theta = A + A.T
    c = rng.normal(size=(10_000, m))
    c -= c.mean(axis=1, keepdims=True)
    q = np.einsum("ni,ij,nj->n", c, theta, c)
    if is_cnd(theta):
        assert q.max() <= 1e-9 * np.abs(theta).max() * np.einsum("ni,ni->n", c, c).max()
    else:
        # a positive direction exists; check it with the exact contrast basis
        V = np.linalg.qr(np.column_stack([np.ones(m), np.eye(m)[:, : m - 1]]))[0][:, 1:]
        assert np.linalg.eigvalsh(V.T @ theta @ V).max() > 0


def test_parsimonious_b_values():
    assert parsimonious_b(0.5, 1.5, 1.0) == pytest.approx(8 / (3 * math.pi), abs=1e-12)
    assert parsimonious_b(1.3, 1.3, 0.4) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValueError):
        parsimonious_b(0.0, 1.0)


@given(st.floats(0.05, 10), st.floats(0.05, 10), st.floats(-1, 1))
def test_parsimonious_b_symmetric_and_bounded(ni, nj, beta):
    b = parsimonious_b(ni, nj, beta)
    assert b == pytest.approx(parsimonious_b(nj, ni, beta), rel=1e-13)
    # log-convexity of the gamma ratio keeps the factor at most one
    assert abs(b) <= abs(beta) * (1 + 1e-12)


def test_spectral_matrix_scalar_case():
    spec = MultiMaternSpec([[1.3]], [[0.7]], [[2.0]])
    for lam in (0.0, 0.5, 3.0):
        ref = matern_spectral_density(MaternParams(1.3, 0.7, 2.0), lam)
        assert spectral_matrix(spec, lam)[0, 0] == pytest.approx(ref, rel=1e-13)


def test_parsimonious_spec_psd():
    spec = MultiMaternSpec.parsimonious([0.5, 1.0, 1.5], 1.0, [1.0, 1.0, 1.0], BETA3)
    assert _min_eig_ratio(spec, np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 100)])) >= -1e-10
    v = validate(spec)
    assert (v.status, v.rule) == ("valid", "parsimonious")


def test_sigma_above_bound_is_invalid():
    nu = np.array([[0.5, 1.0], [1.0, 1.5]])
    spec = MultiMaternSpec(nu, np.ones((2, 2)), [[1.0, 0.99], [0.99, 1.0]])
    assert _min_eig_ratio(spec, sampling_grid(spec)) < 0
    v = validate(spec)
    assert v.status == "invalid" and v.rule == "numeric-PSD-sample"
    lam = v.witness["lambda"]
    F = spectral_matrix(spec, lam)
    d = np.sqrt(np.diag(F))
    vec = np.array(v.witness["eigenvector"])
    assert vec @ (F / np.outer(d, d)) @ vec == pytest.approx(v.witness["eigenvalue"], rel=1e-10)
    assert v.witness["eigenvalue"] < -1e-10


def test_a2a_rule():
    ai = np.array([1.0, 2.0, 3.0])
    a2 = 0.5 * (ai[:, None] ** 2 + ai[None, :] ** 2)
    nu = 1.2
    corr = 0.5 + 0.5 * np.eye(3)
    sigma = corr / a2**nu
    sigma = sigma / np.sqrt(np.outer(np.diag(sigma), np.diag(sigma)))
    spec = MultiMaternSpec(np.full((3, 3), nu), np.sqrt(a2), sigma * np.sqrt(np.outer(np.diag(sigma), np.diag(sigma))))
    v = validate(spec)
    assert (v.status, v.rule) == ("valid", "A2a")
    assert _min_eig_ratio(spec, sampling_grid(spec)) >= -1e-10


def test_a1_rule():
    t = np.array([0.0, 0.5, 2.0])
    nu = 1.0 + np.abs(t[:, None] - t[None, :])
    g = np.exp(np.vectorize(math.lgamma)(nu + 1.5) - np.vectorize(math.lgamma)(nu))
    s = (0.3 + 0.7 * np.eye(3)) / g
    spec = MultiMaternSpec(nu, np.full((3, 3), 1.5), s)
    v = validate(spec)
    assert (v.status, v.rule) == ("valid", "A1")
    assert _min_eig_ratio(spec, sampling_grid(spec)) >= -1e-10


def test_cnd_direction_counterexample():
    # -nu is CND here but nu is not; the model is invalid at large lambda
    nu = np.array([[5.0, 1.0], [1.0, 5.0]])
    assert is_cnd(-nu) and not is_cnd(nu)
    spec = MultiMaternSpec(nu, np.ones((2, 2)), [[1.0, 0.9], [0.9, 1.0]])
    assert validate(spec).status == "invalid"


def test_undetermined():
    spec = MultiMaternSpec(np.ones((2, 2)), [[1.0, 1.5], [1.5, 2.0]], [[1.0, 0.5], [0.5, 1.0]])
    v = validate(spec)
    assert v.status == "undetermined" and v.witness is None


def test_spec_validation():
    with pytest.raises(ValueError):
        MultiMaternSpec([[1.0, 2.0], [1.0, 1.0]], np.ones((2, 2)), np.eye(2))
    with pytest.raises(ValueError):
        MultiMaternSpec(np.ones((2, 2)), -np.ones((2, 2)), np.eye(2))
    with pytest.raises(ValueError):
        MultiMaternSpec(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        MultiMaternSpec(np.ones((2, 2)), np.ones((2, 2)), [[1.0, 0.5], [0.5, 1.0]], beta=[[1.0, 0.1], [0.1, 1.0]])
    with pytest.raises(ValueError):
        Verdict("invalid", "A1")
    with pytest.raises(ValueError):
        Verdict("maybe", "A1")


def test_is_psd():
    assert is_psd(np.eye(3))
    assert not is_psd(np.diag([1.0, -0.1]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_valid_verdicts_are_psd(m, seed):
    rng = np.random.default_rng(seed)
    nui = rng.uniform(0.3, 3.0, m)
    if rng.random() < 0.5:
        nu = 0.5 * (nui[:, None] + nui[None, :])
    else:
        nu = np.full((m, m), nui[0])
    ai = rng.uniform(0.5, 2.0, m)
    a = np.sqrt(0.5 * (ai[:, None] ** 2 + ai[None, :] ** 2)) if rng.random() < 0.5 else np.full((m, m), ai[0])
    A = rng.normal(size=(m, m))
    C = A @ A.T + 0.1 * np.eye(m)
    d = np.sqrt(np.diag(C))
    sigma = C / np.outer(d, d) * rng.uniform(0.2, 1.0)
    np.fill_diagonal(sigma, 1.0)
    spec = MultiMaternSpec(nu, a, sigma)
    v = validate(spec)
    if v.status == "valid":
        assert _min_eig_ratio(spec, sampling_grid(spec)) >= -1e-9
    elif v.status == "invalid":
        assert v.witness["eigenvalue"] < 0
