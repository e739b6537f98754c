import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdl.dict_update import update_dictionary, weighted_fit_objective
from robustdl.errors import DomainError, ShapeError


def unit_columns(rng, d, k):
    D = rng.standard_normal((d, k))
    return D / np.linalg.norm(D, axis=0)


def problem(seed, d=6, k=5, n=40, density=0.5):
    rng = np.random.default_rng(seed)
    D = unit_columns(rng, d, k)
    A = rng.standard_normal((k, n)) * (rng.random((k, n)) < density)
    A[:, 0] = 1.0  # every atom in use
    X = rng.standard_normal((d, n))
    s = rng.uniform(0.1, 3.0, n)
    return D, X, A, s


def projected_gradient(D, X, A, s, iters=5000):
    """Independent oracle: gradient steps on the weighted fit, renormalising atoms."""
    D = D.copy()
    W = A * s
    L = np.linalg.norm(W @ A.T, 2)
    for _ in range(iters):
        G = (D @ A - X) @ W.T
        D -= G / L
        D /= np.linalg.norm(D, axis=0)
    return D


def test_one_atom_per_sample_recovers_weighted_mean_direction():
    # each sample uses only atom 0 with coefficient 1: the update is the
    # normalised weighted sum of the samples
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 10)) + np.array([[3.0], [0], [0], [0]])
    A = np.zeros((1, 10))
    A[0] = 1.0
    s = rng.uniform(0.5, 2.0, 10)
    D = update_dictionary(unit_columns(rng, 4, 1), X, A, s)
    target = (X * s).sum(axis=1)
    np.testing.assert_allclose(D[:, 0], target / np.linalg.norm(target), atol=1e-12)


def test_unit_norm_preserved():
    D, X, A, s = problem(1)
    out = update_dictionary(D, X, A, s, sweeps=3)
    np.testing.assert_allclose(np.linalg.norm(out, axis=0), 1.0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), sweeps=st.integers(1, 4))
def test_each_sweep_descends(seed, sweeps):
    D, X, A, s = problem(seed)
    prev = weighted_fit_objective(D, X, A, s)
    for _ in range(sweeps):
        D = update_dictionary(D, X, A, s)
        cur = weighted_fit_objective(D, X, A, s)
        assert cur <= prev + 1e-10 * max(1.0, prev)
        prev = cur


@pytest.mark.parametrize("seed", range(5))
def test_close_to_projected_gradient_oracle(seed):
    D, X, A, s = problem(seed, n=60)
    ours = weighted_fit_objective(update_dictionary(D, X, A, s, sweeps=200), X, A, s)
    oracle = weighted_fit_objective(projected_gradient(D, X, A, s), X, A, s)
    assert ours <= 1.05 * oracle


def test_weights_equal_scaled_samples():
    D, X, A, s = problem(2)
    root = np.sqrt(s)
    a = update_dictionary(D, X, A, s, sweeps=2)
    b = update_dictionary(D, X * root, A * root, None, sweeps=2)
    assert np.array_equal(a, b)


def test_zero_weight_samples_have_no_influence():
    D, X, A, s = problem(3)
    s[5:15] = 0.0
    a = update_dictionary(D, X, A, s)
    X2 = X.copy()
    X2[:, 5:15] = 1e6 * np.random.default_rng(9).standard_normal((X.shape[0], 10))
    b = update_dictionary(D, X2, A, s)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_all_zero_weights_leave_dictionary_unchanged():
    D, X, A, _ = problem(4)
    out = update_dictionary(D, X, A, np.zeros(X.shape[1]))
    assert np.array_equal(out, D)


def test_zero_codes_leave_dictionary_unchanged():
    D, X, _, s = problem(5)
    out = update_dictionary(D, X, np.zeros((D.shape[1], X.shape[1])), s)
    assert np.array_equal(out, D)


def test_unused_atom_replaced_by_worst_sample():
    D, X, A, s = problem(6)
    A[2] = 0.0
    A[4] = 0.0
    out = update_dictionary(D, X, A, s)
    # atom 2 is visited after atoms 0 and 1 are updated and before atom 3 is
    mid = out.copy()
    mid[:, 3] = D[:, 3]
    R = (X - mid @ A) * np.sqrt(s)
    res = np.einsum("ij,ij->j", R, R)
    first = int(np.argmax(res))
    np.testing.assert_allclose(out[:, 2], X[:, first] / np.linalg.norm(X[:, first]),
                               atol=1e-12)
    # atom 4 takes a different sample
    cos = np.abs(X.T @ out[:, 4]) / np.linalg.norm(X, axis=0)
    second = int(np.argmax(cos))
    assert cos[second] == pytest.approx(1.0, abs=1e-12) and second != first
    # replacing an unused atom does not change the objective
    kept = out.copy()
    kept[:, [2, 4]] = D[:, [2, 4]]
    assert weighted_fit_objective(out, X, A, s) == weighted_fit_objective(kept, X, A, s)


def test_errors():
    D, X, A, s = problem(7)
    with pytest.raises(ShapeError):
        update_dictionary(D[:-1], X, A, s)
    with pytest.raises(ShapeError):
        update_dictionary(D, X, A[:, :-1], s)
    with pytest.raises(ShapeError):
        update_dictionary(D, X, A, s[:-1])
    with pytest.raises(DomainError):
        update_dictionary(D, X, A, -s)
    with pytest.raises(DomainError):
        update_dictionary(D, X, A, s, sweeps=0)
