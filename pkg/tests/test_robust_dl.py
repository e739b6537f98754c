import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdl.errors import DomainError, IntegrityError, ShapeError
from robustdl.penalties import CappedL1, Identity, Log, Lq, Mcp, Scad
from robustdl.robust_dl import (FitSettings, check_unit_norm, fit, outlier_scores,
                                refresh_weights, residual_norms, robust_objective,
                                surrogate_objective)

PENALTIES = [Identity(), Lq(0.5), Log(1.0), CappedL1(2.0), Scad(1.0, 3.7), Mcp(1.0, 2.0)]


def data(seed, d=6, n=60):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    X[:, :5] *= 10  # a few gross outliers
    return X


def robust_loop(X, D, A, lam, penalty):
    """Sample-by-sample recomputation of the robust objective."""
    total = 0.0
    for i in range(X.shape[1]):
        r = X[:, i] - D @ A[:, i]
        total += 0.5 * penalty.value(math.sqrt(float(r @ r)))
    return total + lam * float(np.sum(np.abs(A)))


def test_objective_examples():
    X = np.array([[3.0], [4.0]])
    D = np.eye(2)
    A = np.zeros((2, 1))
    assert robust_objective(X, D, A, 0.1, Identity()) == pytest.approx(2.5)
    assert robust_objective(X, D, A, 0.1, Log(1.0)) == pytest.approx(0.5 * math.log(6.0))
    A[0, 0] = 3.0
    assert robust_objective(X, D, A, 0.1, CappedL1(1.0)) == pytest.approx(0.5 + 0.3)
    assert surrogate_objective(X, D, A, np.array([2.0]), 0.1) == pytest.approx(16.0 + 0.3)


@pytest.mark.parametrize("penalty", PENALTIES, ids=repr)
def test_zero_residual_contributes_g_at_zero(penalty):
    X = np.array([[1.0], [0.0]])
    D = np.eye(2)
    A = np.array([[1.0], [0.0]])
    assert robust_objective(X, D, A, 0.0, penalty) == 0.5 * penalty.value(0.0)


def test_objective_checks_unit_norm():
    X = np.ones((2, 1))
    with pytest.raises(IntegrityError):
        robust_objective(X, 2 * np.eye(2), np.zeros((2, 1)), 0.1, Identity())
    with pytest.raises(ShapeError):
        robust_objective(X, np.eye(2), np.zeros((3, 1)), 0.1, Identity())
    with pytest.raises(ShapeError):
        surrogate_objective(X, np.eye(2), np.zeros((2, 1)), np.ones(2), 0.1)


def test_outlier_scores():
    s = np.array([2.0, 0.5, 0.0])
    np.testing.assert_allclose(outlier_scores(s, 1e-12), [0.5, 2.0, 1e12])


def test_perfect_fit_hits_weight_cap():
    D = np.eye(3)
    X = D.copy()
    A = np.eye(3)
    s = refresh_weights(X, D, A, FitSettings(k=3, penalty=Lq(0.5)))
    assert np.all(s == 1e8)
    s = refresh_weights(X, D, A, FitSettings(k=3, penalty=Identity()))
    np.testing.assert_allclose(s, 1 / (2e-8))


@pytest.mark.parametrize("penalty", PENALTIES, ids=repr)
def test_history_matches_recomputation(penalty):
    X = data(0)
    cfg = FitSettings(k=4, lam=0.1, penalty=penalty, M=4)
    ends = {}
    fit(X, cfg, callback=lambda o, it, cur, D, A, s: ends.__setitem__(o, (D.copy(), A.copy())))
    res = fit(X, cfg)
    for o, rec in enumerate(res.history):
        D, A = ends[o]
        assert rec.robust_objective == pytest.approx(robust_loop(X, D, A, 0.1, penalty),
                                                     rel=1e-12, abs=1e-12)
        # the weights used in each outer iteration come from the previous iterate
        if o > 0:
            D0, A0 = ends[o - 1]
            np.testing.assert_array_equal(rec.weights, refresh_weights(X, D0, A0, cfg))
    np.testing.assert_array_equal(res.s, refresh_weights(X, *ends[cfg.M - 1], cfg))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), p=st.sampled_from(PENALTIES), k=st.integers(1, 8),
       lam=st.floats(0.01, 0.5))
def test_mm_descent(seed, p, k, lam):
    X = data(seed, d=5, n=40)
    res = fit(X, FitSettings(k=k, lam=lam, penalty=p, M=6, seed=seed))
    obj = res.objectives
    assert np.all(np.diff(obj) <= 1e-9 * np.maximum(1.0, np.abs(obj[:-1])))
    check_unit_norm(res.D, 1e-10)


@pytest.mark.parametrize("penalty", [Log(1.0), Identity()], ids=repr)
def test_inner_loop_descends(penalty):
    X = data(1)
    trace = {}

    def record(outer, it, cur, D, A, s):
        trace.setdefault(outer, []).append(cur)

    fit(X, FitSettings(k=5, lam=0.1, penalty=penalty, M=3), callback=record)
    for vals in trace.values():
        v = np.array(vals)
        assert np.all(np.diff(v) <= 1e-10 * np.abs(v[:-1]))


def test_majorizer_touches_at_current_iterate():
    # at the iterate where weights were computed, the robust objective and
    # the surrogate plus constant agree; elsewhere the surrogate is above
    X = data(2)
    p = Log(1.0)
    cfg = FitSettings(k=4, lam=0.1, penalty=p, M=1)
    res = fit(X, cfg)
    D, A = res.D, res.A
    v0 = residual_norms(X, D, A) ** 2
    s = res.s
    const = 0.5 * np.sum(np.log(1 + np.sqrt(v0)) - s * v0)
    assert robust_objective(X, D, A, 0.1, p) == pytest.approx(
        surrogate_objective(X, D, A, s, 0.1) + const, rel=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(20):
        A2 = A + 0.3 * rng.standard_normal(A.shape)
        assert robust_objective(X, D, A2, 0.1, p) <= surrogate_objective(X, D, A2, s, 0.1) \
            + const + 1e-9


def test_uniform_weights_give_plain_dictionary_learning():
    X = data(3)
    trace = []
    res = fit(X, FitSettings(k=4, lam=0.1, penalty=Identity(), M=3), update_weights=False,
              callback=lambda o, it, cur, D, A, s: trace.append(cur))
    assert np.all(res.s == 1.0)
    assert all(np.all(h.weights == 1.0) for h in res.history)
    # surrogate with unit weights is the plain objective, monotone across outer steps too
    assert np.all(np.diff(trace) <= 1e-10 * np.abs(trace[:-1]))
    plain = 0.5 * np.sum((X - res.D @ res.A) ** 2) + 0.1 * np.abs(res.A).sum()
    assert trace[-1] == pytest.approx(plain, rel=1e-12)


def test_outliers_downweighted():
    X = data(4, n=100)
    res = fit(X, FitSettings(k=3, lam=0.1, penalty=Log(1.0), M=5))
    assert res.s[:5].max() < np.median(res.s[5:])


def test_deterministic():
    X = data(5)
    cfg = FitSettings(k=6, lam=0.1, M=3, seed=11)
    a, b = fit(X, cfg), fit(X, cfg)
    assert np.array_equal(a.D, b.D) and np.array_equal(a.s, b.s)
    c = fit(X, replace(cfg, seed=12))
    assert not np.array_equal(a.D, c.D)


def test_continuation_from_state():
    X = data(6)
    cfg = FitSettings(k=4, lam=0.1, M=4)
    full = fit(X, cfg)
    first = fit(X, replace(cfg, M=2))
    rest = fit(X, replace(cfg, M=2), D_init=first.D, s_init=first.s, A_init=first.A)
    np.testing.assert_array_equal(rest.D, full.D)
    np.testing.assert_array_equal(rest.objectives, full.objectives[2:])


def test_random_code_start():
    X = data(7)
    res = fit(X, FitSettings(k=4, lam=0.1, M=3, init_A="random"))
    assert np.all(np.diff(res.objectives) <= 1e-9 * np.abs(res.objectives[:-1]))


@pytest.mark.parametrize("kwargs", [dict(k=0), dict(k=2, M=0), dict(k=2, lam=-1.0),
                                    dict(k=2, inner_max=0), dict(k=2, inner_tol=0.0),
                                    dict(k=2, init="pca"), dict(k=2, init_A="ones"),
                                    dict(k=2, batch_atoms=0), dict(k=2, r_floor=0.0),
                                    dict(k=2, lam=float("nan"))])
def test_settings_validation(kwargs):
    with pytest.raises(DomainError):
        FitSettings(**kwargs)


def test_fit_input_validation():
    cfg = FitSettings(k=2, M=1)
    with pytest.raises(DomainError):
        fit(np.zeros((3, 0)), cfg)
    X = data(8)
    X[0, 0] = np.nan
    with pytest.raises(DomainError):
        fit(X, cfg)
    with pytest.raises(DomainError):
        fit(data(8), cfg, D_init=np.eye(6)[:, :2])
    with pytest.raises(ShapeError):
        fit(data(8), cfg, D_init=np.eye(6)[:, :3], s_init=np.ones(60))
    with pytest.warns(UserWarning):
        fit(data(8, n=3), FitSettings(k=4, M=1))
