"""
Robust dictionary learning by majorization-minimization.

The robust problem

    min_{D, A}  1/2 sum_i F(||x_i - D a_i||^2) + lam ||A||_1,   ||d_j|| = 1

with concave F = g o sqrt is majorized at the current iterate by a weighted
least-squares problem with per-sample weights s_i = F'(residual_i^2). Each outer
iteration alternates dictionary updates and weighted sparse coding on that
surrogate until it stalls, then refreshes the weights.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import penalties as pen
from .dict_update import update_dictionary
from .errors import DomainError, IntegrityError, ShapeError
from .sparse_coding import DEFAULT_S_MIN, LassoSettings, sparse_code_all

logger = logging.getLogger(__name__)

UNIT_NORM_TOL = 1e-8


@dataclass(frozen=True)
class FitSettings:
    k: int
    lam: float = 0.1
    penalty: pen.ConcavePenalty = pen.Log(1.0)
    M: int = 10
    inner_max: int = 30
    inner_tol: float = 1e-5
    r_floor: float = pen.DEFAULT_R_FLOOR
    w_max: float = pen.DEFAULT_W_MAX
    s_min: float = DEFAULT_S_MIN
    seed: int = 0
    init: str = "random"  # "random" | "undercomplete"
    batch_atoms: Optional[int] = None  # b for undercomplete init; None -> floor(d/2)
    init_A: str = "zero"  # "zero" | "random"
    warm_start: bool = True
    dict_sweeps: int = 1
    lasso: LassoSettings = LassoSettings()

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")
        if self.inner_max < 1:
            raise DomainError("inner_max must be >= 1")
        if not self.lam >= 0:
            raise DomainError(f"lambda must be >= 0, got {self.lam}")
        if not self.inner_tol > 0:
            raise DomainError("inner_tol must be > 0")
        if not (self.r_floor > 0 and self.w_max > 0 and self.s_min > 0):
            raise DomainError("r_floor, w_max and s_min must be positive")
        if self.init not in ("random", "undercomplete"):
            raise DomainError(f"unknown init {self.init!r}")
        if self.init_A not in ("zero", "random"):
            raise DomainError(f"unknown init_A {self.init_A!r}")
        if self.batch_atoms is not None and self.batch_atoms < 1:
            raise DomainError("batch_atoms must be >= 1")
        if self.dict_sweeps < 1:
            raise DomainError("dict_sweeps must be >= 1")


@dataclass
class OuterRecord:
    robust_objective: float
    surrogate_objective: float
    inner_iterations: int
    inner_converged: bool
    coding_converged: bool
    weights: np.ndarray  # weights used during this outer iteration


@dataclass
class FitResult:
    D: np.ndarray
    A: np.ndarray
    s: np.ndarray
    history: list = field(default_factory=list)

    @property
    def converged(self) -> list:
        return [h.inner_converged for h in self.history]

    @property
    def objectives(self) -> np.ndarray:
        return np.array([h.robust_objective for h in self.history])


def residual_norms(X, D, A):
    R = X - D @ A
    return np.sqrt(np.einsum("ij,ij->j", R, R))


def _check_shapes(X, D, A):
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    A = np.asarray(A, dtype=float)
    if X.ndim != 2 or D.ndim != 2 or A.ndim != 2:
        raise ShapeError("X, D and A must be 2-D")
    if D.shape[0] != X.shape[0] or A.shape != (D.shape[1], X.shape[1]):
        raise ShapeError(f"incompatible shapes X{X.shape}, D{D.shape}, A{A.shape}")
    return X, D, A


def check_unit_norm(D, tol=UNIT_NORM_TOL):
    norms = np.linalg.norm(D, axis=0)
    worst = float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0
    if worst > tol:
        raise IntegrityError(f"dictionary atom norm deviates from 1 by {worst:.3g}")


def robust_objective(X, D, A, lam, penalty):
    """1/2 sum_i F(||x_i - D a_i||^2) + lam ||A||_1; checks the unit-norm constraint."""
    X, D, A = _check_shapes(X, D, A)
    check_unit_norm(D)
    R = X - D @ A
    sq = np.einsum("ij,ij->j", R, R)
    return 0.5 * float(np.sum(pen.f_value(penalty, sq))) + lam * float(np.abs(A).sum())


def surrogate_objective(X, D, A, s, lam):
    """
    Weighted surrogate 1/2 sum_i s_i ||x_i - D a_i||^2 + lam ||A||_1.

    Coding solves each column with lam / s_i on the unweighted quadratic; that
    is this objective divided by s_i. Excluded samples (zero weight, zero
    code) contribute nothing.
    """
    X, D, A = _check_shapes(X, D, A)
    s = np.asarray(s, dtype=float)
    if s.shape != (X.shape[1],):
        raise ShapeError(f"weights have shape {s.shape}, expected ({X.shape[1]},)")
    R = X - D @ A
    sq = np.einsum("ij,ij->j", R, R)
    return 0.5 * float(np.sum(s * sq)) + lam * float(np.abs(A).sum())


def outlier_scores(s, s_min=DEFAULT_S_MIN):
    """Outlier score 1 / max(s_i, s_min); larger means more outlying."""
    s = np.asarray(s, dtype=float)
    return 1.0 / np.maximum(s, s_min)


def refresh_weights(X, D, A, settings):
    r = residual_norms(X, D, A)
    return np.asarray(pen.weight(settings.penalty, r, settings.r_floor, settings.w_max), dtype=float)


def random_dictionary(d, k, rng):
    D = rng.standard_normal((d, k))
    norms = np.linalg.norm(D, axis=0)
    # a zero Gaussian column has probability zero; guard anyway
    norms[norms == 0] = 1.0
    D /= norms
    return D


def _seed_sequence(seed, *key):
    return np.random.SeedSequence([int(seed), *key])


def _initial_state(X, settings):
    d, n = X.shape
    k = settings.k
    if settings.init == "undercomplete" and k > d:
        from .undercomplete_init import undercomplete_init

        D, s = undercomplete_init(X, k, settings)
        A = np.zeros((k, n))
        return D, A, s
    rng = np.random.default_rng(_seed_sequence(settings.seed, 0))
    D = random_dictionary(d, k, rng)
    if settings.init_A == "random":
        A = rng.standard_normal((k, n)) / np.sqrt(k)
    else:
        A = np.zeros((k, n))
    return D, A, np.ones(n)


def fit(X, settings: FitSettings, D_init=None, s_init=None, A_init=None,
        update_weights=True, callback=None) -> FitResult:
    """
    Learn a robust dictionary.

    Parameters
    ----------
    X : ndarray (d, n)
        Samples as columns.
    settings : FitSettings
    D_init, s_init, A_init : optional
        Continue from a given state instead of initializing. ``D_init`` and
        ``s_init`` must be given together; ``A_init`` defaults to zeros.
    update_weights : bool
        When False the weights are never refreshed, which turns the fit into
        plain (non-robust) dictionary learning for an all-ones start.
    callback : callable, optional
        Called as ``callback(outer, inner, surrogate, D, A, s)`` after every
        inner alternation.

    Returns
    -------
    FitResult with the final dictionary, codes, weights (refreshed after the
    last inner loop) and one history record per outer iteration.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.size == 0:
        raise DomainError("X must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise DomainError("X contains non-finite values")
    d, n = X.shape
    if n < settings.k:
        warnings.warn(f"fewer samples ({n}) than atoms ({settings.k})", stacklevel=2)

    if D_init is not None:
        if s_init is None:
            raise DomainError("s_init is required with D_init")
        D = np.array(D_init, dtype=float)
        s = np.array(s_init, dtype=float)
        if D.shape != (d, settings.k) or s.shape != (n,):
            raise ShapeError("initial state does not match data and k")
        A = np.zeros((settings.k, n)) if A_init is None else np.array(A_init, dtype=float)
    else:
        D, A, s = _initial_state(X, settings)

    lam = settings.lam
    history = []
    for outer in range(settings.M):
        prev = surrogate_objective(X, D, A, s, lam)
        inner_converged = False
        coding_ok = True
        it = 0
        for it in range(1, settings.inner_max + 1):
            D = update_dictionary(D, X, A, s, sweeps=settings.dict_sweeps)
            A, info = sparse_code_all(
                D, X, lam, s, settings.s_min, settings.lasso,
                A0=A if settings.warm_start else None, return_info=True,
            )
            coding_ok = info.all_converged
            cur = surrogate_objective(X, D, A, s, lam)
            if callback is not None:
                callback(outer, it, cur, D, A, s)
            change = abs(prev - cur) / max(abs(prev), 1e-300)
            prev = cur
            if change < settings.inner_tol:
                inner_converged = True
                break
        robj = robust_objective(X, D, A, lam, settings.penalty)
        history.append(OuterRecord(robj, prev, it, inner_converged, coding_ok, s.copy()))
        logger.debug("outer %d: robust=%.6g surrogate=%.6g inner=%d", outer, robj, prev, it)
        if update_weights:
            s = refresh_weights(X, D, A, settings)
    return FitResult(D=D, A=A, s=s, history=history)
