"""
Per-sample Lasso solved by cyclic coordinate descent.

    min_a  1/2 ||x - D a||_2^2 + lam ||a||_1

All columns of a data matrix go through the same compiled kernel, so the
single-sample ``lasso`` and the batched ``sparse_code_all`` share one code path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError, ShapeError

ZERO_ATOM_NORM = 1e-12
DEFAULT_S_MIN = 1e-12
ACTIVE_SWEEPS = 10


@dataclass(frozen=True)
class LassoSettings:
    max_iters: int = 1000
    tol: float = 1e-7  # max absolute coefficient change over one sweep

    def __post_init__(self):
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        if not self.tol > 0:
            raise DomainError("tol must be > 0")


@numba.njit(cache=True)
def _sweep(D, diag, dead, a, r, li, only_active):
    d, k = D.shape
    max_change = 0.0
    for j in range(k):
        if dead[j]:
            continue
        old = a[j]
        if only_active and old == 0.0:
            continue
        rho = 0.0
        for t in range(d):
            rho += D[t, j] * r[t]
        rho += diag[j] * old
        if rho > li:
            new = (rho - li) / diag[j]
        elif rho < -li:
            new = (rho + li) / diag[j]
        else:
            new = 0.0
        delta = new - old
        if delta != 0.0:
            for t in range(d):
                r[t] -= D[t, j] * delta
            a[j] = new
            if abs(delta) > max_change:
                max_change = abs(delta)
    return max_change


@numba.njit(cache=True)
def _objective(a, r, li):
    return 0.5 * np.dot(r, r) + li * np.sum(np.abs(a))


@numba.njit(cache=True)
def _polish(D, x, a, r, li):
    # Active-set step: z solves the optimality system on the current support
    # with signs fixed. Move from a toward z, stopping at the first sign
    # change (that coordinate leaves the support). On this segment the
    # objective is a convex quadratic minimised at z, so it cannot increase;
    # the final comparison guards against an ill-conditioned solve.
    support = np.nonzero(a)[0]
    m = support.size
    if m == 0 or m > D.shape[0]:
        return
    Ds = np.empty((D.shape[0], m))
    for c in range(m):
        Ds[:, c] = D[:, support[c]]
    signs = np.sign(a[support])
    G = Ds.T @ Ds
    rhs = Ds.T @ x - li * signs
    try:
        z = np.linalg.solve(G, rhs)
    except Exception:
        return
    if not np.all(np.isfinite(z)):
        return
    cur = a[support]
    step = 1.0
    hit = -1
    for c in range(m):
        if np.sign(z[c]) != signs[c]:
            tc = cur[c] / (cur[c] - z[c])
            if tc < step:
                step = tc
                hit = c
    new = cur + step * (z - cur)
    if hit >= 0:
        new[hit] = 0.0
    a_new = a.copy()
    a_new[support] = new
    r_new = x - Ds @ new
    if _objective(a_new, r_new, li) <= _objective(a, r, li):
        a[:] = a_new
        r[:] = r_new


@numba.njit(cache=True)
def _cd_columns(D, X, lam, A0, active, max_iters, tol):
    # Cyclic CD with an active-set strategy: after each full sweep, up to
    # ACTIVE_SWEEPS sweeps over the nonzero coordinates, then a support polish.
    # Every step is non-increasing in the objective; iterations count sweeps
    # of either kind, and only a full sweep can declare convergence.
    d, k = D.shape
    n = X.shape[1]
    A = A0.copy()
    n_iter = np.zeros(n, dtype=np.int64)
    converged = np.ones(n, dtype=np.bool_)
    diag = np.zeros(k)
    for j in range(k):
        s = 0.0
        for t in range(d):
            s += D[t, j] * D[t, j]
        diag[j] = s
    dead = np.sqrt(diag) < ZERO_ATOM_NORM
    r = np.empty(d)
    a = np.empty(k)
    for i in range(n):
        if not active[i]:
            for j in range(k):
                A[j, i] = 0.0
            continue
        for j in range(k):
            a[j] = 0.0 if dead[j] else A[j, i]
        for t in range(d):
            r[t] = X[t, i]
        for j in range(k):
            if a[j] != 0.0:
                for t in range(d):
                    r[t] -= D[t, j] * a[j]
        li = lam[i]
        done = False
        it = 0
        while it < max_iters:
            it += 1
            if _sweep(D, diag, dead, a, r, li, False) < tol:
                done = True
                break
            for _ in range(ACTIVE_SWEEPS):
                if it >= max_iters:
                    break
                it += 1
                if _sweep(D, diag, dead, a, r, li, True) < tol:
                    break
            _polish(D, np.ascontiguousarray(X[:, i]), a, r, li)
        for j in range(k):
            A[j, i] = a[j]
        n_iter[i] = it
        converged[i] = done
    return A, converged, n_iter


def _check_dictionary(D, d=None):
    D = np.asarray(D, dtype=float)
    if D.ndim != 2:
        raise ShapeError(f"dictionary must be 2-D, got shape {D.shape}")
    if d is not None and D.shape[0] != d:
        raise ShapeError(f"dictionary has {D.shape[0]} rows, data has {d}")
    if not np.all(np.isfinite(D)):
        raise DomainError("dictionary has non-finite entries")
    return np.ascontiguousarray(D)


def _run(D, X, lam, A0, active, settings):
    A, conv, n_iter = _cd_columns(
        D, X, lam, A0, active, int(settings.max_iters), float(settings.tol)
    )
    return A, conv, n_iter


def lasso(D, x, lam_eff, settings=LassoSettings(), a0=None, return_info=False):
    """
    Solve the Lasso for a single sample.

    Parameters
    ----------
    D : ndarray (d, k)
    x : ndarray (d,)
    lam_eff : float >= 0
    a0 : ndarray (k,), optional
        Warm start.
    return_info : bool
        Also return ``(converged, n_sweeps)``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError("x must be a vector")
    D = _check_dictionary(D, x.shape[0])
    if not lam_eff >= 0:
        raise DomainError("lam_eff must be >= 0")
    k = D.shape[1]
    A0 = np.zeros((k, 1)) if a0 is None else np.asarray(a0, dtype=float).reshape(k, 1)
    A, conv, n_iter = _run(
        D, np.asfortranarray(x.reshape(-1, 1)), np.array([float(lam_eff)]), A0,
        np.ones(1, dtype=bool), settings,
    )
    if return_info:
        return A[:, 0], bool(conv[0]), int(n_iter[0])
    return A[:, 0]


@dataclass
class CodingInfo:
    converged: np.ndarray  # per sample
    n_sweeps: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def sparse_code_all(D, X, lam, s=None, s_min=DEFAULT_S_MIN,
                    settings=LassoSettings(), A0=None, return_info=False):
    """
    Code every column of X with per-sample regularization ``lam / s[j]``.

    Samples whose weight is at most ``s_min`` get an all-zero code.
    ``A0`` is used as a warm start when given.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-D, got shape {X.shape}")
    d, n = X.shape
    D = _check_dictionary(D, d)
    k = D.shape[1]
    if not lam >= 0:
        raise DomainError("lam must be >= 0")
    s = np.ones(n) if s is None else np.asarray(s, dtype=float)
    if s.shape != (n,):
        raise ShapeError(f"weights have shape {s.shape}, expected ({n},)")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError("weights must be finite and >= 0")
    if A0 is None:
        A0 = np.zeros((k, n))
    else:
        A0 = np.asarray(A0, dtype=float)
        if A0.shape != (k, n):
            raise ShapeError(f"warm start has shape {A0.shape}, expected {(k, n)}")
    active = s > s_min
    lam_eff = np.zeros(n)
    lam_eff[active] = lam / s[active]
    A, conv, n_iter = _run(D, np.asfortranarray(X), lam_eff, A0, active, settings)
    if return_info:
        return A, CodingInfo(conv, n_iter)
    return A


def lasso_objective(D, x, a, lam_eff):
    r = x - D @ a
    return 0.5 * float(r @ r) + lam_eff * float(np.abs(a).sum())


def optimality_residual(D, x, a, lam_eff):
    """
    Worst violation of the Lasso subgradient conditions at ``a``.

    For a_j != 0 the correlation d_j^T (x - D a) must equal lam*sign(a_j);
    for a_j == 0 its magnitude must not exceed lam.
    """
    corr = D.T @ (x - D @ a)
    nz = a != 0
    viol = np.where(nz, np.abs(corr - lam_eff * np.sign(a)),
                    np.maximum(np.abs(corr) - lam_eff, 0.0))
    return float(viol.max()) if viol.size else 0.0
