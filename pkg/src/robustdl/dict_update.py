"""
Weighted dictionary update under a unit-norm constraint on every atom.

Samples are rescaled by sqrt(s_i) first; afterwards the update is plain
block coordinate descent over atoms (as in online dictionary learning) with the
projection replaced by normalisation onto the unit sphere. For a fixed
sphere constraint that normalised step is the exact block minimiser, so
every atom step is non-increasing in the weighted objective.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, ShapeError

UNUSED_ATOM_TOL = 1e-12


def _validate(D, X, A, s):
    D = np.asarray(D, dtype=float)
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    if D.ndim != 2 or X.ndim != 2 or A.ndim != 2:
        raise ShapeError("D, X and A must be 2-D")
    d, k = D.shape
    if X.shape[0] != d or A.shape != (k, X.shape[1]):
        raise ShapeError(
            f"incompatible shapes D{D.shape}, X{X.shape}, A{A.shape}"
        )
    n = X.shape[1]
    s = np.ones(n) if s is None else np.asarray(s, dtype=float)
    if s.shape != (n,):
        raise ShapeError(f"weights have shape {s.shape}, expected ({n},)")
    if np.any(s < 0) or not np.all(np.isfinite(s)):
        raise DomainError("weights must be finite and >= 0")
    return D, X, A, s


def weighted_fit_objective(D, X, A, s=None):
    """1/2 sum_i s_i ||x_i - D a_i||^2, the smooth part of the dictionary step."""
    D, X, A, s = _validate(D, X, A, s)
    R = X - D @ A
    return 0.5 * float(np.sum(s * np.einsum("ij,ij->j", R, R)))


def update_dictionary(D, X, A, s=None, sweeps=1):
    """
    Run ``sweeps`` passes of atom-wise block coordinate descent.

    With ``B = At At^T`` and ``C = Xt At^T`` (tilde = columns scaled by
    sqrt(s)), atom j becomes ``u / ||u||`` where
    ``u = d_j + (c_j - D b_j) / B_jj``.

    Atoms with ``B_jj <= 1e-12`` carry no coefficient energy. Each is replaced
    by the normalised sample with the largest weighted residual not already
    used as a replacement in this call (ties: lowest index). When no atom at
    all is in use, or no sample has a residual left, D is returned unchanged.
    """
    if sweeps < 1:
        raise DomainError("sweeps must be >= 1")
    D, X, A, s = _validate(D, X, A, s)
    root = np.sqrt(s)
    Xt = X * root
    At = A * root
    return _bcd(D.copy(), Xt, At, sweeps)


def _bcd(D, Xt, At, sweeps):
    k = D.shape[1]
    B = At @ At.T
    C = Xt @ At.T
    diag = np.diag(B)
    any_used = np.any(diag > UNUSED_ATOM_TOL)
    taken = np.zeros(Xt.shape[1], dtype=bool)
    replaced = np.zeros(k, dtype=bool)
    for _ in range(sweeps):
        for j in range(k):
            bjj = B[j, j]
            if bjj <= UNUSED_ATOM_TOL:
                if any_used and not replaced[j]:
                    _replace_atom(D, j, Xt, At, taken)
                    replaced[j] = True
                continue
            u = D[:, j] + (C[:, j] - D @ B[:, j]) / bjj
            norm = np.linalg.norm(u)
            if norm > 0.0:
                D[:, j] = u / norm
    return D


def _replace_atom(D, j, Xt, At, taken):
    R = Xt - D @ At
    res = np.einsum("ij,ij->j", R, R)
    res[taken] = -np.inf
    i = int(np.argmax(res))  # first maximum -> lowest index
    if not res[i] > 0.0:
        return
    col = Xt[:, i]
    norm = np.linalg.norm(col)
    if norm == 0.0:
        return
    D[:, j] = col / norm
    taken[i] = True
