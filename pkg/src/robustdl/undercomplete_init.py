"""
Undercomplete initialization of the dictionary and sample weights.

The k atoms are learned in batches of b < d atoms. Each batch is one outer
MM iteration started from a random dictionary and unit weights on the full
data; the batch's atoms fill their slice of D and the refreshed weights of
all batches are averaged. Outliers, which an undercomplete dictionary cannot
represent, end up with small initial weights.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .errors import DomainError


def default_batch_atoms(d):
    return max(1, min(d // 2, d - 1))


def batch_sizes(k, b):
    """Atoms per batch: b for all but the last, which takes the remainder."""
    n_batches = math.ceil(k / b)
    sizes = [b] * (n_batches - 1)
    sizes.append(k - (n_batches - 1) * b)
    return sizes


def undercomplete_init(X, k, settings, return_batches=False):
    """
    Returns ``(D, s)``; with ``return_batches`` also the list of per-batch
    weight vectors.

    ``settings`` is the :class:`FitSettings` of the main run. Every field is
    inherited except k, M, init and seed.
    """
    from .robust_dl import fit

    X = np.asarray(X, dtype=float)
    d, n = X.shape
    b = settings.batch_atoms if settings.batch_atoms is not None else default_batch_atoms(d)
    if not 1 <= b < d:
        raise DomainError(f"batch size must satisfy 1 <= b < d={d}, got b={b}")
    if k <= d:
        raise DomainError(f"undercomplete init needs k > d (k={k}, d={d})")

    sizes = batch_sizes(k, b)
    D = np.zeros((d, k))
    s = np.zeros(n)
    batches = []
    start = 0
    for i, size in enumerate(sizes):
        sub = replace(
            settings, k=size, M=1, init="random", init_A="zero",
            seed=_batch_seed(settings.seed, i),
        )
        res = fit(X, sub)
        D[:, start:start + size] = res.D
        s = s + res.s
        batches.append(res.s)
        start += size
    s = s / len(sizes)
    if return_batches:
        return D, s, batches
    return D, s


def _batch_seed(seed, index):
    # independent stream per batch, reproducible from the master seed
    ss = np.random.SeedSequence([int(seed), 1, int(index)])
    return int(ss.generate_state(1)[0])
