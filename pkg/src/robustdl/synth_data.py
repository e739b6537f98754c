"""Synthetic benchmarks with planted outliers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError


@dataclass
class LabeledDataset:
    X: np.ndarray  # (d, n), samples as columns
    is_outlier: np.ndarray  # (n,) bool
    D_true: Optional[np.ndarray] = None
    A_true: Optional[np.ndarray] = None
    generator: str = ""
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.X.shape[1]

    @property
    def d(self):
        return self.X.shape[0]


def outlier_count(n, ratio):
    # guard against 0.29 * 100 = 28.999999999999996
    return int(math.floor(ratio * n + 1e-9))


def gen_two_gaussians(n_per_cluster=250, n_outliers=50, seed=0, spread=0.1,
                      outlier_radius=12.0, means=((3.0, 1.0), (-3.0, -1.0))):
    """
    Two isotropic 2-D Gaussian clusters plus outliers on a ring.

    Outliers sit at uniformly random angles on a circle of radius
    ``outlier_radius`` centred on the midpoint of the cluster means. Inliers
    come first in the column order, outliers last.
    """
    if n_per_cluster < 0 or n_outliers < 0:
        raise DomainError("counts must be non-negative")
    if not spread >= 0 or not outlier_radius >= 0:
        raise DomainError("spread and outlier_radius must be non-negative")
    rng = np.random.default_rng(seed)
    means = np.asarray(means, dtype=float)
    clusters = [m[:, None] + spread * rng.standard_normal((2, n_per_cluster)) for m in means]
    center = means.mean(axis=0)
    theta = rng.uniform(0.0, 2.0 * np.pi, n_outliers)
    ring = center[:, None] + outlier_radius * np.vstack([np.cos(theta), np.sin(theta)])
    X = np.hstack(clusters + [ring])
    labels = np.zeros(X.shape[1], dtype=bool)
    labels[2 * n_per_cluster:] = True
    params = dict(n_per_cluster=n_per_cluster, n_outliers=n_outliers, seed=seed,
                  spread=spread, outlier_radius=outlier_radius, means=means.tolist())
    return LabeledDataset(X, labels, generator="two-gaussians", params=params)


def gen_dictionary_data(d=32, k_true=64, n=1000, nnz=5, outlier_ratio=0.1,
                        noise_sigma=0.05, seed=0, outlier_gain=3.0):
    """
    Sparse combinations of a random unit-norm dictionary plus planted outliers.

    Inliers are ``D_true a + noise`` with ``nnz`` standard-normal coefficients
    on a uniformly random support. ``floor(outlier_ratio * n)`` randomly chosen
    samples are replaced by isotropic Gaussian vectors whose expected norm is
    ``outlier_gain`` times the median inlier norm.
    """
    if d < 1 or k_true < 1 or n < 0:
        raise DomainError("d, k_true must be >= 1 and n >= 0")
    if not 1 <= nnz <= k_true:
        raise DomainError(f"nnz must lie in [1, k_true], got {nnz}")
    if not 0.0 <= outlier_ratio < 1.0:
        raise DomainError(f"outlier_ratio must lie in [0, 1), got {outlier_ratio}")
    if not noise_sigma >= 0 or not outlier_gain > 0:
        raise DomainError("noise_sigma must be >= 0 and outlier_gain > 0")
    rng = np.random.default_rng(seed)
    D = rng.standard_normal((d, k_true))
    D /= np.linalg.norm(D, axis=0)
    A = np.zeros((k_true, n))
    for i in range(n):
        support = rng.choice(k_true, size=nnz, replace=False)
        A[support, i] = rng.standard_normal(nnz)
    X = D @ A + noise_sigma * rng.standard_normal((d, n))

    n_out = outlier_count(n, outlier_ratio)
    labels = np.zeros(n, dtype=bool)
    if n_out:
        idx = rng.choice(n, size=n_out, replace=False)
        labels[idx] = True
        inlier_norm = np.median(np.linalg.norm(X[:, ~labels], axis=0))
        scale = outlier_gain * inlier_norm / math.sqrt(d)
        X[:, idx] = scale * rng.standard_normal((d, n_out))
        A[:, idx] = 0.0
    params = dict(d=d, k_true=k_true, n=n, nnz=nnz, outlier_ratio=outlier_ratio,
                  noise_sigma=noise_sigma, seed=seed, outlier_gain=outlier_gain)
    return LabeledDataset(X, labels, D_true=D, A_true=A, generator="dict", params=params)
