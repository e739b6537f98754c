"""Outlier-detection metrics."""
from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, ShapeError


def _pair(scores, labels):
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=bool).ravel()
    if scores.shape != labels.shape:
        raise ShapeError(f"{scores.size} scores but {labels.size} labels")
    return scores, labels


def auroc(scores, labels):
    """
    Area under the ROC curve, P(score_pos > score_neg) + 1/2 P(tie).

    Computed from average ranks (Mann-Whitney U), so ties get half credit.
    """
    scores, labels = _pair(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DomainError("auroc needs at least one positive and one negative label")
    ranks = rankdata(scores)  # average ranks over tie groups
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def top_m_detection(scores, labels, m):
    """Number of true outliers among the m highest scores (ties: lower index first)."""
    scores, labels = _pair(scores, labels)
    if not 0 <= m <= scores.size:
        raise DomainError(f"m must lie in [0, {scores.size}], got {m}")
    order = np.argsort(-scores, kind="stable")
    return int(labels[order[:m]].sum())
