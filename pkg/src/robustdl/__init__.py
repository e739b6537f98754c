"""Robust dictionary learning with concave losses."""
from .errors import DomainError, IntegrityError, ShapeError
from .penalties import (CappedL1, Identity, Log, Lq, Mcp, Scad, f_value,
                        format_penalty, g_supergradient, g_value, parse_penalty,
                        weight)
from .robust_dl import (FitResult, FitSettings, fit, outlier_scores,
                        robust_objective, surrogate_objective)
from .sparse_coding import LassoSettings, lasso, sparse_code_all
from .dict_update import update_dictionary
from .undercomplete_init import undercomplete_init
from .synth_data import LabeledDataset, gen_dictionary_data, gen_two_gaussians
from .evaluation import auroc, top_m_detection

__version__ = "0.1.0"

__all__ = [
    "DomainError", "IntegrityError", "ShapeError",
    "CappedL1", "Identity", "Log", "Lq", "Mcp", "Scad", "f_value", "format_penalty",
    "g_supergradient", "g_value", "parse_penalty", "weight",
    "FitResult", "FitSettings", "fit", "outlier_scores", "robust_objective",
    "surrogate_objective", "LassoSettings", "lasso", "sparse_code_all",
    "update_dictionary", "undercomplete_init", "LabeledDataset", "gen_dictionary_data",
    "gen_two_gaussians", "auroc", "top_m_detection",
]
