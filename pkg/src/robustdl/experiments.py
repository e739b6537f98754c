"""
Experiment presets reproducing the synthetic outlier-detection studies.

Each ``fig2*`` preset sweeps one variable of the 32-dimensional
dictionary-generated data (see ``PRESETS``) and compares random with
undercomplete initialization by AUROC averaged over seeds.
:func:`two_d_detection` counts how many planted outliers reach the top-50
scores on the 2-D two-cluster data, per penalty and for a uniform baseline.
"""
from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .evaluation import auroc, top_m_detection
from .penalties import Identity, Log
from .robust_dl import FitSettings, fit, outlier_scores, residual_norms
from .synth_data import gen_dictionary_data, gen_two_gaussians

WORKERS_ENV = "ROBUSTDL_WORKERS"
INITS = ("default", "undercomplete")

# data defaults shared by the fig2 presets
DICT_DATA = dict(d=32, k_true=64, n=1000, nnz=5, outlier_ratio=0.1, noise_sigma=0.05,
                 outlier_gain=3.0)
DICT_FIT = FitSettings(k=64, lam=0.2, penalty=Log(1.0), M=10)

# 2-D two-cluster setup: clusters on opposite sides of the origin
TWO_D_DATA = dict(n_per_cluster=250, n_outliers=50, spread=0.1, outlier_radius=12.0,
                  means=((3.0, 1.0), (-3.0, -1.0)))
TWO_D_FIT = FitSettings(k=2, lam=0.15, penalty=Log(3.0), M=10)


@dataclass(frozen=True)
class Preset:
    name: str
    sweep_var: str
    values: tuple
    description: str
    data: dict = field(default_factory=lambda: dict(DICT_DATA))
    settings: FitSettings = DICT_FIT


PRESETS = {
    "fig2a": Preset("fig2a", "k", (8, 16, 32, 40, 48, 64, 96, 128),
                    "dictionary size sweep, 1000 samples, 10% outliers"),
    "fig2b": Preset("fig2b", "n", (250, 500, 1000, 2000, 4000),
                    "sample count sweep, 10% outliers, 64 atoms"),
    "fig2c": Preset("fig2c", "outlier_ratio", (0.05, 0.10, 0.20, 0.30, 0.40),
                    "outlier ratio sweep, 1000 samples, 64 atoms"),
}


def cell_config(preset: Preset, value, init, seed):
    """Data parameters and fit settings for one (value, init, seed) cell."""
    data = dict(preset.data)
    settings = preset.settings
    if preset.sweep_var == "k":
        settings = replace(settings, k=int(value))
    elif preset.sweep_var == "n":
        data["n"] = int(value)
    elif preset.sweep_var == "outlier_ratio":
        data["outlier_ratio"] = float(value)
    else:
        raise ValueError(f"unknown sweep variable {preset.sweep_var!r}")
    init_name = "random" if init == "default" else "undercomplete"
    settings = replace(settings, seed=int(seed), init=init_name)
    return data, settings


def run_cell(preset: Preset, value, init, seed):
    data, settings = cell_config(preset, value, init, seed)
    ds = gen_dictionary_data(seed=int(seed), **data)
    t0 = time.perf_counter()
    result = fit(ds.X, settings)
    elapsed = time.perf_counter() - t0
    score = auroc(outlier_scores(result.s, settings.s_min), ds.is_outlier)
    return dict(value=value, init=init, seed=int(seed), auroc=score, seconds=elapsed,
                max_norm_dev=float(np.max(np.abs(np.linalg.norm(result.D, axis=0) - 1.0))),
                objectives=result.objectives.tolist())


def _run_cell_args(args):
    return run_cell(*args)


def n_workers(requested=None):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_preset(preset: Preset, seeds=range(5), values=None, inits=INITS, workers=None):
    """
    Run every (value, init, seed) cell and aggregate AUROC over seeds.

    Returns ``(rows, cells)``: one aggregated row per (value, init), in sweep
    order, and the raw per-cell records sorted by (value, init, seed).
    """
    values = preset.values if values is None else tuple(values)
    jobs = [(preset, v, i, s) for v in values for i in inits for s in seeds]
    workers = n_workers(workers)
    if workers == 1 or len(jobs) == 1:
        cells = [_run_cell_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell_args, jobs))
    order = {v: i for i, v in enumerate(values)}
    cells.sort(key=lambda c: (order[c["value"]], inits.index(c["init"]), c["seed"]))
    rows = []
    for v in values:
        for init in inits:
            scores = [c["auroc"] for c in cells if c["value"] == v and c["init"] == init]
            rows.append(dict(sweep_var=preset.sweep_var, value=v, init=init,
                             auroc_mean=float(np.mean(scores)),
                             auroc_std=float(np.std(scores)),
                             seeds=len(scores)))
    return rows, cells


RESULT_FIELDS = ("sweep_var", "value", "init", "auroc_mean", "auroc_std", "seeds")


def write_rows(path, rows, fields=RESULT_FIELDS):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


# 2-D detection study ---------------------------------------------------------

def two_d_detection(seed, m=50, data=None, settings=TWO_D_FIT):
    """
    Top-m detection counts on one two-cluster dataset.

    Returns a dict of counts keyed ``log``, ``identity`` and ``uniform``; the
    last is plain dictionary learning scored by reconstruction error. The
    fitted results are under ``fits``.
    """
    data = dict(TWO_D_DATA if data is None else data)
    ds = gen_two_gaussians(seed=seed, **data)
    base = replace(settings, seed=seed)
    out = {}
    fits = {}
    for name, penalty in (("log", base.penalty), ("identity", Identity())):
        res = fit(ds.X, replace(base, penalty=penalty))
        out[name] = top_m_detection(outlier_scores(res.s, base.s_min), ds.is_outlier, m)
        fits[name] = res
    res = fit(ds.X, replace(base, penalty=Identity()), update_weights=False)
    out["uniform"] = top_m_detection(residual_norms(ds.X, res.D, res.A), ds.is_outlier, m)
    fits["uniform"] = res
    out["fits"] = fits
    return out
