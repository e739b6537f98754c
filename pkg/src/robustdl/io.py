"""
On-disk formats.

Dataset directory::

    data.csv      one sample per row, header f0..f{d-1}
    labels.csv    index,is_outlier   (0/1)
    meta.json     generator name, parameters, seed, shape

Model directory::

    dictionary.csv   d rows, one column per atom, header atom0..atom{k-1}
    weights.csv      index,s
    model.json       penalty, lambda, settings snapshot, objective history

Floats are written with 17 significant digits so save -> load -> save is
byte-identical.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ShapeError
from .penalties import format_penalty, parse_penalty
from .robust_dl import FitSettings
from .sparse_coding import LassoSettings

FLOAT_FMT = "%.17g"


def _write_matrix(path, rows, header):
    rows = np.asarray(rows, dtype=float)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def _read_matrix(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    try:
        arr = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})") from None
    if arr.size == 0:
        arr = arr.reshape(0, len(header))
    if arr.shape[1] != len(header):
        raise ShapeError(f"{path}: rows have {arr.shape[1]} fields, header has {len(header)}")
    return header, arr


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# datasets ------------------------------------------------------------------

def save_dataset(ds, outdir):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    d = ds.X.shape[0]
    _write_matrix(out / "data.csv", ds.X.T, [f"f{j}" for j in range(d)])
    with open(out / "labels.csv", "w") as fh:
        fh.write("index,is_outlier\n")
        for i, flag in enumerate(ds.is_outlier):
            fh.write(f"{i},{int(flag)}\n")
    meta = {
        "generator": ds.generator,
        "params": ds.params,
        "seed": ds.params.get("seed"),
        "d": int(d),
        "n": int(ds.X.shape[1]),
        "n_outliers": int(np.sum(ds.is_outlier)),
    }
    _write_json(out / "meta.json", meta)
    if ds.D_true is not None:
        k = ds.D_true.shape[1]
        _write_matrix(out / "dictionary_true.csv", ds.D_true, [f"atom{j}" for j in range(k)])


def load_data(path):
    """Load X (d, n) from a dataset directory or a bare data CSV."""
    path = Path(path)
    csv = path / "data.csv" if path.is_dir() else path
    _, rows = _read_matrix(csv)
    X = rows.T.copy()
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(rows))[0]
        raise DomainError(
            f"{csv}: non-finite value at sample {bad[0]}, feature {bad[1]}"
        )
    return X


def load_labels(path):
    path = Path(path)
    csv = path / "labels.csv" if path.is_dir() else path
    if not csv.exists():
        raise FileNotFoundError(f"no labels file at {csv}")
    _, rows = _read_matrix(csv)
    idx = rows[:, 0].astype(int)
    labels = np.zeros(len(idx), dtype=bool)
    labels[idx] = rows[:, 1] != 0
    return labels


# models --------------------------------------------------------------------

def settings_to_dict(settings: FitSettings) -> dict:
    out = asdict(settings)
    out["penalty"] = format_penalty(settings.penalty)
    out["lasso"] = asdict(settings.lasso)
    return out


def settings_from_dict(data: dict) -> FitSettings:
    data = dict(data)
    data["penalty"] = parse_penalty(data["penalty"])
    data["lasso"] = LassoSettings(**data["lasso"])
    return FitSettings(**data)


@dataclass
class ModelArtifact:
    D: np.ndarray
    s: np.ndarray
    penalty: str
    lam: float
    settings: dict
    history: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_fit(cls, result, settings, **meta):
        history = [
            {
                "robust_objective": h.robust_objective,
                "surrogate_objective": h.surrogate_objective,
                "inner_iterations": h.inner_iterations,
                "inner_converged": h.inner_converged,
                "coding_converged": h.coding_converged,
            }
            for h in result.history
        ]
        return cls(
            D=result.D, s=result.s, penalty=format_penalty(settings.penalty),
            lam=settings.lam, settings=settings_to_dict(settings),
            history=history, meta=dict(meta),
        )

    @property
    def fit_settings(self) -> FitSettings:
        return settings_from_dict(self.settings)

    @property
    def final_objective(self):
        return self.history[-1]["robust_objective"] if self.history else float("nan")


def save_model(model: ModelArtifact, outdir):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    d, k = model.D.shape
    _write_matrix(out / "dictionary.csv", model.D, [f"atom{j}" for j in range(k)])
    with open(out / "weights.csv", "w") as fh:
        fh.write("index,s\n")
        for i, v in enumerate(np.asarray(model.s, dtype=float)):
            fh.write(f"{i},{FLOAT_FMT % v}\n")
    doc = {
        "d": int(d),
        "k": int(k),
        "n": int(len(model.s)),
        "penalty": model.penalty,
        "lambda": model.lam,
        "settings": model.settings,
        "history": model.history,
        "meta": model.meta,
    }
    _write_json(out / "model.json", doc)


def load_model(path) -> ModelArtifact:
    path = Path(path)
    with open(path / "model.json") as fh:
        doc = json.load(fh)
    _, D = _read_matrix(path / "dictionary.csv")
    _, w = _read_matrix(path / "weights.csv")
    s = np.zeros(len(w))
    s[w[:, 0].astype(int)] = w[:, 1]
    if D.shape != (doc["d"], doc["k"]) or s.shape != (doc["n"],):
        raise ShapeError(f"{path}: stored arrays do not match recorded shape")
    return ModelArtifact(
        D=D, s=s, penalty=doc["penalty"], lam=doc["lambda"],
        settings=doc["settings"], history=doc["history"], meta=doc.get("meta", {}),
    )


def ensure_writable(outdir):
    out = Path(outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")
    return out
