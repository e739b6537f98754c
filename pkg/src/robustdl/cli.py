"""
Command-line interface.

    robustdl gen two-gaussians --per-cluster 250 --outliers 50 --seed 7 -o data/
    robustdl gen dict --d 32 --atoms 64 --n 1000 --outlier-ratio 0.1 -o data/
    robustdl fit data/ --penalty log:eps=1.0 --k 64 --lambda 0.2 --M 10 -o model/
    robustdl eval --data data/ --m 50 -o metrics.csv model/
    robustdl experiment fig2c -o results/

Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import experiments as exps
from . import io
from .errors import DomainError, ShapeError
from .evaluation import auroc, top_m_detection
from .penalties import parse_penalty
from .robust_dl import FitSettings, fit, outlier_scores
from .sparse_coding import LassoSettings
from .synth_data import gen_dictionary_data, gen_two_gaussians

log = logging.getLogger("robustdl")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _penalty(text):
    try:
        return parse_penalty(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(prog="robustdl", description="Robust dictionary learning")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset")
    gsub = gen.add_subparsers(dest="generator", required=True)
    tg = gsub.add_parser("two-gaussians", help="2-D clusters with ring outliers")
    tg.add_argument("--per-cluster", type=int, default=250)
    tg.add_argument("--outliers", type=int, default=50)
    tg.add_argument("--spread", type=float, default=0.1)
    tg.add_argument("--outlier-radius", type=float, default=12.0)
    tg.add_argument("--seed", type=int, default=0)
    tg.add_argument("-o", "--out", required=True)
    dg = gsub.add_parser("dict", help="sparse dictionary data with planted outliers")
    dg.add_argument("--d", type=int, default=32)
    dg.add_argument("--atoms", type=int, default=64, help="atoms of the generating dictionary")
    dg.add_argument("--n", type=int, default=1000)
    dg.add_argument("--nnz", type=int, default=5)
    dg.add_argument("--outlier-ratio", type=float, default=0.1)
    dg.add_argument("--noise", type=float, default=0.05)
    dg.add_argument("--outlier-gain", type=float, default=3.0)
    dg.add_argument("--seed", type=int, default=0)
    dg.add_argument("-o", "--out", required=True)

    ft = sub.add_parser("fit", help="learn a robust dictionary")
    ft.add_argument("data", help="dataset directory or data CSV")
    ft.add_argument("--penalty", type=_penalty, default=parse_penalty("log:eps=1.0"))
    ft.add_argument("--k", type=int, required=True)
    ft.add_argument("--lambda", dest="lam", type=float, default=0.2)
    ft.add_argument("--M", type=int, default=10)
    ft.add_argument("--inner-max", type=int, default=30)
    ft.add_argument("--inner-tol", type=float, default=1e-5)
    ft.add_argument("--init", choices=("random", "undercomplete"), default="random")
    ft.add_argument("--batch-atoms", type=_positive_int, default=None)
    ft.add_argument("--init-A", choices=("zero", "random"), default="zero")
    ft.add_argument("--cold-start", action="store_true", help="disable warm-started coding")
    ft.add_argument("--lasso-max-iters", type=int, default=1000)
    ft.add_argument("--lasso-tol", type=float, default=1e-7)
    ft.add_argument("--seed", type=int, default=0)
    ft.add_argument("-o", "--out", required=True)

    ev = sub.add_parser("eval", help="score fitted models against outlier labels")
    ev.add_argument("models", nargs="+", help="model directories")
    ev.add_argument("--data", required=True, help="dataset directory (data.csv + labels.csv)")
    ev.add_argument("--labels", default=None, help="labels CSV (default: <data>/labels.csv)")
    ev.add_argument("--m", type=int, default=None, help="top-m size (default: number of outliers)")
    ev.add_argument("-o", "--out", required=True, help="metrics CSV")

    ex = sub.add_parser("experiment", help="run a synthetic sweep preset")
    ex.add_argument("preset")
    ex.add_argument("--seeds", type=_positive_int, default=5)
    ex.add_argument("--values", default=None, help="comma-separated subset of the sweep grid")
    ex.add_argument("--workers", type=_positive_int, default=None)
    ex.add_argument("-o", "--out", default="results")
    return parser


def cmd_gen(args):
    if args.generator == "two-gaussians":
        if args.per_cluster < 0 or args.outliers < 0:
            raise UsageError("counts must be non-negative")
        io.ensure_writable(args.out)
        ds = gen_two_gaussians(args.per_cluster, args.outliers, seed=args.seed,
                               spread=args.spread, outlier_radius=args.outlier_radius)
    else:
        if not 0.0 <= args.outlier_ratio < 1.0:
            raise UsageError(f"--outlier-ratio must lie in [0, 1), got {args.outlier_ratio}")
        io.ensure_writable(args.out)
        ds = gen_dictionary_data(args.d, args.atoms, args.n, args.nnz, args.outlier_ratio,
                                 args.noise, seed=args.seed, outlier_gain=args.outlier_gain)
    io.save_dataset(ds, args.out)
    print(f"wrote {ds.X.shape[1]} samples ({int(ds.is_outlier.sum())} outliers) to {args.out}")
    return EXIT_OK


def cmd_fit(args):
    settings = FitSettings(
        k=args.k, lam=args.lam, penalty=args.penalty, M=args.M,
        inner_max=args.inner_max, inner_tol=args.inner_tol, seed=args.seed,
        init=args.init, batch_atoms=args.batch_atoms, init_A=args.init_A,
        warm_start=not args.cold_start,
        lasso=LassoSettings(args.lasso_max_iters, args.lasso_tol),
    )
    X = io.load_data(args.data)
    d = X.shape[0]
    if settings.init == "undercomplete" and settings.k > d:
        b = settings.batch_atoms
        if b is not None and b >= d:
            raise UsageError(f"--batch-atoms must be < d={d}")
    io.ensure_writable(args.out)
    t0 = time.perf_counter()
    result = fit(X, settings)
    seconds = time.perf_counter() - t0
    model = io.ModelArtifact.from_fit(result, settings, seconds=seconds,
                                      data=str(args.data))
    io.save_model(model, args.out)
    print(f"final robust objective {model.final_objective:.10g} after {settings.M} "
          f"outer iterations ({sum(h.inner_iterations for h in result.history)} inner) "
          f"in {seconds:.2f}s")
    return EXIT_OK


EVAL_FIELDS = ("model", "seed", "config", "auroc", "m", "top_m", "final_objective", "seconds")


def cmd_eval(args):
    X = io.load_data(args.data)
    labels_path = Path(args.labels) if args.labels else Path(args.data) / "labels.csv"
    if not labels_path.exists():
        raise UsageError(f"missing labels: {labels_path} not found")
    labels = io.load_labels(labels_path)
    if labels.size != X.shape[1]:
        raise UsageError(f"{labels.size} labels for {X.shape[1]} samples")
    m = int(labels.sum()) if args.m is None else args.m
    if not 0 <= m <= labels.size:
        raise UsageError(f"--m must lie in [0, {labels.size}]")
    rows = []
    for path in args.models:
        model = io.load_model(path)
        if model.D.shape[0] != X.shape[0] or model.s.size != X.shape[1]:
            raise UsageError(
                f"model {path} (d={model.D.shape[0]}, n={model.s.size}) does not match "
                f"dataset (d={X.shape[0]}, n={X.shape[1]})"
            )
        settings = model.fit_settings
        scores = outlier_scores(model.s, settings.s_min)
        rows.append(dict(
            model=str(path), seed=settings.seed,
            config=f"{model.penalty};k={settings.k};lambda={model.lam};init={settings.init}",
            auroc=auroc(scores, labels) if 0 < labels.sum() < labels.size else float("nan"),
            m=m, top_m=top_m_detection(scores, labels, m),
            final_objective=model.final_objective,
            seconds=model.meta.get("seconds", float("nan")),
        ))
    rows.sort(key=lambda r: (r["seed"], r["config"], r["model"]))
    exps.write_rows(args.out, rows, EVAL_FIELDS)
    for r in rows:
        print(f"{r['model']}: auroc={r['auroc']:.4f} top{m}={r['top_m']}")
    return EXIT_OK


def cmd_experiment(args):
    if args.preset not in exps.PRESETS:
        raise UsageError(
            f"unknown preset {args.preset!r}; available: {', '.join(sorted(exps.PRESETS))}"
        )
    preset = exps.PRESETS[args.preset]
    values = None
    if args.values:
        cast = int if preset.sweep_var in ("k", "n") else float
        try:
            values = tuple(cast(v) for v in args.values.split(","))
        except ValueError:
            raise UsageError(f"bad --values {args.values!r}") from None
    out = io.ensure_writable(args.out)
    rows, cells = exps.run_preset(preset, seeds=range(args.seeds), values=values,
                                  workers=args.workers)
    exps.write_rows(out / f"{preset.name}.csv", rows)
    exps.write_rows(out / f"{preset.name}_cells.csv", cells,
                    ("value", "init", "seed", "auroc", "seconds"))
    for r in rows:
        print(f"{r['sweep_var']}={r['value']} {r['init']:>13}: "
              f"auroc {r['auroc_mean']:.4f} +- {r['auroc_std']:.4f}")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "fit": cmd_fit, "eval": cmd_eval, "experiment": cmd_experiment}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DomainError, ShapeError) as exc:
        print(f"robustdl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"robustdl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"robustdl {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
