"""Run one or all of the dictionary-data sweeps and write CSVs to results/."""
import argparse
from pathlib import Path

from robustdl import experiments as exps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("presets", nargs="*", default=sorted(exps.PRESETS))
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("-o", "--out", default="results")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.presets:
        preset = exps.PRESETS[name]
        rows, cells = exps.run_preset(preset, seeds=range(args.seeds), workers=args.workers)
        exps.write_rows(out / f"{name}.csv", rows)
        for r in rows:
            print(f"{name} {r['sweep_var']}={r['value']} {r['init']:>13}: "
                  f"{r['auroc_mean']:.4f} +- {r['auroc_std']:.4f}")


if __name__ == "__main__":
    main()
