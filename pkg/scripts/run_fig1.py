"""Top-50 detection counts on the 2-D two-cluster data for several seeds."""
import argparse

import numpy as np

from robustdl.experiments import two_d_detection


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--m", type=int, default=50)
    args = ap.parse_args()
    print("seed  log  identity  uniform")
    counts = []
    for seed in range(args.seeds):
        r = two_d_detection(seed, m=args.m)
        counts.append((r["log"], r["identity"], r["uniform"]))
        print(f"{seed:4d} {r['log']:4d} {r['identity']:9d} {r['uniform']:8d}")
    med = np.median(np.array(counts), axis=0)
    print(f"median {med[0]:g} {med[1]:g} {med[2]:g}")


if __name__ == "__main__":
    main()
