"""Conditioning against the free point parameter for r = 3 and r = 4 at h = 1/64."""

import argparse
from pathlib import Path

from weightsfem.experiments import ExperimentConfig, cmd_xi_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--n", type=int, default=64)
    args = ap.parse_args()
    for r in (3, 4):
        cfg = ExperimentConfig(degree=r, sweep_n=args.n, out=Path(args.out) / f"xi_sweep_r{r}.csv")
        meta = cmd_xi_sweep(cfg).meta
        print(f"r={r}: " + ", ".join(f"{k}={meta[k]:.4g}" for k in meta if k.startswith(("argmin", "lagrangian"))))


if __name__ == "__main__":
    main()
