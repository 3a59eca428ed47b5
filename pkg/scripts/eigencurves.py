"""Eigenvalue curves of the symbol for the point sets shown in the figures."""

import argparse
from pathlib import Path

from weightsfem.experiments import ExperimentConfig, cmd_eigencurves


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    for r, xi in ((3, 0.28), (3, 0.10), (4, 0.12), (4, 0.22)):
        cfg = ExperimentConfig(degree=r, xi=xi, out=Path(args.out) / f"eigencurves_r{r}_xi{xi:g}.csv")
        print(f"r={r} xi={xi}: gaps between consecutive curves {cmd_eigencurves(cfg).meta['gaps']}")


if __name__ == "__main__":
    main()
