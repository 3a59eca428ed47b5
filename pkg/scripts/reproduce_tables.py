"""Regenerate the conditioning, iteration and convergence tables as CSV.

    python scripts/reproduce_tables.py --out results
"""

import argparse
from pathlib import Path

from weightsfem.experiments import (
    ExperimentConfig,
    cmd_conditioning_table,
    cmd_convergence,
    cmd_nonconstant,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()
    out = Path(args.out)
    for r in (3, 4):
        for name, cmd in (("cond", cmd_conditioning_table), ("nonconstant", cmd_nonconstant),
                          ("convergence", cmd_convergence)):
            cfg = ExperimentConfig(degree=r, tol=args.tol, out=out / f"{name}_r{r}.csv")
            table = cmd(cfg)
            print(f"== {name}, r={r}")
            print(table.to_text())


if __name__ == "__main__":
    main()
