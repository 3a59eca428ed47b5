"""PCG iterations on randomized meshes with the uniform-mesh Strang preconditioner."""

import argparse
from pathlib import Path

from weightsfem.experiments import ExperimentConfig, cmd_robustness


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()
    for r in (3, 4):
        cfg = ExperimentConfig(degree=r, theta=(0.05, 0.1, 0.2, 0.3, 0.4, 0.5), seeds=args.seeds,
                               out=Path(args.out) / f"robustness_r{r}.csv")
        print(f"== r={r}")
        print(cmd_robustness(cfg).to_text())


if __name__ == "__main__":
    main()
