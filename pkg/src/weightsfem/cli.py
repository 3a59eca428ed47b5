"""Command line entry point: ``weightsfem <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .errors import ConfigError, EigensolverNoConvergence, SolverNotConverged

COMMANDS = {
    "eigencurves": ex.cmd_eigencurves,
    "xi-sweep": ex.cmd_xi_sweep,
    "convergence": ex.cmd_convergence,
    "cond-table": ex.cmd_conditioning_table,
    "nonconstant": ex.cmd_nonconstant,
    "robustness": ex.cmd_robustness,
    "graded": ex.cmd_graded,
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(",") if t.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weightsfem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, help=(func.__doc__ or "").strip().splitlines()[0])
        p.add_argument("--degree", type=int, default=3)
        basis = p.add_mutually_exclusive_group()
        basis.add_argument("--xi", type=_floats, default=None, help="free point parameter(s), comma separated")
        basis.add_argument("--lagrangian", action="store_true", help="equispaced points")
        p.add_argument("--elements", type=_ints, default=None, help="comma separated element counts")
        p.add_argument("--coeff", default="1", choices=sorted(ex.COEFFICIENTS))
        p.add_argument("--mesh", default="uniform", choices=ex.MESH_KINDS)
        p.add_argument("--theta", type=_floats, default=(0.05, 0.1, 0.2, 0.3, 0.4, 0.5))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--maxit", type=int, default=1000, help="PCG iteration cap")
        p.add_argument("--out", default=None, help="CSV output path")
        if name == "nonconstant":
            p.add_argument("--comb", action="store_true", help="add the eigenvalue/symbol quantile gap")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ex.ExperimentConfig(
            degree=args.degree, xi=args.xi, lagrangian=args.lagrangian, elements=args.elements,
            coeff=args.coeff, mesh=args.mesh, theta=args.theta, seed=args.seed, seeds=args.seeds,
            tol=args.tol, out=args.out, maxit=args.maxit,
        )
        kwargs = {"comb": args.comb} if args.command == "nonconstant" else {}
        table = COMMANDS[args.command](cfg, **kwargs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverNotConverged, EigensolverNoConvergence) as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3
    if args.command == "eigencurves":
        print(f"points {table.meta['points']}, curve gaps {table.meta['gaps']}")
    else:
        print(table.to_text())
        extra = {k: v for k, v in table.meta.items() if k != "config"}
        for k, v in extra.items():
            print(f"# {k}: {v}")
    if cfg.out is not None:
        print(f"wrote {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
