"""Reproduction runs: eigencurves, xi sweeps, convergence, conditioning and
iteration tables, variable coefficients, graded and randomized meshes.

Every command takes an :class:`ExperimentConfig`, returns a :class:`Table`
and, when ``config.out`` is set, writes it as CSV with ``#`` metadata lines
echoing the configuration.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .assembly import (
    ManufacturedProblem,
    assemble,
    exp_problem,
    extend_hat,
    h1_seminorm_error,
    quadratic_coefficient_problem,
    sine_problem,
    solve,
)
from .errors import ConfigError, SolverNotConverged, WeightsFEMError
from .jacobi import jacobi_eigvalsh
from .krylov import (
    build_diag_circulant,
    build_strang,
    condition_number_1norm,
    condition_number_2norm,
    pcg,
)
from .meshing import (
    Coefficient,
    constant,
    exponential_map,
    graded_mesh,
    graded_to_equivalent_coefficient,
    quadratic,
    randomized_mesh,
    uniform_mesh,
)
from .reference import ReferenceElement
from .symbol import (
    build_symbol,
    conditioning_estimate,
    determinant_constant,
    eigencurves,
    symbol_at,
    write_eigencurves_csv,
)

DEFAULT_XI = {3: (0.29,), 4: (0.21,)}
DEFAULT_ELEMENTS = {3: tuple(10 * 2**k for k in range(8)), 4: tuple(2**k for k in range(1, 9))}
COEFFICIENTS = {"1": constant, "1+x^2": quadratic}
MESH_KINDS = ("uniform", "graded", "randomized")


@dataclass(frozen=True)
class ExperimentConfig:
    degree: int = 3
    xi: tuple[float, ...] | None = None  # None: default for the degree
    lagrangian: bool = False  # single-basis commands use the equispaced element
    elements: tuple[int, ...] | None = None
    coeff: str = "1"
    mesh: str = "uniform"
    theta: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.4, 0.5)
    seed: int = 0
    seeds: int = 1
    tol: float = 1e-8
    out: Path | None = None
    grid_size: int = 2049
    xi_step: float = 0.005
    xi_range: tuple[float, float] = (0.05, 0.45)
    sweep_n: int = 64
    maxit: int = 1000

    def __post_init__(self):
        if isinstance(self.xi, (int, float)):
            object.__setattr__(self, "xi", (float(self.xi),))
        if isinstance(self.theta, (int, float)):
            object.__setattr__(self, "theta", (float(self.theta),))
        if self.out is not None:
            object.__setattr__(self, "out", Path(self.out))
        self.validate()

    def validate(self) -> None:
        if self.degree < 1:
            raise ConfigError("degree must be >= 1")
        if self.coeff not in COEFFICIENTS:
            raise ConfigError(f"unknown coefficient {self.coeff!r}; choose from {sorted(COEFFICIENTS)}")
        if self.mesh not in MESH_KINDS:
            raise ConfigError(f"unknown mesh kind {self.mesh!r}; choose from {MESH_KINDS}")
        if any(not 0.0 <= t < 1.0 for t in self.theta):
            raise ConfigError("theta values must lie in [0, 1)")
        if self.elements is not None and (len(self.elements) == 0 or min(self.elements) < 1):
            raise ConfigError("element counts must be positive")
        if not 0.0 < self.tol < 1.0:
            raise ConfigError("tol must lie in (0, 1)")
        if self.maxit < 1:
            raise ConfigError("maxit must be >= 1")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        lo, hi = self.xi_range
        if not (0.0 < lo < hi < 0.5 and self.xi_step > 0):
            raise ConfigError("xi range must satisfy 0 < lo < hi < 1/2 with a positive step")
        try:
            self.weights_element()
        except WeightsFEMError as exc:
            raise ConfigError(f"inadmissible points: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def xi_values(self) -> tuple[float, ...]:
        if self.xi is not None:
            return self.xi
        if self.degree in DEFAULT_XI:
            return DEFAULT_XI[self.degree]
        if self.degree <= 2:
            return ()
        raise ConfigError(f"no default points for degree {self.degree}; pass --xi")

    @property
    def element_counts(self) -> tuple[int, ...]:
        if self.elements is not None:
            return tuple(self.elements)
        return DEFAULT_ELEMENTS.get(self.degree, DEFAULT_ELEMENTS[3])

    def weights_element(self) -> ReferenceElement:
        return ReferenceElement.symmetric(self.degree, *self.xi_values)

    def lagrangian_element(self) -> ReferenceElement:
        return ReferenceElement.lagrangian(self.degree)

    def element(self) -> ReferenceElement:
        return self.lagrangian_element() if self.lagrangian else self.weights_element()

    def coefficient(self) -> Coefficient:
        return COEFFICIENTS[self.coeff]()

    def problem(self) -> ManufacturedProblem:
        """Problem for error studies: sin(pi x) when b = 1."""
        return sine_problem() if self.coeff == "1" else quadratic_coefficient_problem()

    def iteration_problem(self) -> ManufacturedProblem:
        """Problem whose load drives the iteration counts: u = x(1-x)e^x."""
        return exp_problem() if self.coeff == "1" else quadratic_coefficient_problem()

    def describe(self) -> dict:
        d = asdict(self)
        d["out"] = None if self.out is None else str(self.out)
        return d


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [row[j] for row in self.rows]

    def write_csv(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            fh.write(f"# experiment: {self.name}\n")
            for key, value in self.meta.items():
                fh.write(f"# {key}: {value}\n")
            w = csv.writer(fh)
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([_fmt(v) for v in row])
        return path

    def to_text(self) -> str:
        widths = [max(len(c), *(len(_fmt(r[j])) for r in self.rows)) if self.rows else len(c)
                  for j, c in enumerate(self.columns)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(self.columns, widths))]
        lines += ["  ".join(_fmt(v).rjust(w) for v, w in zip(row, widths)) for row in self.rows]
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def _finish(table: Table, cfg: ExperimentConfig) -> Table:
    table.meta = {"config": cfg.describe(), **table.meta}
    if cfg.out is not None:
        table.write_csv(cfg.out)
    return table


def _pcg_iterations(matrix, rhs, prec, cfg: ExperimentConfig) -> int:
    _, rep = pcg(matrix, rhs, prec, cfg.tol, cfg.maxit)
    if not rep.converged:
        raise SolverNotConverged(f"PCG stopped after {rep.iterations} iterations, residual {rep.residual:.3e}")
    return rep.iterations


def _bases(cfg: ExperimentConfig):
    return [("lagrangian", cfg.lagrangian_element()), ("weights", cfg.weights_element())]


def cmd_eigencurves(cfg: ExperimentConfig) -> Table:
    """Eigenvalue curves of f(theta) on a uniform grid over [-pi, pi]."""
    elem = cfg.element()
    sample = eigencurves(build_symbol(elem), cfg.grid_size)
    cols = ["theta"] + [f"lambda_{j + 1}" for j in range(sample.r)]
    rows = [[float(t)] + [float(v) for v in sample.curves[:, i]] for i, t in enumerate(sample.thetas)]
    gaps = [float(sample.curves[j + 1].min() - sample.curves[j].max()) for j in range(sample.r - 1)]
    table = Table("eigencurves", cols, rows, {"points": elem.points, "gaps": gaps})
    table.meta = {"config": cfg.describe(), **table.meta}
    if cfg.out is not None:
        write_eigencurves_csv(sample, cfg.out, table.meta)
    return table


def xi_grid(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi = cfg.xi_range
    k = int(np.floor((hi - lo) / cfg.xi_step + 1e-9))
    return np.round(lo + cfg.xi_step * np.arange(k + 1), 10)


def cmd_xi_sweep(cfg: ExperimentConfig) -> Table:
    """Conditioning against the free point parameter at a fixed mesh size.

    Columns: the symbol estimate ``n^2 max lambda_r / c2``, the 2-norm and
    1-norm condition numbers of the assembled matrix, and the determinant
    factor ``(det V^{-1})^2 d_r``. The Lagrangian baseline goes in the metadata.
    """
    r, n = cfg.degree, cfg.sweep_n
    if (r - 1) // 2 != 1:
        raise ConfigError("the xi sweep needs a one-parameter symmetric family (degree 3 or 4)")
    mesh = uniform_mesh(n)
    rows = []
    for xi in xi_grid(cfg):
        elem = ReferenceElement.symmetric(r, float(xi))
        sym = build_symbol(elem)
        A = assemble(mesh, elem).matrix
        rows.append([float(xi), conditioning_estimate(sym, n, cfg.grid_size), condition_number_2norm(A),
                     condition_number_1norm(A), determinant_constant(elem)])
    lag = cfg.lagrangian_element()
    A = assemble(mesh, lag).matrix
    cols = ["xi", "kappa_symbol", "kappa2_assembled", "kappa1_assembled", "det_factor"]
    table = Table("xi-sweep", cols, rows)
    arr = np.array(rows)
    table.meta = {
        "n": n,
        "argmin_symbol": float(arr[np.argmin(arr[:, 1]), 0]),
        "argmin_kappa2": float(arr[np.argmin(arr[:, 2]), 0]),
        "argmin_kappa1": float(arr[np.argmin(arr[:, 3]), 0]),
        "argmin_det_factor": float(arr[np.argmin(arr[:, 4]), 0]),
        "lagrangian_kappa_symbol": conditioning_estimate(build_symbol(lag), n, cfg.grid_size),
        "lagrangian_kappa2": condition_number_2norm(A),
        "lagrangian_kappa1": condition_number_1norm(A),
    }
    return _finish(table, cfg)


def observed_rates(errors) -> list[float | None]:
    e = np.asarray(errors, dtype=float)
    return [None] + [float(np.log2(e[i - 1] / e[i])) for i in range(1, e.size)]


def cmd_convergence(cfg: ExperimentConfig) -> Table:
    """H1-seminorm errors of the manufactured problem and log2 rates, both bases."""
    prob = cfg.problem()
    errs = {}
    for name, elem in _bases(cfg):
        errs[name] = []
        for n in cfg.element_counts:
            s = assemble(_mesh(cfg, n), elem, prob.coefficient, prob.f)
            errs[name].append(h1_seminorm_error(s, solve(s), prob.du))
    rl, rw = observed_rates(errs["lagrangian"]), observed_rates(errs["weights"])
    rows = [[n, errs["lagrangian"][i], errs["weights"][i], rl[i], rw[i]]
            for i, n in enumerate(cfg.element_counts)]
    cols = ["elements", "error_lagrangian", "error_weights", "rate_lagrangian", "rate_weights"]
    return _finish(Table("convergence", cols, rows, {"problem": prob.label}), cfg)


def _mesh(cfg: ExperimentConfig, n: int, theta: float | None = None, seed: int | None = None):
    if cfg.mesh == "graded":
        return graded_mesh(n, exponential_map())
    if cfg.mesh == "randomized":
        t = cfg.theta[0] if theta is None else theta
        return randomized_mesh(n, t, cfg.seed if seed is None else seed)
    return uniform_mesh(n)


def cmd_conditioning_table(cfg: ExperimentConfig) -> Table:
    """kappa_2 (Lanczos or dense), kappa_1 and Strang-PCG iterations per n, both bases.

    The symbol estimate is reported next to the measured kappa_2 as a ratio.
    Iterations are counted on the padded system ``diag(1, A_n / n)``.
    """
    prob = replace(cfg, coeff="1").iteration_problem()
    rows = []
    syms = {name: build_symbol(elem) for name, elem in _bases(cfg)}
    for n in cfg.element_counts:
        row = [n]
        k2, k1, ratio, its = [], [], [], []
        for name, elem in _bases(cfg):
            s = assemble(uniform_mesh(n), elem, prob.coefficient, prob.f)
            k2.append(condition_number_2norm(s.matrix))
            k1.append(condition_number_1norm(s.matrix))
            ratio.append(conditioning_estimate(syms[name], max(n, 2), cfg.grid_size) / k2[-1])
            M, b = extend_hat(s)
            its.append(_pcg_iterations(M, b, build_strang(syms[name], n), cfg) if n >= 2 else 0)
        rows.append(row + k2 + k1 + ratio + its)
    cols = ["elements", "kappa2_lagrangian", "kappa2_weights", "kappa1_lagrangian", "kappa1_weights",
            "symbol_ratio_lagrangian", "symbol_ratio_weights", "iter_lagrangian", "iter_weights"]
    return _finish(Table("cond-table", cols, rows, {"tol": cfg.tol}), cfg)


def glt_quantile_gap(matrix_scaled, coeff: Coefficient, sym, n: int) -> float:
    """Largest gap between sorted eigenvalues of ``A_n / n`` and the sorted
    samples of ``b(x) lambda_j(f(theta))`` on an n x n grid, relative to the
    largest sample."""
    ev = np.linalg.eigvalsh(matrix_scaled.toarray())
    x = (np.arange(n) + 0.5) / n
    th = np.pi * (np.arange(n) + 0.5) / n
    lam = jacobi_eigvalsh(symbol_at(sym, th))  # (n, r)
    samples = np.sort((coeff(x)[:, None, None] * lam[None, :, :]).ravel())
    q = (np.arange(ev.size) + 0.5) / ev.size
    ref = np.quantile(samples, q)
    return float(np.max(np.abs(ev - ref)) / samples[-1])


def cmd_nonconstant(cfg: ExperimentConfig, comb: bool = False) -> Table:
    """b = 1 + x^2 with the diagonal-plus-circulant preconditioner, both bases."""
    cfg = replace(cfg, coeff="1+x^2") if cfg.coeff == "1" else cfg
    prob, coeff = cfg.iteration_problem(), cfg.coefficient()
    rows = []
    for n in cfg.element_counts:
        row = [n]
        k2, its, gaps = [], [], []
        for _, elem in _bases(cfg):
            sym = build_symbol(elem)
            s = assemble(uniform_mesh(n), elem, coeff, prob.f)
            k2.append(condition_number_2norm(s.matrix))
            M, b = extend_hat(s)
            its.append(_pcg_iterations(M, b, build_diag_circulant(sym, n, coeff), cfg))
            if comb:
                gaps.append(glt_quantile_gap(s.matrix / n, coeff, sym, n))
        rows.append(row + k2 + its + gaps)
    cols = ["elements", "kappa2_lagrangian", "kappa2_weights", "iter_lagrangian", "iter_weights"]
    if comb:
        cols += ["glt_gap_lagrangian", "glt_gap_weights"]
    return _finish(Table("nonconstant", cols, rows, {"coefficient": coeff.label, "tol": cfg.tol}), cfg)


def cmd_graded(cfg: ExperimentConfig) -> Table:
    """Exponentially graded mesh; preconditioner built for b(g)/g' on the parameter grid."""
    prob = exp_problem()
    mapping = exponential_map()
    btilde = graded_to_equivalent_coefficient(mapping)
    rows = []
    for n in cfg.element_counts:
        its_scaled, its_plain = [], []
        for _, elem in _bases(cfg):
            sym = build_symbol(elem)
            s = assemble(graded_mesh(n, mapping), elem, prob.coefficient, prob.f)
            M, b = extend_hat(s)
            its_scaled.append(_pcg_iterations(M, b, build_diag_circulant(sym, n, btilde, uniform_mesh(n)), cfg))
            its_plain.append(_pcg_iterations(M, b, build_strang(sym, n), cfg))
        rows.append([n] + its_scaled + its_plain)
    cols = ["elements", "iter_lagrangian", "iter_weights", "iter_lagrangian_strang", "iter_weights_strang"]
    return _finish(Table("graded", cols, rows, {"map": mapping.label, "tol": cfg.tol}), cfg)


def cmd_robustness(cfg: ExperimentConfig) -> Table:
    """Randomized meshes preconditioned with the uniform-mesh Strang circulant."""
    prob = exp_problem()
    rows = []
    bases = _bases(cfg)
    syms = [build_symbol(elem) for _, elem in bases]
    for theta in cfg.theta:
        for seed in range(cfg.seed, cfg.seed + cfg.seeds):
            for n in cfg.element_counts:
                mesh = randomized_mesh(n, theta, seed)
                its = []
                for (_, elem), sym in zip(bases, syms):
                    s = assemble(mesh, elem, prob.coefficient, prob.f)
                    M, b = extend_hat(s)
                    its.append(_pcg_iterations(M, b, build_strang(sym, n), cfg))
                rows.append([theta, seed, n] + its)
    cols = ["theta", "seed", "elements", "iter_lagrangian", "iter_weights"]
    return _finish(Table("robustness", cols, rows, {"tol": cfg.tol}), cfg)
