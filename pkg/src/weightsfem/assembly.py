"""Global stiffness assembly for -(b u')' = f on a 1D mesh, u = 0 at both ends.

Global dofs are numbered left to right, ``g = k*r + i`` for local dof ``i`` of
element ``k``; the two Dirichlet dofs (g = 0 and g = n*r) are eliminated, so
the unknown vector has length ``n*r - 1`` and index ``g - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .meshing import Coefficient, Mesh1D, constant, quadratic
from .reference import ReferenceElement, gauss_legendre


@dataclass(frozen=True)
class StiffnessSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    mesh: Mesh1D
    elem: ReferenceElement
    coefficient: Coefficient
    ltg: np.ndarray  # (n, r+1) global dof of each local dof, -1 on Dirichlet dofs

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.mesh.n

    @property
    def r(self) -> int:
        return self.elem.degree

    def full_vector(self, u) -> np.ndarray:
        """Interior solution padded with the homogeneous boundary values."""
        return np.concatenate(([0.0], np.asarray(u, dtype=float), [0.0]))


def local_to_global(n: int, r: int) -> np.ndarray:
    """(n, r+1) map to interior unknown indices; Dirichlet dofs map to -1."""
    g = np.arange(n)[:, None] * r + np.arange(r + 1)[None, :]
    ltg = g - 1
    ltg[(g == 0) | (g == n * r)] = -1
    return ltg


def _quadrature(r: int, npts: int | None):
    return gauss_legendre(2 * r + 2 if npts is None else npts)


def element_matrices(mesh: Mesh1D, elem: ReferenceElement, coeff: Coefficient,
                     quad_points: int | None = None) -> np.ndarray:
    """Stack (n, r+1, r+1) of element stiffness matrices in the weights basis."""
    xq, wq = _quadrature(elem.degree, quad_points)
    dphi = elem.basis_derivatives(xq)  # (q, r+1)
    h = mesh.sizes
    xs = mesh.endpoints[:-1, None] + h[:, None] * xq[None, :]
    bw = coeff(xs) * wq[None, :]
    return np.einsum("qi,nq,qj->nij", dphi, bw, dphi) / h[:, None, None]


def load_vector(mesh: Mesh1D, elem: ReferenceElement, f: Callable,
                quad_points: int | None = None) -> np.ndarray:
    """Full load vector (length n*r + 1, boundary dofs included)."""
    r = elem.degree
    xq, wq = _quadrature(r, quad_points)
    phi = elem.basis_values(xq)
    h = mesh.sizes
    xs = mesh.endpoints[:-1, None] + h[:, None] * xq[None, :]
    local = np.einsum("nq,qi->ni", f(xs) * wq[None, :] * h[:, None], phi)
    full = np.zeros(mesh.n * r + 1)
    g = np.arange(mesh.n)[:, None] * r + np.arange(r + 1)[None, :]
    np.add.at(full, g.ravel(), local.ravel())
    return full


def assemble_rhs(mesh: Mesh1D, elem: ReferenceElement, f: Callable,
                 include_boundary: bool = False, quad_points: int | None = None) -> np.ndarray:
    full = load_vector(mesh, elem, f, quad_points)
    return full if include_boundary else full[1:-1]


def assemble(mesh: Mesh1D, elem: ReferenceElement, coeff: Coefficient | None = None,
             f: Callable | None = None, quad_points: int | None = None) -> StiffnessSystem:
    coeff = constant(1.0) if coeff is None else coeff
    n, r = mesh.n, elem.degree
    Ak = element_matrices(mesh, elem, coeff, quad_points)
    g = np.arange(n)[:, None] * r + np.arange(r + 1)[None, :]
    rows = np.repeat(g, r + 1, axis=1).ravel()
    cols = np.tile(g, (1, r + 1)).ravel()
    N = n * r + 1
    full = sp.coo_matrix((Ak.reshape(n, -1).ravel(), (rows, cols)), shape=(N, N)).tocsr()
    A = full[1:-1, 1:-1].tocsr()
    A.sum_duplicates()
    A = (0.5 * (A + A.T)).tocsr()
    rhs = np.zeros(N - 2) if f is None else assemble_rhs(mesh, elem, f, quad_points=quad_points)
    return StiffnessSystem(A, rhs, mesh, elem, coeff, local_to_global(n, r))


def solve(system: StiffnessSystem, rhs=None) -> np.ndarray:
    b = system.rhs if rhs is None else rhs
    return spla.spsolve(system.matrix.tocsc(), b)


def extend_hat(system: StiffnessSystem, scale: float | None = None, position: str = "leading"):
    """Pad to order n*r with a decoupled unit equation.

    The padded row sits where the eliminated left Dirichlet dof was
    (``position="leading"``), which keeps the padded matrix equal to
    ``T_n(f)`` outside its first row and column. ``scale`` multiplies the
    stiffness block and rhs; the default ``1/n`` puts a uniform mesh on the
    symbol's scale. Returns ``(matrix, rhs)``.
    """
    s = 1.0 / system.n if scale is None else scale
    one = sp.identity(1, format="csr")
    if position == "leading":
        M = sp.block_diag((one, s * system.matrix), format="csr")
        rhs = np.concatenate(([0.0], s * system.rhs))
    elif position == "trailing":
        M = sp.block_diag((s * system.matrix, one), format="csr")
        rhs = np.concatenate((s * system.rhs, [0.0]))
    else:
        raise ValueError("position must be 'leading' or 'trailing'")
    return M, rhs


def truncate_hat(x, position: str = "leading") -> np.ndarray:
    return np.asarray(x)[1:] if position == "leading" else np.asarray(x)[:-1]


def element_coefficients(system: StiffnessSystem, u) -> np.ndarray:
    """(n, r+1) dof values per element."""
    full = system.full_vector(u)
    g = np.arange(system.n)[:, None] * system.r + np.arange(system.r + 1)[None, :]
    return full[g]


def evaluate(system: StiffnessSystem, u, x, derivative: bool = False) -> np.ndarray:
    """Evaluate the discrete solution (or its derivative) at points ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e = system.mesh.endpoints
    k = np.clip(np.searchsorted(e, x, side="right") - 1, 0, system.n - 1)
    h = system.mesh.sizes[k]
    xhat = (x - e[k]) / h
    c = element_coefficients(system, u)[k]
    if derivative:
        vals = system.elem.basis_derivatives(xhat) / h[:, None]
    else:
        vals = system.elem.basis_values(xhat)
    return np.sum(vals * c, axis=1)


def h1_seminorm_error(system: StiffnessSystem, u, exact_derivative: Callable,
                      quad_points: int | None = None) -> float:
    """sqrt(sum_k int_{I_k} (u_h' - u')^2) by elementwise Gauss quadrature."""
    r = system.r
    xq, wq = gauss_legendre(2 * r + 4 if quad_points is None else quad_points)
    dphi = system.elem.basis_derivatives(xq)
    h = system.mesh.sizes
    c = element_coefficients(system, u)
    duh = (c @ dphi.T) / h[:, None]
    xs = system.mesh.endpoints[:-1, None] + h[:, None] * xq[None, :]
    err2 = np.sum(h[:, None] * wq[None, :] * (duh - exact_derivative(xs)) ** 2)
    return float(np.sqrt(err2))


def export_matrix_coo(matrix, path) -> Path:
    """Write ``row col value`` lines (0-based, 17 significant digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    m = sp.coo_matrix(matrix)
    order = np.lexsort((m.col, m.row))
    with path.open("w") as fh:
        fh.write(f"# {m.shape[0]} {m.shape[1]} {m.nnz}\n")
        for i in order:
            fh.write(f"{m.row[i]} {m.col[i]} {m.data[i]:.17g}\n")
    return path


def read_matrix_coo(path) -> sp.csr_matrix:
    lines = Path(path).read_text().splitlines()
    nr, nc, _ = (int(t) for t in lines[0].lstrip("# ").split())
    data = np.loadtxt(lines[1:], ndmin=2)
    return sp.coo_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))),
                         shape=(nr, nc)).tocsr()


@dataclass(frozen=True)
class ManufacturedProblem:
    coefficient: Coefficient
    u: Callable
    du: Callable
    f: Callable
    label: str


def sine_problem() -> ManufacturedProblem:
    """b = 1, u = sin(pi x), f = pi^2 sin(pi x)."""
    return ManufacturedProblem(
        constant(1.0),
        lambda x: np.sin(np.pi * x),
        lambda x: np.pi * np.cos(np.pi * x),
        lambda x: np.pi**2 * np.sin(np.pi * x),
        "sin",
    )


def _polyexp_du(x):
    return np.exp(x) * (1.0 - x - x * x)


def _polyexp_d2u(x):
    return -np.exp(x) * (3.0 * x + x * x)


def exp_problem() -> ManufacturedProblem:
    """b = 1, u = x(1-x)e^x, f = e^x (3x + x^2).

    Unlike sin(pi x), its load vector has components along the whole
    spectrum, so Krylov iteration counts are representative.
    """
    return ManufacturedProblem(constant(1.0), lambda x: x * (1.0 - x) * np.exp(x), _polyexp_du,
                               lambda x: -_polyexp_d2u(x), "x(1-x)e^x")


def quadratic_coefficient_problem() -> ManufacturedProblem:
    """b = 1 + x^2, u = x(1-x)e^x, f = -(b u')'."""

    def f(x):
        return -(2.0 * x * _polyexp_du(x) + (1.0 + x * x) * _polyexp_d2u(x))

    return ManufacturedProblem(quadratic(), lambda x: x * (1.0 - x) * np.exp(x), _polyexp_du, f, "x(1-x)e^x")
