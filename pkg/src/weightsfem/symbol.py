"""Block-Toeplitz generating function of the stiffness sequence.

For a uniform mesh and unit coefficient the (h-normalized) stiffness matrix is
a principal submatrix of ``T_n(f)`` with

    f(theta) = alpha + beta e^{i theta} + beta^T e^{-i theta},

``alpha`` the r x r block of the element matrix with the shared endpoint dof
folded into entry (0, 0), and ``beta`` the coupling row of the next element's
first dof, padded with zeros.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .jacobi import jacobi_eigvalsh
from .reference import (
    ReferenceElement,
    equispaced_lagrange_derivative_gram,
    interior_minor,
    local_stiffness,
)

DEFAULT_GRID = 2049


@dataclass(frozen=True)
class SpectralSymbol:
    r: int
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        for a in (self.alpha, self.beta):
            a.setflags(write=False)

    def at(self, theta):
        return symbol_at(self, theta)

    @property
    def south_east_minor(self) -> np.ndarray:
        """Rows/columns 2..r of f; independent of theta."""
        return np.asarray(self.alpha[1:, 1:])


@dataclass(frozen=True)
class EigencurveSample:
    thetas: np.ndarray
    curves: np.ndarray  # shape (r, len(thetas)), row j is lambda_{j+1}

    @property
    def r(self) -> int:
        return self.curves.shape[0]


def build_symbol(elem: ReferenceElement) -> SpectralSymbol:
    A = local_stiffness(elem).weights
    r = elem.degree
    alpha = A[:r, :r].copy()
    alpha[0, 0] += A[r, r]
    beta = np.zeros((r, r))
    beta[0, :] = A[r, :r]
    return SpectralSymbol(r, alpha, beta)


def symbol_at(sym: SpectralSymbol, theta):
    """f(theta) for a scalar (r x r) or an array of angles (m x r x r)."""
    th = np.asarray(theta, dtype=float)
    e = np.exp(1j * th)[..., None, None]
    return sym.alpha + sym.beta * e + sym.beta.T * np.conj(e)


def lagrangian_interior_det(r: int) -> float:
    """d_r: determinant of the interior minor of the equispaced derivative Gram."""
    if r == 1:
        return 1.0
    return float(np.linalg.det(interior_minor(equispaced_lagrange_derivative_gram(r))))


def determinant_constant(elem: ReferenceElement) -> float:
    """(det V^{-1})^2 d_r, the factor multiplying 2 - 2 cos(theta) in det f."""
    return lagrangian_interior_det(elem.degree) / elem.det_vandermonde**2


def determinant_identity_check(sym: SpectralSymbol, elem: ReferenceElement, thetas) -> float:
    """Largest relative deviation of det f(theta) from (det V^{-1})^2 d_r (2 - 2cos theta).

    Angles with 2 - 2cos(theta) < 1e-8 are skipped: both sides vanish there.
    """
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    g = 2.0 - 2.0 * np.cos(th)
    th = th[g >= 1e-8]
    g = g[g >= 1e-8]
    if th.size == 0:
        raise ValueError("grid has no angle away from theta = 0")
    ref = determinant_constant(elem) * g
    det = np.linalg.det(symbol_at(sym, th))
    return float(np.max(np.abs(det - ref) / np.abs(ref)))


def eigencurves(sym: SpectralSymbol, grid_size: int = DEFAULT_GRID) -> EigencurveSample:
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    thetas = np.linspace(-np.pi, np.pi, grid_size)
    vals = jacobi_eigvalsh(symbol_at(sym, thetas))
    return EigencurveSample(thetas, vals.T.copy())


def min_eig_curvature(sym: SpectralSymbol, half_width: float = 0.05, npts: int = 11) -> float:
    """c2 in lambda_1(theta) ~ c2 theta^2, from a central quadratic fit."""
    th = np.linspace(-half_width, half_width, npts)
    lam1 = jacobi_eigvalsh(symbol_at(sym, th))[:, 0]
    return float(np.polyfit(th, lam1, 2)[0])


def max_eigenvalue(sym: SpectralSymbol, grid_size: int = DEFAULT_GRID) -> float:
    return float(eigencurves(sym, grid_size).curves[-1].max())


def conditioning_estimate(sym: SpectralSymbol, n: int, grid_size: int = DEFAULT_GRID) -> float:
    """Asymptotic conditioning n^2 max_theta lambda_r / c2.

    This drops the ratio of the lowest discrete frequency to 1/n: the extreme
    eigenvalue ratio of the Dirichlet stiffness matrix is about this value
    divided by pi^2.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    return n * n * max_eigenvalue(sym, grid_size) / min_eig_curvature(sym)


def block_toeplitz(sym: SpectralSymbol, n: int) -> np.ndarray:
    """Dense T_n(f): alpha on the block diagonal, beta below, beta^T above."""
    r = sym.r
    T = np.zeros((n * r, n * r))
    for k in range(n):
        T[k * r:(k + 1) * r, k * r:(k + 1) * r] = sym.alpha
        if k + 1 < n:
            T[(k + 1) * r:(k + 2) * r, k * r:(k + 1) * r] = sym.beta
            T[k * r:(k + 1) * r, (k + 1) * r:(k + 2) * r] = sym.beta.T
    return T


def write_eigencurves_csv(sample: EigencurveSample, path, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {value}\n")
        w = csv.writer(fh)
        w.writerow(["theta"] + [f"lambda_{j + 1}" for j in range(sample.r)])
        for i, th in enumerate(sample.thetas):
            w.writerow([repr(float(th))] + [repr(float(v)) for v in sample.curves[:, i]])
    return path
