"""Reference element algebra on [0, 1].

The convenient basis is the Lagrange basis on equispaced nodes i/r. Weights
(here: point evaluations at ``points``) define the dual basis through the
generalized Vandermonde matrix ``V[i, j] = l_j(points[i])``; the dual-basis
coefficients are ``W = V^{-T}`` and the local stiffness matrices are related
by the congruence ``A = V^{-T} B V^{-1}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import BoundaryViolation, DegenerateNodes, SingularVandermonde

NODE_TOL = 1e-14
PIVOT_TOL = 1e-14


def gauss_legendre(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


class LagrangeBasis:
    """Lagrange cardinal polynomials on a fixed node set.

    Values use the barycentric formula; derivatives use the product rule on
    the factored form, which stays exact when an evaluation point hits a node.
    """

    def __init__(self, nodes):
        self.nodes = np.asarray(nodes, dtype=float)
        diff = self.nodes[:, None] - self.nodes[None, :]
        np.fill_diagonal(diff, 1.0)
        self.weights = 1.0 / diff.prod(axis=1)

    @property
    def size(self) -> int:
        return self.nodes.size

    def values(self, x) -> np.ndarray:
        """Matrix ``L[k, j] = l_j(x[k])``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        d = x[:, None] - self.nodes[None, :]
        hit = d == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.weights[None, :] / d
            out = terms / terms.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        out[rows] = hit[rows].astype(float)
        return out

    def derivatives(self, x) -> np.ndarray:
        """Matrix ``D[k, j] = l_j'(x[k])``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        m = self.size
        d = x[:, None] - self.nodes[None, :]
        out = np.zeros((x.size, m))
        for j in range(m):
            acc = np.zeros(x.size)
            for skip in range(m):
                if skip == j:
                    continue
                keep = [k for k in range(m) if k != j and k != skip]
                acc += d[:, keep].prod(axis=1)
            out[:, j] = self.weights[j] * acc
        return out


@lru_cache(maxsize=None)
def equispaced_basis(r: int) -> LagrangeBasis:
    return LagrangeBasis(np.linspace(0.0, 1.0, r + 1))


def equispaced_lagrange_derivative_gram(r: int) -> np.ndarray:
    """Gram matrix ``B[i, j] = int_0^1 l_i' l_j'`` for the equispaced basis."""
    if r < 1:
        raise ValueError("degree must be >= 1")
    x, w = gauss_legendre(r + 1)
    d = equispaced_basis(r).derivatives(x)
    return (d * w[:, None]).T @ d


def _check_points(points, r: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape != (r + 1,):
        raise ValueError(f"expected {r + 1} points for degree {r}, got {pts.shape}")
    if pts[0] != 0.0 or pts[-1] != 1.0:
        raise BoundaryViolation(f"first/last points must be 0 and 1, got {pts[0]}, {pts[-1]}")
    if np.any(pts < 0.0) or np.any(pts > 1.0):
        raise BoundaryViolation("points must lie in [0, 1]")
    gaps = np.abs(pts[:, None] - pts[None, :]) + np.eye(r + 1)
    if gaps.min() <= NODE_TOL:
        raise DegenerateNodes(f"coincident points in {pts}")
    if np.any(np.diff(pts) <= 0):
        raise DegenerateNodes(f"points must be strictly increasing, got {pts}")
    return pts


def build_vandermonde(points, r: int) -> np.ndarray:
    """Generalized Vandermonde ``V[i, j] = l_j(points[i])`` (equispaced ``l_j``)."""
    pts = _check_points(points, r)
    V = equispaced_basis(r).values(pts)
    # endpoints are exact nodes of the equispaced basis
    V[0] = np.eye(r + 1)[0]
    V[-1] = np.eye(r + 1)[-1]
    return V


def dual_coefficients(V: np.ndarray) -> tuple[np.ndarray, float]:
    """Return ``(W, det V)`` with ``W = V^{-T}``."""
    V = np.asarray(V, dtype=float)
    with warnings.catch_warnings():
        # singularity is reported below through SingularVandermonde
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(V, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < PIVOT_TOL * max(1.0, np.abs(V).max()):
        raise SingularVandermonde(f"smallest pivot {pivots.min():.3e}")
    sign = (-1.0) ** np.count_nonzero(piv != np.arange(piv.size))
    det = float(sign * np.prod(np.diag(lu)))
    Vinv = scipy.linalg.lu_solve((lu, piv), np.eye(V.shape[0]))
    return Vinv.T.copy(), det


@dataclass(frozen=True)
class ReferenceElement:
    """Degree-``r`` element on [0, 1] whose dofs are evaluations at ``points``."""

    degree: int
    points: tuple[float, ...]
    vandermonde: np.ndarray = field(repr=False, compare=False)
    dual_coeffs: np.ndarray = field(repr=False, compare=False)
    det_vandermonde: float = field(repr=False, compare=False)

    @classmethod
    def from_points(cls, points) -> "ReferenceElement":
        pts = np.asarray(points, dtype=float)
        r = pts.size - 1
        if r < 1:
            raise ValueError("need at least two points")
        V = build_vandermonde(pts, r)
        W, det = dual_coefficients(V)
        V.setflags(write=False)
        W.setflags(write=False)
        return cls(r, tuple(float(p) for p in pts), V, W, det)

    @classmethod
    def lagrangian(cls, r: int) -> "ReferenceElement":
        return cls.from_points(np.arange(r + 1) / r)

    @classmethod
    def symmetric(cls, r: int, *params: float) -> "ReferenceElement":
        return cls.from_points(symmetric_points(r, *params))

    @property
    def is_lagrangian(self) -> bool:
        return bool(np.allclose(self.points, np.arange(self.degree + 1) / self.degree, atol=1e-15))

    def basis_values(self, x) -> np.ndarray:
        """Dual (weights) basis values ``phi_i(x[k])`` as a (len(x), r+1) array."""
        return equispaced_basis(self.degree).values(x) @ self.dual_coeffs.T

    def basis_derivatives(self, x) -> np.ndarray:
        return equispaced_basis(self.degree).derivatives(x) @ self.dual_coeffs.T


def symmetric_points(r: int, *params: float) -> np.ndarray:
    """Points symmetric about 1/2 with free interior parameters in (0, 1/2).

    ``symmetric_points(3, xi) -> (0, xi, 1-xi, 1)`` and
    ``symmetric_points(4, xi) -> (0, xi, 1/2, 1-xi, 1)``.
    """
    nfree = (r - 1) // 2
    if len(params) != nfree:
        raise ValueError(f"degree {r} needs {nfree} parameter(s), got {len(params)}")
    if any(not 0.0 < p < 0.5 for p in params):
        raise ValueError(f"symmetric parameters must lie in (0, 1/2), got {params}")
    left = [0.0, *sorted(float(p) for p in params)]
    mid = [0.5] if r % 2 == 0 else []
    return np.array(left + mid + [1.0 - p for p in reversed(left)])


@dataclass(frozen=True)
class LocalStiffness:
    lagrangian: np.ndarray
    weights: np.ndarray


def local_stiffness(elem: ReferenceElement, gram: np.ndarray | None = None) -> LocalStiffness:
    """Local stiffness in both bases via the congruence with ``V^{-1}``.

    ``gram`` may carry a coefficient-weighted Lagrange Gram matrix; the default
    is the unit-coefficient matrix on the unit reference interval.
    """
    B = equispaced_lagrange_derivative_gram(elem.degree) if gram is None else gram
    W = elem.dual_coeffs
    A = W @ B @ W.T
    A = 0.5 * (A + A.T)
    return LocalStiffness(B, A)


def interior_minor(M: np.ndarray) -> np.ndarray:
    """Rows/columns 2..r (1-based) of an (r+1)x(r+1) matrix."""
    return M[1:-1, 1:-1]
