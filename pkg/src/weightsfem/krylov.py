"""Conjugate gradients, Strang-corrected block circulant preconditioning and
extremal eigenvalues.

The block circulant ``C_n(f)`` has first block column ``(alpha, beta, 0, ...,
0, beta^T)``. A DFT of length n along the block index turns it into the n
frequency blocks ``f(-2 pi k / n)`` (numpy's sign convention). The kernel of
``f(0)`` is spanned by the all-ones vector, so the Strang correction
``S_n = C_n(f) + (1/(n r)) 1 1^T`` only touches the zero-frequency block,
which becomes ``f(0) + (1/r) 1_r 1_r^T``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import EigensolverNoConvergence, NonPositiveCoefficient, SingularFrequencyBlock
from .meshing import Coefficient, Mesh1D, uniform_mesh
from .symbol import SpectralSymbol, symbol_at

DENSE_EIG_LIMIT = 2000


@dataclass
class SolveReport:
    iterations: int
    residual: float  # final ||b - A x|| / ||b||
    history: list = field(default_factory=list)  # stopping quantity per iteration, history[0] = 1
    time_ms: float = 0.0
    converged: bool = True

    def to_text(self) -> str:
        return json.dumps({"iterations": self.iterations, "residual": self.residual,
                           "time_ms": round(self.time_ms, 3)})


@dataclass(frozen=True)
class CirculantPreconditioner:
    r: int
    n: int
    freq_blocks: np.ndarray  # (n, r, r) corrected blocks, index k <-> f(-2 pi k / n)
    factorizations: np.ndarray = field(repr=False)  # (n, r, r) inverses of freq_blocks
    diag_scale: np.ndarray | None = None  # length n*r, sqrt(b) at element midpoints

    @property
    def order(self) -> int:
        return self.n * self.r

    def solve(self, v) -> np.ndarray:
        """P^{-1} v."""
        return apply_strang_inverse(self, v)

    def matvec(self, w) -> np.ndarray:
        """P w, the forward action (used for checks)."""
        w = np.asarray(w, dtype=float)
        d = self.diag_scale
        x = w if d is None else d * w
        X = np.fft.fft(x.reshape(self.n, self.r), axis=0)
        y = np.fft.ifft(np.einsum("kij,kj->ki", self.freq_blocks, X), axis=0).real.ravel()
        return y if d is None else d * y

    def as_linear_operator(self) -> spla.LinearOperator:
        N = self.order
        return spla.LinearOperator((N, N), matvec=self.solve, dtype=float)


def _frequency_blocks(sym: SpectralSymbol, n: int) -> np.ndarray:
    theta = -2.0 * np.pi * np.arange(n) / n
    blocks = symbol_at(sym, theta)
    blocks[0] += np.ones((sym.r, sym.r)) / sym.r
    return 0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))


def build_strang(sym: SpectralSymbol, n: int, rcond: float = 1e-13) -> CirculantPreconditioner:
    """Strang-corrected block circulant ``S_n = C_n(f) + (1/(n r)) 1 1^T``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    blocks = _frequency_blocks(sym, n)
    eig = np.linalg.eigvalsh(blocks)
    scale = np.abs(eig).max()
    if np.any(eig[:, 0] <= rcond * scale):
        k = int(np.argmin(eig[:, 0]))
        raise SingularFrequencyBlock(f"frequency block {k} has eigenvalue {eig[k, 0]:.3e}")
    inv = np.linalg.inv(blocks)
    inv = 0.5 * (inv + np.conj(np.swapaxes(inv, 1, 2)))
    return CirculantPreconditioner(sym.r, n, blocks, inv)


def apply_strang_inverse(prec: CirculantPreconditioner, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (prec.order,):
        raise ValueError(f"expected a vector of length {prec.order}, got {v.shape}")
    d = prec.diag_scale
    x = v if d is None else v / d
    X = np.fft.fft(x.reshape(prec.n, prec.r), axis=0)
    y = np.fft.ifft(np.einsum("kij,kj->ki", prec.factorizations, X), axis=0).real.ravel()
    return y if d is None else y / d


def midpoint_scale(mesh: Mesh1D, coeff: Coefficient, r: int) -> np.ndarray:
    """sqrt(b) at element midpoints, repeated r times per element."""
    b = coeff(mesh.midpoints)
    if np.any(b <= 0):
        raise NonPositiveCoefficient(f"coefficient {coeff.label} is not positive at a midpoint")
    return np.repeat(np.sqrt(b), r)


def build_diag_circulant(sym: SpectralSymbol, n: int, coeff: Coefficient,
                         mesh: Mesh1D | None = None) -> CirculantPreconditioner:
    """``P_n(b) = D S_n D`` with ``D = diag(sqrt(b(midpoint_i)) I_r)``."""
    mesh = uniform_mesh(n) if mesh is None else mesh
    if mesh.n != n:
        raise ValueError("mesh has a different number of elements")
    base = build_strang(sym, n)
    d = midpoint_scale(mesh, coeff, sym.r)
    return CirculantPreconditioner(base.r, base.n, base.freq_blocks, base.factorizations, d)


def dense_strang(sym: SpectralSymbol, n: int) -> np.ndarray:
    """Dense ``S_n`` from its block circulant structure (test oracle)."""
    r = sym.r
    S = np.zeros((n * r, n * r))
    for i in range(n):
        S[i * r:(i + 1) * r, i * r:(i + 1) * r] += sym.alpha
        j = (i + 1) % n
        S[j * r:(j + 1) * r, i * r:(i + 1) * r] += sym.beta
        S[i * r:(i + 1) * r, j * r:(j + 1) * r] += sym.beta.T
    return S + 1.0 / (n * r)


def dense_preconditioner(prec: CirculantPreconditioner, sym: SpectralSymbol) -> np.ndarray:
    S = dense_strang(sym, prec.n)
    if prec.diag_scale is None:
        return S
    d = prec.diag_scale
    return d[:, None] * S * d[None, :]


def _as_solver(prec) -> Callable[[np.ndarray], np.ndarray]:
    if prec is None:
        return lambda v: v
    if isinstance(prec, CirculantPreconditioner):
        return prec.solve
    if isinstance(prec, spla.LinearOperator):
        return prec.matvec
    if callable(prec):
        return prec
    raise TypeError("preconditioner must be None, a CirculantPreconditioner, a LinearOperator or a callable")


def pcg(matrix, rhs, prec=None, tol: float = 1e-8, maxit: int | None = None,
        x0=None, stop: str = "preconditioned") -> tuple[np.ndarray, SolveReport]:
    """Preconditioned conjugate gradients from a zero (or given) initial guess.

    ``stop="preconditioned"`` ends when ``sqrt(r^T M^{-1} r)`` has dropped by
    ``tol`` relative to its initial value; ``stop="residual"`` uses
    ``||r|| / ||b||``. ``prec`` is applied as ``M^{-1}``.
    """
    if stop not in ("preconditioned", "residual"):
        raise ValueError("stop must be 'preconditioned' or 'residual'")
    t0 = time.perf_counter()
    A = matrix
    b = np.asarray(rhs, dtype=float)
    N = b.size
    maxit = 10 * N if maxit is None else maxit
    M = _as_solver(prec)
    x = np.zeros(N) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x if x0 is not None else b.copy()
    nb = np.linalg.norm(b)

    def finish(k, hist, ok):
        res = np.linalg.norm(b - A @ x) / nb if nb > 0 else 0.0
        return x, SolveReport(k, float(res), hist, 1e3 * (time.perf_counter() - t0), ok)

    if nb == 0.0:
        x[:] = 0.0
        return finish(0, [0.0], True)
    z = M(r)
    rz = float(r @ z)
    ref = np.sqrt(abs(rz)) if stop == "preconditioned" else nb
    measure = (lambda r_, rz_: np.sqrt(abs(rz_))) if stop == "preconditioned" else (lambda r_, rz_: np.linalg.norm(r_))
    hist = [measure(r, rz) / ref]
    if hist[0] <= tol:
        return finish(0, hist, True)
    p = z.copy()
    for k in range(1, maxit + 1):
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0:
            return finish(k - 1, hist, False)
        a = rz / pAp
        x += a * p
        r -= a * Ap
        z = M(r)
        rz_new = float(r @ z)
        hist.append(measure(r, rz_new) / ref)
        if hist[-1] <= tol:
            return finish(k, hist, True)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return finish(maxit, hist, False)


def cg(matrix, rhs, tol: float = 1e-8, maxit: int | None = None, x0=None) -> tuple[np.ndarray, SolveReport]:
    """Unpreconditioned CG, stopping on ``||r|| / ||b|| <= tol``."""
    return pcg(matrix, rhs, None, tol, maxit, x0, stop="residual")


def extremal_eigs(matrix, tol: float = 1e-10, maxit: int | None = None,
                  dense_limit: int = DENSE_EIG_LIMIT) -> tuple[float, float, bool]:
    """``(lambda_min, lambda_max, converged)`` of a symmetric positive definite matrix.

    Orders up to ``dense_limit`` use a dense symmetric eigensolver. Larger
    matrices use ARPACK's implicitly restarted Lanczos: directly for
    ``lambda_max`` and in shift-invert mode about 0 (sparse LU) for
    ``lambda_min``. ``converged`` is False if ARPACK stops early, in which
    case the best Ritz values found are returned.
    """
    N = matrix.shape[0]
    if N <= dense_limit:
        A = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        ev = scipy.linalg.eigvalsh(A)
        return float(ev[0]), float(ev[-1]), True
    A = sp.csc_matrix(matrix)
    ok = True
    try:
        lmax = spla.eigsh(A, k=1, which="LA", tol=tol, maxiter=maxit, return_eigenvectors=False)[0]
    except spla.ArpackNoConvergence as exc:
        lmax, ok = (exc.eigenvalues[-1] if exc.eigenvalues.size else np.nan), False
    try:
        lmin = spla.eigsh(A, k=1, sigma=0.0, which="LM", tol=tol, maxiter=maxit,
                          return_eigenvectors=False)[0]
    except spla.ArpackNoConvergence as exc:
        lmin, ok = (exc.eigenvalues[0] if exc.eigenvalues.size else np.nan), False
    return float(lmin), float(lmax), ok


def condition_number_2norm(matrix, tol: float = 1e-10) -> float:
    lmin, lmax, ok = extremal_eigs(matrix, tol)
    if not ok:
        raise EigensolverNoConvergence(f"extremal eigenvalues of an order-{matrix.shape[0]} matrix")
    return lmax / lmin


def condition_number_1norm(matrix) -> float:
    """Exact ``||A||_1 ||A^{-1}||_1`` through a dense inverse."""
    A = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
    return float(np.linalg.norm(A, 1) * np.linalg.norm(np.linalg.inv(A), 1))


def preconditioned_spectrum(matrix, prec_matrix) -> np.ndarray:
    """Eigenvalues of ``P^{-1} A`` from the symmetric-definite pencil (A, P)."""
    A = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
    return scipy.linalg.eigh(A, np.asarray(prec_matrix, dtype=float), eigvals_only=True)


def preconditioned_spectrum_cluster(matrix, prec_matrix, epsilon: float) -> int:
    """Number of eigenvalues of ``P^{-1} A`` outside ``(1 - epsilon, 1 + epsilon)``."""
    ev = preconditioned_spectrum(matrix, prec_matrix)
    return int(np.count_nonzero(np.abs(ev - 1.0) >= epsilon))
