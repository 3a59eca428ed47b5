"""Cyclic Jacobi eigenvalues for stacks of small Hermitian matrices.

The symbol is an r x r Hermitian matrix sampled on thousands of angles, so the
rotations are applied to the whole stack at once.
"""

from __future__ import annotations

import numpy as np

from .errors import EigensolverNoConvergence


def _offdiag_norm(A: np.ndarray) -> np.ndarray:
    mask = ~np.eye(A.shape[-1], dtype=bool)
    return np.sqrt(np.sum(np.abs(A[:, mask]) ** 2, axis=1))


def jacobi_eigvalsh(A, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Ascending eigenvalues of one Hermitian matrix or a stack of them.

    A sweep visits every pair (p, q) once; iteration stops when the
    off-diagonal Frobenius norm of every matrix is below ``tol`` times its
    full Frobenius norm.
    """
    A = np.asarray(A)
    single = A.ndim == 2
    work = np.array(A, dtype=complex, copy=True).reshape((-1,) + A.shape[-2:])
    m = work.shape[-1]
    if work.shape[-2] != m:
        raise ValueError("matrices must be square")
    work = 0.5 * (work + np.conj(np.swapaxes(work, 1, 2)))
    scale = np.linalg.norm(work, axis=(1, 2))
    scale[scale == 0.0] = 1.0

    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(work) <= tol * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = work[:, p, q]
                mag = np.abs(apq)
                active = mag > 1e-300
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                app = work[:, p, p].real
                aqq = work[:, q, q].real
                tau = (aqq - app) / (2.0 * safe)
                with np.errstate(over="ignore"):
                    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cph = np.conj(phase)

                colp = work[:, :, p].copy()
                colq = work[:, :, q].copy()
                work[:, :, p] = c[:, None] * colp - (s * cph)[:, None] * colq
                work[:, :, q] = s[:, None] * colp + (c * cph)[:, None] * colq
                rowp = work[:, p, :].copy()
                rowq = work[:, q, :].copy()
                work[:, p, :] = c[:, None] * rowp - (s * phase)[:, None] * rowq
                work[:, q, :] = s[:, None] * rowp + (c * phase)[:, None] * rowq
                work[:, p, q] = 0.0
                work[:, q, p] = 0.0
    else:
        if not np.all(_offdiag_norm(work) <= tol * scale):
            raise EigensolverNoConvergence(f"no convergence after {max_sweeps} sweeps")

    vals = np.sort(np.einsum("kii->ki", work).real, axis=1)
    return vals[0] if single else vals.reshape(A.shape[:-1])
