"""Weights-based finite elements in 1D: spectral symbols, conditioning and
circulant-preconditioned conjugate gradients."""

from .assembly import StiffnessSystem, assemble, assemble_rhs, extend_hat, h1_seminorm_error, solve
from .errors import WeightsFEMError
from .krylov import (
    CirculantPreconditioner,
    SolveReport,
    apply_strang_inverse,
    build_diag_circulant,
    build_strang,
    cg,
    extremal_eigs,
    pcg,
    preconditioned_spectrum_cluster,
)
from .meshing import Coefficient, Mesh1D, graded_mesh, randomized_mesh, uniform_mesh
from .reference import LocalStiffness, ReferenceElement, local_stiffness
from .symbol import SpectralSymbol, build_symbol, conditioning_estimate, eigencurves, symbol_at

__version__ = "0.1.0"
