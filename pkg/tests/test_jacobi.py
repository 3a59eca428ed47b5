import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weightsfem.errors import EigensolverNoConvergence
from weightsfem.jacobi import jacobi_eigvalsh


@given(m=st.integers(1, 7), seed=st.integers(0, 2**32 - 1), complex_=st.booleans())
def test_matches_lapack(m, seed, complex_):
    g = np.random.Generator(np.random.PCG64(seed))
    X = g.standard_normal((m, m))
    if complex_:
        X = X + 1j * g.standard_normal((m, m))
    A = X + X.conj().T
    np.testing.assert_allclose(jacobi_eigvalsh(A), np.linalg.eigvalsh(A), atol=1e-11 * max(1, np.abs(A).max()))


def test_stack_shape_and_order(rng):
    X = rng.standard_normal((6, 4, 4)) + 1j * rng.standard_normal((6, 4, 4))
    A = X + np.conj(np.swapaxes(X, 1, 2))
    vals = jacobi_eigvalsh(A)
    assert vals.shape == (6, 4)
    assert np.all(np.diff(vals, axis=1) >= 0)
    np.testing.assert_allclose(vals, np.linalg.eigvalsh(A), atol=1e-11)


def test_diagonal_and_zero():
    np.testing.assert_array_equal(jacobi_eigvalsh(np.diag([3.0, -1.0, 2.0])), [-1.0, 2.0, 3.0])
    np.testing.assert_array_equal(jacobi_eigvalsh(np.zeros((3, 3))), [0.0, 0.0, 0.0])


def test_no_convergence_raises():
    A = np.array([[1.0, 2.0], [2.0, 5.0]])
    with pytest.raises(EigensolverNoConvergence):
        jacobi_eigvalsh(A, max_sweeps=0)


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigvalsh(np.zeros((2, 3)))
