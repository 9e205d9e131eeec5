import math

import numpy as np
import pytest
import scipy.sparse as sp

from planar_spectra.eigensolve import (
    ConvergenceError,
    SaddleSolver,
    SolveOptions,
    TopologyError,
    constrained_smallest,
    divergence_residual,
    smallest_eigenpairs,
)


def laplacian_1d(n):
    h = 1.0 / (n + 1)
    K = sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]) / h**2
    return sp.csr_matrix(K)


@pytest.mark.parametrize("method", ["dense", "sparse"])
def test_diagonal_problem(method):
    d = np.arange(1.0, 3001.0)[::-1]
    pairs = smallest_eigenpairs(sp.diags(d), sp.identity(3000), SolveOptions(k=4, method=method))
    assert [p.lam for p in pairs] == pytest.approx([1, 2, 3, 4], rel=1e-12)
    assert all(p.residual < 1e-9 for p in pairs)


@pytest.mark.parametrize("n", [200, 2500])
def test_1d_laplacian_closed_form(n):
    h = 1.0 / (n + 1)
    exact = [4 / h**2 * math.sin(j * math.pi * h / 2) ** 2 for j in range(1, 6)]
    pairs = smallest_eigenpairs(laplacian_1d(n), sp.identity(n), SolveOptions(k=5))
    assert [p.lam for p in pairs] == pytest.approx(exact, rel=1e-10)


def test_kernel_triggers_shift_retry():
    n = 2500
    d = np.ones(n)
    d[:2] = 0.0
    pairs = smallest_eigenpairs(sp.diags(d), sp.identity(n), SolveOptions(k=3))
    assert [p.lam for p in pairs] == pytest.approx([0, 0, 1], abs=1e-9)


def test_mass_orthonormal_and_scaling():
    n = 2500
    rng = np.random.default_rng(1)
    K = laplacian_1d(n)
    M = sp.diags(1.0 + rng.random(n))
    pairs = smallest_eigenpairs(K, M, SolveOptions(k=4))
    X = np.column_stack([p.vector for p in pairs])
    assert np.allclose(X.T @ (M @ X), np.eye(4), atol=1e-8)
    scaled = smallest_eigenpairs(4 * K, M, SolveOptions(k=4))
    assert [p.lam for p in scaled] == pytest.approx([4 * p.lam for p in pairs], rel=1e-10)


def test_permutation_invariance():
    n = 300
    K = laplacian_1d(n)
    perm = np.random.default_rng(3).permutation(n)
    P = sp.identity(n, format="csr")[perm]
    a = smallest_eigenpairs(K, sp.identity(n), SolveOptions(k=3))
    b = smallest_eigenpairs(P @ K @ P.T, sp.identity(n), SolveOptions(k=3))
    assert [p.lam for p in a] == pytest.approx([p.lam for p in b], rel=1e-12)


def test_deterministic_vectors():
    K = laplacian_1d(2500)
    a = smallest_eigenpairs(K, sp.identity(2500), SolveOptions(k=2))
    b = smallest_eigenpairs(K, sp.identity(2500), SolveOptions(k=2))
    assert np.array_equal(a[0].vector, b[0].vector)


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(k=0)
    with pytest.raises(ValueError):
        SolveOptions(tol=0)
    with pytest.raises(ValueError):
        smallest_eigenpairs(sp.identity(3), sp.identity(3), SolveOptions(k=4))


def test_unreachable_tolerance_raises():
    K = laplacian_1d(100)
    with pytest.raises(ConvergenceError):
        smallest_eigenpairs(K, sp.identity(100), SolveOptions(k=1, tol=1e-30))


def _constraint_problem(n):
    A = laplacian_1d(n)
    M = sp.identity(n, format="csr")
    # B x = 0 forces x[2i] == x[2i+1] for the first few pairs; the last
    # row is minus the sum of the others, so like a discrete divergence
    # the multiplier is determined up to one constant
    rows = []
    for i in range(5):
        r = np.zeros(n)
        r[2 * i], r[2 * i + 1] = 1.0, -1.0
        rows.append(r)
    rows.append(-np.sum(rows, axis=0))
    return A, M, sp.csr_matrix(np.array(rows))


@pytest.mark.parametrize("method", ["dense", "sparse"])
def test_constrained_matches_nullspace_reference(method):
    import scipy.linalg as la

    A, M, B = _constraint_problem(400)
    Z = la.null_space(B.toarray())
    ref = la.eigh(Z.T @ A.toarray() @ Z, eigvals_only=True, subset_by_index=[0, 2])
    pairs = constrained_smallest(A, M, B, SolveOptions(k=3, method=method))
    assert [p.lam for p in pairs] == pytest.approx(ref, rel=1e-9)
    for p in pairs:
        assert divergence_residual(B, p.vector) < 1e-10
        r = A @ p.vector + B.T @ p.multiplier - p.lam * (M @ p.vector)
        assert np.linalg.norm(r) < 1e-7 * np.linalg.norm(A @ p.vector)


def test_constrained_with_zero_constraint_is_unconstrained():
    A = laplacian_1d(100)
    M = sp.identity(100)
    a = smallest_eigenpairs(A, M, SolveOptions(k=2))
    b = constrained_smallest(A, M, sp.csr_matrix((3, 100)), SolveOptions(k=2))
    assert [p.lam for p in a] == pytest.approx([p.lam for p in b], rel=1e-13)
    assert np.all(b[0].multiplier == 0)


def test_saddle_solver_detects_extra_null_mode():
    n = 50
    A = laplacian_1d(n)
    # two pairs of identical rows: the multiplier null space is 2-dim and
    # the mean row cannot fix both modes
    r = np.zeros(n)
    r[0] = 1.0
    B = sp.csr_matrix(np.array([r, r, np.roll(r, 7), np.roll(r, 7)]))
    with pytest.raises(TopologyError):
        SaddleSolver(A, sp.identity(n), B, np.ones(4))
