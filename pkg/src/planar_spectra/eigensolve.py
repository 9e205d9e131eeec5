"""Smallest eigenpairs of symmetric generalized problems ``K x = lam M x``.

Sparse problems use shift-invert Lanczos (ARPACK) on top of a SuperLU
factorization; small ones fall back to dense LAPACK. The constrained
variant restricts the problem to ``ker B`` through the saddle-point
operator ``[[A - s M, B^T], [B, 0]]``, with an extra row fixing the mean
of the multiplier.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)

DENSE_LIMIT = 2000


class FactorizationError(RuntimeError):
    """Shifted operator could not be factorized."""


class ConvergenceError(RuntimeError):
    """Eigensolver did not converge."""


class TopologyError(RuntimeError):
    """Pressure multiplier is not determined up to a single constant."""


@dataclass
class SolveOptions:
    k: int = 1
    tol: float = 1e-9
    shift: float = 0.0
    max_iter: int | None = None
    seed: int = 0
    method: str = "auto"  # auto | sparse | dense

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.method not in ("auto", "sparse", "dense"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class EigenPair:
    lam: float
    vector: np.ndarray
    residual: float
    m_norm: float
    multiplier: np.ndarray | None = None


def _factorize(A):
    """Sparse LU, symmetric-mode first (no pivoting), pivoted as fallback."""
    A = sp.csc_matrix(A)
    probe = _start_vector(A.shape[0], 12345)
    bnorm = np.linalg.norm(A @ probe)
    attempts = (
        dict(permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0, options=dict(SymmetricMode=True)),
        dict(),
    )
    for kw in attempts:
        try:
            lu = spla.splu(A, **kw)
        except RuntimeError:
            continue
        d = np.abs(lu.U.diagonal())
        if not np.all(np.isfinite(d)) or d.min() <= 1e-14 * d.max():
            continue
        x = lu.solve(A @ probe)
        if np.linalg.norm(A @ x - A @ probe) <= 1e-8 * bnorm:
            return lu
    raise FactorizationError("shifted operator is numerically singular")


def _perturbed_shift(K, M, shift):
    kd = np.abs(sp.csr_matrix(K).diagonal()).max() if K.shape[0] else 1.0
    md = np.abs(sp.csr_matrix(M).diagonal()).max() if M.shape[0] else 1.0
    return shift - 1e-6 * max(kd, 1e-300) / max(md, 1e-300)


def _start_vector(n, seed):
    return np.random.default_rng(seed).standard_normal(n)


def _inf_norm(A):
    return float(abs(A).sum(axis=1).max()) if A.shape[0] else 0.0


def _finish(K, M, vals, vecs, opts, multipliers=None, extra=None):
    order = np.argsort(vals)[: opts.k]
    # residuals are relative to ||K x||; for (near-)kernel vectors ||K x||
    # is itself roundoff, so the scale never drops below 1e-6 ||K||
    floor = 1e-6 * _inf_norm(K)
    pairs = []
    for j in order:
        x = np.asarray(vecs[:, j], dtype=float)
        mn = float(np.sqrt(x @ (M @ x)))
        x = x / mn
        # fix the sign so results are reproducible
        i = int(np.argmax(np.abs(x)))
        if x[i] < 0:
            x = -x
        lam = float(vals[j])
        Kx = K @ x
        r = Kx - lam * (M @ x)
        q = None
        if extra is not None:
            q = extra(x, lam)
            r = r + q[1]
            q = q[0]
        res = float(np.linalg.norm(r) / max(np.linalg.norm(Kx), floor * np.linalg.norm(x), 1e-300))
        pairs.append(EigenPair(lam, x, res, 1.0, q))
    for p in pairs:
        if p.residual > opts.tol:
            raise ConvergenceError(
                f"eigenpair lam={p.lam:.10g} has residual {p.residual:.3e} > tol {opts.tol:.1e}"
            )
    return pairs


def smallest_eigenpairs(K, M, opts: SolveOptions | None = None) -> list[EigenPair]:
    """The ``opts.k`` smallest eigenpairs of ``K x = lam M x``, ascending, M-normalized."""
    opts = opts or SolveOptions()
    n = K.shape[0]
    if opts.k > n:
        raise ValueError(f"asked for {opts.k} eigenpairs of an order-{n} problem")
    dense = opts.method == "dense" or (opts.method == "auto" and n < DENSE_LIMIT) or opts.k >= n - 1
    if dense:
        Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        vals, vecs = la.eigh(Kd, Md, subset_by_index=[0, opts.k - 1])
        return _finish(Kd, Md, vals, vecs, opts)

    K = sp.csr_matrix(K)
    M = sp.csr_matrix(M)
    shift = opts.shift
    try:
        lu = _factorize(K - shift * M)
    except FactorizationError:
        shift = _perturbed_shift(K, M, opts.shift)
        log.info("factorization broke down at shift %g; retrying at %g", opts.shift, shift)
        lu = _factorize(K - shift * M)  # propagates on second failure
    op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
    v0 = _start_vector(n, opts.seed)
    try:
        vals, vecs = spla.eigsh(
            K, k=opts.k, M=M, sigma=shift, OPinv=op, which="LM", v0=v0,
            maxiter=opts.max_iter, tol=0,
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(str(exc)) from exc
    return _finish(K, M, vals, vecs, opts)


class SaddleSolver:
    """Solver for ``[[A - s M, B^T, 0], [B, 0, m], [0, m^T, 0]]``.

    The last row pins the ``m``-weighted mean of the multiplier to zero,
    so a single constant pressure mode is removed without pinning a dof.
    The indefinite system is factorized through a quasi-definite
    regularization (``-eps`` on the zero block) and solved to full
    accuracy by iterative refinement against the exact operator.
    """

    refine_tol = 1e-13
    max_refine = 12

    def __init__(self, A, M, B, mean, shift=0.0):
        A, M, B = sp.csr_matrix(A), sp.csr_matrix(M), sp.csr_matrix(B)
        self.nu, self.np = A.shape[0], B.shape[0]
        mcol = sp.csr_matrix(np.asarray(mean, dtype=float).reshape(-1, 1))
        As = A - shift * M
        blocks = [[As, B.T, None], [B, None, mcol], [None, mcol.T, None]]
        self.S = sp.bmat(blocks, format="csr")
        # regularize relative to the Jacobi estimate of the Schur complement
        # diag(B D^-1 B^T), so the refinement contracts whatever the scaling
        d = np.abs(As.diagonal())
        d[d == 0] = max(d.max(initial=0.0), 1.0)
        schur = np.asarray(B.multiply(B) @ (1.0 / d)).ravel()
        eps = 1e-10 * max(schur.max(initial=0.0), 1e-300)
        blocks[1][1] = -eps * sp.eye(self.np)
        blocks[2][2] = sp.csr_matrix([[-eps]])
        Q = sp.bmat(blocks, format="csc")
        try:
            self.lu = spla.splu(
                Q, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                options=dict(SymmetricMode=True),
            )
        except RuntimeError as exc:
            raise TopologyError(f"saddle factorization failed: {exc}") from exc
        # a second constant pressure mode (disconnected mesh) shows up as
        # stagnating refinement on a probe solve
        self._solve_full(_start_vector(self.nu + self.np + 1, 7), check=True)

    def _solve_full(self, rhs, check=False):
        x = self.lu.solve(rhs)
        bn = max(np.linalg.norm(rhs), 1e-300)
        for _ in range(self.max_refine):
            r = rhs - self.S @ x
            if np.linalg.norm(r) <= self.refine_tol * bn:
                return x
            x = x + self.lu.solve(r)
        r = np.linalg.norm(rhs - self.S @ x) / bn
        if r > 1e-9 or not np.all(np.isfinite(x)):
            err = TopologyError if check else FactorizationError
            raise err(
                "saddle system is singular or unstable (residual "
                f"{r:.2e}); the pressure null space may not be one-dimensional"
            )
        return x

    def solve(self, f, g=None):
        rhs = np.zeros(self.nu + self.np + 1)
        rhs[: self.nu] = f
        if g is not None:
            rhs[self.nu : self.nu + self.np] = g
        sol = self._solve_full(rhs)
        return sol[: self.nu], sol[self.nu : self.nu + self.np]


def constrained_smallest(A, M, B, opts: SolveOptions | None = None, mean=None) -> list[EigenPair]:
    """Smallest eigenpairs of ``A x = lam M x`` restricted to ``B x = 0``.

    Each pair carries the multiplier ``q`` with ``A x + B^T q = lam M x``,
    normalized to zero ``mean``-weighted average (plain average by default).
    """
    opts = opts or SolveOptions()
    A, M, B = sp.csr_matrix(A), sp.csr_matrix(M), sp.csr_matrix(B)
    n = A.shape[0]
    if B.shape[0] == 0 or B.nnz == 0:
        pairs = smallest_eigenpairs(A, M, opts)
        for p in pairs:
            p.multiplier = np.zeros(B.shape[0])
        return pairs
    mean = np.ones(B.shape[0]) if mean is None else np.asarray(mean, dtype=float)

    shift = opts.shift
    try:
        saddle = SaddleSolver(A, M, B, mean, shift)
    except TopologyError:
        shift = _perturbed_shift(A, M, opts.shift)
        saddle = SaddleSolver(A, M, B, mean, shift)
    at_zero = saddle if shift == 0.0 else None

    def multiplier(x, lam):
        nonlocal at_zero
        if at_zero is None:
            at_zero = SaddleSolver(A, M, B, mean, 0.0)
        # with B x = 0:  A x + B^T q = lam M x  is solved exactly by y = x
        _, q = at_zero.solve(lam * (M @ x))
        return q, B.T @ q

    dense = opts.method == "dense" or (opts.method == "auto" and n + B.shape[0] < DENSE_LIMIT)
    if dense:
        Z = la.null_space(B.toarray())
        if Z.shape[1] < opts.k:
            raise ValueError("constraint leaves fewer than k degrees of freedom")
        Ad = Z.T @ (A @ Z)
        Md = Z.T @ (M @ Z)
        vals, y = la.eigh(0.5 * (Ad + Ad.T), 0.5 * (Md + Md.T), subset_by_index=[0, opts.k - 1])
        return _finish(A, M, vals, Z @ y, opts, extra=multiplier)

    op = spla.LinearOperator((n, n), matvec=lambda b: saddle.solve(b)[0], dtype=float)
    v0 = op.matvec(M @ _start_vector(n, opts.seed))
    try:
        vals, vecs = spla.eigsh(
            A, k=opts.k, M=M, sigma=shift, OPinv=op, which="LM", v0=v0,
            maxiter=opts.max_iter, tol=0,
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(str(exc)) from exc
    # strip the small component outside ker B left by rounding
    for j in range(vecs.shape[1]):
        vecs[:, j] = saddle.solve(M @ vecs[:, j])[0] * (vals[j] - shift)
    return _finish(A, M, vals, vecs, opts, extra=multiplier)


def divergence_residual(B, x) -> float:
    return float(np.linalg.norm(B @ x) / max(np.linalg.norm(x), 1e-300))
