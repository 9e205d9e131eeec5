"""Problem-level eigensolvers and field post-processing.

* Dirichlet Laplacian: P2 elements.
* Clamped-plate buckling: Morley elements, ``H psi = lam G psi``.
* Stokes: Taylor-Hood (vector P2 / P1), solved on the discrete
  divergence-free subspace.

Solutions are memoized on ``(spec, level, k)``; callers must treat the
returned objects as read-only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import fem
from .eigensolve import (
    EigenPair,
    SaddleSolver,
    SolveOptions,
    TopologyError,
    constrained_smallest,
    divergence_residual,
    smallest_eigenpairs,
)
from .fem import Field, dofmap
from .geometry import DomainSpec, Mesh, build_mesh, normalize_area, refine

PROBLEMS = ("dirichlet", "buckling", "stokes")


@dataclass(eq=False)
class SpectrumResult:
    problem: str
    domain: DomainSpec
    level: int
    mesh: Mesh
    eigenpairs: list[EigenPair]
    fields: list[dict] = field(default_factory=list)
    history: dict = field(default_factory=dict)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.lam for p in self.eigenpairs])


@lru_cache(maxsize=16)
def mesh_for(spec: DomainSpec, level: int) -> Mesh:
    """Shared mesh per (spec, level); built by refining the cached coarser one."""
    spec = normalize_area(spec)
    if level == 0:
        return build_mesh(spec, 0)
    return refine(mesh_for(spec, level - 1))


def _cache(mesh, key, make):
    return fem._cached(mesh, key, make)


def _p2_system(mesh):
    return _cache(mesh, "KM_P2", lambda: (fem.assemble_stiffness(mesh, "P2"), fem.assemble_mass(mesh, "P2")))


def _p2_interior_lu(mesh):
    K, _ = _p2_system(mesh)
    free = dofmap(mesh, "P2").free_dofs
    return _cache(mesh, "lu_K_P2", lambda: fem._cached_lu(mesh, "_lu_K_P2", K[free][:, free]))


def _stokes_system(mesh):
    def make():
        A = fem.assemble_stiffness(mesh, "VecP2")
        M = fem.assemble_mass(mesh, "VecP2")
        B = fem.assemble_divergence(mesh)
        free = dofmap(mesh, "VecP2").free_dofs
        return A[free][:, free], M[free][:, free], B[:, free], free

    return _cache(mesh, "stokes_system", make)


def _saddle(mesh):
    def make():
        A, M, B, _ = _stokes_system(mesh)
        return SaddleSolver(A, M, B, fem.pressure_mean_vector(mesh))

    return _cache(mesh, "saddle0", make)


# ----------------------------------------------------------------------
# drivers


def dirichlet_eigs(spec: DomainSpec, level: int, k: int = 1, seed: int = 0) -> SpectrumResult:
    return _dirichlet(normalize_area(spec), level, k, seed)


@lru_cache(maxsize=32)
def _dirichlet(spec, level, k, seed):
    mesh = mesh_for(spec, level)
    K, M = _p2_system(mesh)
    dm = dofmap(mesh, "P2")
    red = fem.apply_dirichlet((K, M), dm)
    pairs = smallest_eigenpairs(*red.matrices, SolveOptions(k=k, seed=seed))
    fields = [{"u": Field(dm, red.expand(p.vector))} for p in pairs]
    return SpectrumResult("dirichlet", spec, level, mesh, pairs, fields, _history(red.free, pairs))


def buckling_eig(spec: DomainSpec, level: int, k: int = 1, seed: int = 0) -> SpectrumResult:
    return _buckling(normalize_area(spec), level, k, seed)


@lru_cache(maxsize=32)
def _buckling(spec, level, k, seed):
    mesh = mesh_for(spec, level)
    H, G = _cache(mesh, "HG", lambda: fem.assemble_morley(mesh))
    dm = dofmap(mesh, "Morley")
    red = fem.apply_dirichlet((H, G), dm)
    pairs = smallest_eigenpairs(*red.matrices, SolveOptions(k=k, seed=seed))
    fields = [buckling_fields(Field(dm, red.expand(p.vector)), p.lam) for p in pairs]
    return SpectrumResult("buckling", spec, level, mesh, pairs, fields, _history(red.free, pairs))


def stokes_eig(spec: DomainSpec, level: int, k: int = 1, seed: int = 0) -> SpectrumResult:
    return _stokes(normalize_area(spec), level, k, seed)


@lru_cache(maxsize=32)
def _stokes(spec, level, k, seed):
    mesh = mesh_for(spec, level)
    A, M, B, free = _stokes_system(mesh)
    pairs = constrained_smallest(
        A, M, B, SolveOptions(k=k, seed=seed), mean=fem.pressure_mean_vector(mesh)
    )
    dv = dofmap(mesh, "VecP2")
    dp = dofmap(mesh, "P1pressure")
    fields = []
    for p in pairs:
        u = np.zeros(dv.total_dofs)
        u[free] = p.vector
        # the solver multiplier q satisfies A u + B^T q = lam M u, so p = -q
        fields.append({"u": Field(dv, u), "p": Field(dp, -p.multiplier)})
    hist = _history(free, pairs)
    hist["divergence_residuals"] = [divergence_residual(B, p.vector) for p in pairs]
    return SpectrumResult("stokes", spec, level, mesh, pairs, fields, hist)


def solve(problem: str, spec: DomainSpec, level: int, k: int = 1, seed: int = 0) -> SpectrumResult:
    drivers = {"dirichlet": dirichlet_eigs, "buckling": buckling_eig, "stokes": stokes_eig}
    if problem not in drivers:
        raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")
    return drivers[problem](spec, level, k, seed)


def _history(free, pairs):
    return {"ndofs": int(len(free)), "residuals": [p.residual for p in pairs]}


def clear_caches():
    for f in (mesh_for, _dirichlet, _buckling, _stokes):
        f.cache_clear()


# ----------------------------------------------------------------------
# buckling post-processing


def buckling_fields(psi: Field, lam: float) -> dict:
    """Derived fields of a Morley buckling eigenfunction.

    ``w`` is the elementwise Laplacian projected onto P1, ``psi`` the
    continuous P2 version with zero boundary values, ``h = w + lam psi``.
    """
    mesh = psi.mesh
    hess = fem.morley_cell_hessians(psi)
    lap = hess[:, 0] + hess[:, 2]
    w = fem.l2_project_p1(mesh, fem.p1_loads_piecewise_constant(mesh, lap))
    psi2 = fem.to_p2(psi)
    vals = psi2.values.copy()
    vals[dofmap(mesh, "P2").constrained_dofs] = 0.0
    psi2 = Field(psi2.dofmap, vals)
    h = Field(psi2.dofmap, fem.to_p2(w).values + lam * psi2.values)
    return {"psi_morley": psi, "psi": psi2, "w": w, "h": h, "w_cells": lap, "hessian_cells": hess}


# ----------------------------------------------------------------------
# Stokes post-processing


def _curl_cells(u: Field, degree=2):
    ux, uy = u.components()
    _, gx, w = ux.at_quadrature(degree)
    _, gy, _ = uy.at_quadrature(degree)
    return gy[..., 0] - gx[..., 1], w


def vorticity(u: Field, mesh: Mesh | None = None) -> Field:
    """L2 projection onto P1 of ``d/dx u_y - d/dy u_x``."""
    mesh = u.mesh if mesh is None else mesh
    curl, w = _curl_cells(u)
    L, _ = fem.triangle_rule(2)
    loads = np.einsum("tq,q,qi,t->ti", curl, w, L, mesh.areas)
    b = np.zeros(mesh.nv)
    np.add.at(b, mesh.triangles.ravel(), loads.ravel())
    return fem.l2_project_p1(mesh, b)


def _p2_loads(mesh: Mesh, values_at_q: np.ndarray, degree: int) -> np.ndarray:
    L, w = fem.triangle_rule(degree)
    phi = fem.p2_values(L)
    loads = np.einsum("tq,q,qi,t->ti", values_at_q, w, phi, mesh.areas)
    dm = dofmap(mesh, "P2")
    b = np.zeros(dm.total_dofs)
    np.add.at(b, dm.cell_dofs.ravel(), loads.ravel())
    return b


def _dirichlet_solve(mesh: Mesh, loads: np.ndarray, boundary_values=None) -> Field:
    """P2 solve of ``-Laplace(v) = f`` (weak loads given) with Dirichlet data."""
    K, _ = _p2_system(mesh)
    dm = dofmap(mesh, "P2")
    free, fixed = dm.free_dofs, dm.constrained_dofs
    v = np.zeros(dm.total_dofs)
    rhs = loads[free].copy()
    if boundary_values is not None:
        v[fixed] = boundary_values
        rhs -= K[free][:, fixed] @ v[fixed]
    v[free] = _p2_interior_lu(mesh).solve(rhs)
    return Field(dm, v)


def stream_function(u: Field, spec: DomainSpec | None = None, mesh: Mesh | None = None) -> Field:
    """P2 ``psi`` with ``Laplace(psi) = curl(u)``, ``psi = 0`` on the boundary.

    For no-slip, divergence-free ``u`` this recovers ``u = (-psi_y, psi_x)``.
    """
    mesh = u.mesh if mesh is None else mesh
    spec = mesh.spec if spec is None else spec
    if spec is not None and not spec.simply_connected:
        raise TopologyError("stream function needs a simply connected domain")
    if mesh.n_components() != 1:
        raise TopologyError("stream function needs a single boundary loop")
    curl, _ = _curl_cells(u, degree=4)
    return _dirichlet_solve(mesh, -_p2_loads(mesh, curl, 4))


def perp_gradient_error(psi: Field, u: Field) -> float:
    """Relative L2 distance between ``(-psi_y, psi_x)`` and ``u``."""
    _, g, w = psi.at_quadrature(4)
    ux, uy = u.components()
    vx, _, _ = ux.at_quadrature(4)
    vy, _, _ = uy.at_quadrature(4)
    A = psi.mesh.areas
    diff = (-g[..., 1] - vx) ** 2 + (g[..., 0] - vy) ** 2
    ref = vx**2 + vy**2
    return float(np.sqrt(np.einsum("tq,q,t->", diff, w, A) / np.einsum("tq,q,t->", ref, w, A)))


def recover_pressure(u: Field, lam: float, mesh: Mesh | None = None) -> Field:
    """Zero-mean pressure with ``Laplace(u) + lam u = grad(p)`` weakly.

    Solves the saddle system with right-hand side ``lam M u``; for an
    eigenpair its velocity block returns ``u`` and its multiplier ``-p``.
    """
    mesh = u.mesh if mesh is None else mesh
    _, M, _, free = _stokes_system(mesh)
    _, q = _saddle(mesh).solve(lam * (M @ u.values[free]))
    return Field(dofmap(mesh, "P1pressure"), -q)


def stokes_residual(u: Field, p: Field, lam: float) -> float:
    """Relative residual of ``A u - lam M u - B^T p`` on interior velocity dofs."""
    A, M, B, free = _stokes_system(u.mesh)
    x = u.values[free]
    r = A @ x - lam * (M @ x) - B.T @ p.values
    return float(np.linalg.norm(r) / np.linalg.norm(A @ x))


def leray_project(mesh: Mesh, loads: np.ndarray) -> np.ndarray:
    """Discrete Leray projection of a velocity load vector.

    Returns the interior coefficients ``y`` of the L2-closest discretely
    divergence-free, no-slip VecP2 field: ``M y + B^T q = f``, ``B y = 0``.
    """
    def make():
        A, M, B, _ = _stokes_system(mesh)
        return SaddleSolver(M, M, B, fem.pressure_mean_vector(mesh))

    y, _ = _cache(mesh, "leray", make).solve(loads)
    return y


def convective_term(u: Field, degree: int = 6):
    """``(u . grad) u`` at quadrature points: two arrays (nt, nq)."""
    ux, uy = u.components()
    vx, gx, w = ux.at_quadrature(degree)
    vy, gy, _ = uy.at_quadrature(degree)
    cx = vx * gx[..., 0] + vy * gx[..., 1]
    cy = vx * gy[..., 0] + vy * gy[..., 1]
    return cx, cy, w


# ----------------------------------------------------------------------
# scalar solves


def harmonic_extension(mesh: Mesh, boundary_data) -> Field:
    """P2 harmonic function with the given boundary values.

    ``boundary_data`` is a callable ``f(x, y)``, a scalar :class:`Field`
    (its trace is used) or an array over the constrained P2 dofs.
    """
    dm = dofmap(mesh, "P2")
    fixed = dm.constrained_dofs
    if callable(boundary_data):
        e = mesh.edges
        nodes = np.vstack([mesh.vertices, 0.5 * (mesh.vertices[e[:, 0]] + mesh.vertices[e[:, 1]])])
        g = boundary_data(nodes[fixed, 0], nodes[fixed, 1])
    elif isinstance(boundary_data, Field):
        g = fem.to_p2(boundary_data).values[fixed]
    else:
        g = np.asarray(boundary_data, dtype=float)
    g = np.broadcast_to(g, fixed.shape).astype(float)
    return _dirichlet_solve(mesh, np.zeros(dm.total_dofs), g)


def solve_poisson(mesh: Mesh, rhs) -> Field:
    """P2 solution of ``Laplace(psi) = rhs`` with ``psi = 0`` on the boundary."""
    if callable(rhs):
        L, _ = fem.triangle_rule(4)
        pts = fem.physical_points(mesh.vertices, mesh.triangles, L)
        f = np.broadcast_to(rhs(pts[..., 0], pts[..., 1]), pts.shape[:2])
    else:
        f, _, _ = (fem.to_p2(rhs) if rhs.space != "P2" else rhs).at_quadrature(4)
    return _dirichlet_solve(mesh, -_p2_loads(mesh, f, 4))


def laplacian_residual(psi: Field, rhs) -> float:
    """Weak residual of ``Laplace(psi) = rhs`` on interior P2 tests, relative to the load."""
    mesh = psi.mesh
    K, _ = _p2_system(mesh)
    if callable(rhs):
        L, _ = fem.triangle_rule(4)
        pts = fem.physical_points(mesh.vertices, mesh.triangles, L)
        f = np.broadcast_to(rhs(pts[..., 0], pts[..., 1]), pts.shape[:2])
    else:
        f, _, _ = fem.to_p2(rhs).at_quadrature(4)
    b = _p2_loads(mesh, f, 4)
    free = dofmap(mesh, "P2").free_dofs
    r = (K @ psi.values + b)[free]
    return float(np.linalg.norm(r) / max(np.linalg.norm(b[free]), np.linalg.norm((K @ psi.values)[free]), 1e-300))


def p1_dual_residual(mesh: Mesh, r: np.ndarray) -> float:
    """Discrete H^-1 norm of a residual on interior P1 tests."""
    K = _cache(mesh, "K_P1", lambda: fem.assemble_stiffness(mesh, "P1"))
    free = dofmap(mesh, "P1").free_dofs
    lu = fem._cached_lu(mesh, "lu_K_P1", K[free][:, free])
    rf = r[free]
    return float(np.sqrt(max(rf @ lu.solve(rf), 0.0)))


def helmholtz_residual(w: Field, lam: float) -> float:
    """Weak residual of ``Laplace(w) + lam w = 0`` (interior tests), relative to |w|_H1."""
    mesh = w.mesh
    K = _cache(mesh, "K_P1", lambda: fem.assemble_stiffness(mesh, "P1"))
    M = _cache(mesh, "M_P1", lambda: fem.assemble_mass(mesh, "P1").tocsc())
    r = -(K @ w.values) + lam * (M @ w.values)
    return p1_dual_residual(mesh, r) / w.h1_seminorm()


def pressure_harmonicity(p: Field, scale: float) -> float:
    """Weak residual of ``Laplace(p) = 0`` (interior tests) divided by ``scale``."""
    mesh = p.mesh
    K = _cache(mesh, "K_P1", lambda: fem.assemble_stiffness(mesh, "P1"))
    return p1_dual_residual(mesh, K @ p.values) / scale
