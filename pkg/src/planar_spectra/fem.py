"""Finite element spaces, assembly and field utilities on triangle meshes.

Spaces
------
P1, P1pressure : vertex values
P2             : vertex values, then one value per edge midpoint
VecP2          : two stacked P2 blocks (x component, then y component)
Morley         : vertex values, then one normal derivative per edge
                 midpoint; the edge normal is the global one returned by
                 :func:`edge_normals`
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import Mesh
from .quadrature import physical_points, triangle_rule

SPACES = ("P1", "P2", "VecP2", "Morley", "P1pressure")


class EmptyInteriorError(ValueError):
    """All degrees of freedom are constrained."""


@dataclass(eq=False)
class DofMap:
    space: str
    mesh: Mesh
    total_dofs: int
    cell_dofs: np.ndarray
    vertex_offset: int
    edge_offset: int | None
    constrained_dofs: np.ndarray

    @property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.total_dofs, dtype=bool)
        mask[self.constrained_dofs] = False
        return np.flatnonzero(mask)


def dofmap(mesh: Mesh, space: str) -> DofMap:
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}")
    key = ("dofmap", space)
    if key in mesh._cache:
        return mesh._cache[key]
    nv, ne = mesh.nv, mesh.ne
    bverts = mesh.boundary_vertices
    bedges = mesh.boundary_edge_ids
    if space in ("P1", "P1pressure"):
        dm = DofMap(
            space, mesh, nv, mesh.triangles.copy(), 0, None,
            bverts if space == "P1" else np.zeros(0, dtype=np.int64),
        )
    else:
        cells = np.hstack([mesh.triangles, nv + mesh.tri_edges])
        constrained = np.concatenate([bverts, nv + bedges])
        n = nv + ne
        if space == "VecP2":
            cells = np.hstack([cells, cells + n])
            constrained = np.concatenate([constrained, constrained + n])
            n *= 2
        dm = DofMap(space, mesh, n, cells, 0, nv, np.sort(constrained))
    mesh._cache[key] = dm
    return dm


# ----------------------------------------------------------------------
# element geometry and local bases


def barycentric_gradients(mesh: Mesh) -> np.ndarray:
    """Gradients of the barycentric coordinates, shape (nt, 3, 2)."""
    if "gradL" not in mesh._cache:
        p = mesh.vertices[mesh.triangles]
        area2 = 2.0 * mesh.areas
        g = np.empty((mesh.nt, 3, 2))
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            g[:, i, 0] = (p[:, j, 1] - p[:, k, 1]) / area2
            g[:, i, 1] = (p[:, k, 0] - p[:, j, 0]) / area2
        mesh._cache["gradL"] = g
    return mesh._cache["gradL"]


def p2_values(L: np.ndarray) -> np.ndarray:
    """P2 basis at barycentric points L (nq, 3) -> (nq, 6)."""
    out = np.empty((len(L), 6))
    for i in range(3):
        out[:, i] = L[:, i] * (2 * L[:, i] - 1)
        out[:, 3 + i] = 4 * L[:, (i + 1) % 3] * L[:, (i + 2) % 3]
    return out


def p2_gradients(L: np.ndarray, gradL: np.ndarray) -> np.ndarray:
    """P2 basis gradients -> (nt, nq, 6, 2)."""
    nq = len(L)
    out = np.empty((gradL.shape[0], nq, 6, 2))
    for i in range(3):
        a, b = (i + 1) % 3, (i + 2) % 3
        out[:, :, i] = (4 * L[:, i] - 1)[None, :, None] * gradL[:, None, i]
        out[:, :, 3 + i] = 4 * (
            L[:, b][None, :, None] * gradL[:, None, a] + L[:, a][None, :, None] * gradL[:, None, b]
        )
    return out


def edge_normals(mesh: Mesh) -> np.ndarray:
    """Unit normal of each edge: the tangent (low -> high index) turned clockwise."""
    if "edge_normals" not in mesh._cache:
        e = mesh.edges
        t = mesh.vertices[e[:, 1]] - mesh.vertices[e[:, 0]]
        t /= np.linalg.norm(t, axis=1)[:, None]
        mesh._cache["edge_normals"] = np.column_stack([t[:, 1], -t[:, 0]])
    return mesh._cache["edge_normals"]


@dataclass(eq=False)
class MorleyBasis:
    """Per-element Morley shape functions in scaled monomials.

    Local monomials are ``1, X, Y, X^2, XY, Y^2`` with ``X = (x - xc)/h``;
    ``coeffs[t, :, i]`` are the monomial coefficients of local basis i.
    """

    center: np.ndarray
    h: np.ndarray
    coeffs: np.ndarray
    hessians: np.ndarray = field(repr=False)  # (nt, 6, 3): xx, xy, yy


def _monomials(X, Y):
    return np.stack([np.ones_like(X), X, Y, X * X, X * Y, Y * Y], axis=-1)


def _monomial_grads(X, Y):
    z, o = np.zeros_like(X), np.ones_like(X)
    gx = np.stack([z, o, z, 2 * X, Y, z], axis=-1)
    gy = np.stack([z, z, o, z, X, 2 * Y], axis=-1)
    return gx, gy


def morley_basis(mesh: Mesh) -> MorleyBasis:
    if "morley" in mesh._cache:
        return mesh._cache["morley"]
    p = mesh.vertices[mesh.triangles]
    center = p.mean(axis=1)
    h = np.sqrt(2.0 * mesh.areas)
    nrm = edge_normals(mesh)[mesh.tri_edges]  # (nt, 3, 2)
    D = np.zeros((mesh.nt, 6, 6))
    V = (p - center[:, None]) / h[:, None, None]
    D[:, :3] = _monomials(V[..., 0], V[..., 1])
    for k in range(3):
        mid = 0.5 * (V[:, (k + 1) % 3] + V[:, (k + 2) % 3])
        gx, gy = _monomial_grads(mid[:, 0], mid[:, 1])
        D[:, 3 + k] = (gx * nrm[:, k, 0, None] + gy * nrm[:, k, 1, None]) / h[:, None]
    C = np.linalg.inv(D)
    hess = np.stack([2 * C[:, 3], C[:, 4], 2 * C[:, 5]], axis=-1) / (h**2)[:, None, None]
    basis = MorleyBasis(center, h, C, hess)
    mesh._cache["morley"] = basis
    return basis


def morley_local_eval(mesh: Mesh, L: np.ndarray):
    """Morley basis values and gradients at barycentric points.

    Returns ``(values (nt, nq, 6), grads (nt, nq, 6, 2))``.
    """
    mb = morley_basis(mesh)
    pts = physical_points(mesh.vertices, mesh.triangles, L)
    X = (pts[..., 0] - mb.center[:, None, 0]) / mb.h[:, None]
    Y = (pts[..., 1] - mb.center[:, None, 1]) / mb.h[:, None]
    mono = _monomials(X, Y)  # (nt, nq, 6)
    gx, gy = _monomial_grads(X, Y)
    vals = np.einsum("tqm,tmi->tqi", mono, mb.coeffs)
    grads = np.stack(
        [np.einsum("tqm,tmi->tqi", gx, mb.coeffs), np.einsum("tqm,tmi->tqi", gy, mb.coeffs)],
        axis=-1,
    ) / mb.h[:, None, None, None]
    return vals, grads


# ----------------------------------------------------------------------
# assembly


def _scatter(local: np.ndarray, rows: np.ndarray, cols: np.ndarray, shape) -> sp.csr_matrix:
    r = np.broadcast_to(rows[:, :, None], local.shape).ravel()
    c = np.broadcast_to(cols[:, None, :], local.shape).ravel()
    A = sp.coo_matrix((local.ravel(), (r, c)), shape=shape).tocsr()
    A.sum_duplicates()
    return A


def _scalar_space(space):
    if space in ("P1", "P1pressure"):
        return "P1"
    if space in ("P2", "VecP2"):
        return "P2"
    raise ValueError(f"space {space!r} not supported here")


def _local_basis(mesh: Mesh, kind: str, degree: int):
    """(weights, values (nq, nb), grads (nt, nq, nb, 2)) for P1 or P2."""
    L, w = triangle_rule(degree)
    gradL = barycentric_gradients(mesh)
    if kind == "P1":
        vals = L.copy()
        grads = np.broadcast_to(gradL[:, None], (mesh.nt, len(L), 3, 2))
    else:
        vals = p2_values(L)
        grads = p2_gradients(L, gradL)
    return w, vals, grads


def assemble_stiffness(mesh: Mesh, space: str = "P1") -> sp.csr_matrix:
    """Matrix of integrals of grad(phi_i) . grad(phi_j)."""
    kind = _scalar_space(space)
    degree = 2 if kind == "P2" else 1
    w, _, grads = _local_basis(mesh, kind, degree)
    local = np.einsum("q,tqid,tqjd->tij", w, grads, grads) * mesh.areas[:, None, None]
    dm = dofmap(mesh, "P2" if kind == "P2" else "P1")
    K = _scatter(local, dm.cell_dofs, dm.cell_dofs, (dm.total_dofs, dm.total_dofs))
    if space == "VecP2":
        K = sp.block_diag((K, K), format="csr")
    return K


def assemble_mass(mesh: Mesh, space: str = "P1") -> sp.csr_matrix:
    """Matrix of integrals of phi_i * phi_j."""
    if space == "Morley":
        w, vals, _ = _morley_quad(mesh, 4)
        local = np.einsum("q,tqi,tqj->tij", w, vals, vals) * mesh.areas[:, None, None]
        dm = dofmap(mesh, "Morley")
        return _scatter(local, dm.cell_dofs, dm.cell_dofs, (dm.total_dofs,) * 2)
    kind = _scalar_space(space)
    w, vals, _ = _local_basis(mesh, kind, 4)
    ref = np.einsum("q,qi,qj->ij", w, vals, vals)
    local = ref[None] * mesh.areas[:, None, None]
    dm = dofmap(mesh, "P2" if kind == "P2" else "P1")
    M = _scatter(local, dm.cell_dofs, dm.cell_dofs, (dm.total_dofs, dm.total_dofs))
    if space == "VecP2":
        M = sp.block_diag((M, M), format="csr")
    return M


def _morley_quad(mesh, degree):
    L, w = triangle_rule(degree)
    vals, grads = morley_local_eval(mesh, L)
    return w, vals, grads


def assemble_morley(mesh: Mesh):
    """Broken Hessian and gradient forms on the Morley space.

    Returns ``(H, G)`` with ``H_ij = sum_T int_T D2 phi_i : D2 phi_j`` and
    ``G_ij = sum_T int_T grad phi_i . grad phi_j``.
    """
    mb = morley_basis(mesh)
    hs = mb.hessians
    wts = np.array([1.0, 2.0, 1.0])
    Hloc = np.einsum("tic,tjc,c->tij", hs, hs, wts) * mesh.areas[:, None, None]
    w, _, grads = _morley_quad(mesh, 2)
    Gloc = np.einsum("q,tqid,tqjd->tij", w, grads, grads) * mesh.areas[:, None, None]
    dm = dofmap(mesh, "Morley")
    shape = (dm.total_dofs, dm.total_dofs)
    return _scatter(Hloc, dm.cell_dofs, dm.cell_dofs, shape), _scatter(Gloc, dm.cell_dofs, dm.cell_dofs, shape)


def assemble_divergence(mesh: Mesh) -> sp.csr_matrix:
    """Coupling ``B_ij = int q_i div(u_j)`` from VecP2 into P1 pressures."""
    w, _, grads = _local_basis(mesh, "P2", 2)
    L, _ = triangle_rule(2)
    q = L  # P1 values at the quadrature points
    bx = np.einsum("q,qi,tqj->tij", w, q, grads[..., 0]) * mesh.areas[:, None, None]
    by = np.einsum("q,qi,tqj->tij", w, q, grads[..., 1]) * mesh.areas[:, None, None]
    dv = dofmap(mesh, "VecP2")
    n2 = dv.total_dofs // 2
    local = np.concatenate([bx, by], axis=2)
    return _scatter(local, mesh.triangles, dv.cell_dofs, (mesh.nv, 2 * n2))


def pressure_mean_vector(mesh: Mesh) -> np.ndarray:
    """Integrals of the P1 basis functions."""
    m = np.zeros(mesh.nv)
    np.add.at(m, mesh.triangles.ravel(), np.repeat(mesh.areas / 3.0, 3))
    return m


@dataclass(eq=False)
class ReducedSystem:
    matrices: tuple
    free: np.ndarray
    total: int

    def expand(self, x: np.ndarray, fill: float = 0.0) -> np.ndarray:
        """Lift reduced vectors (n_free,) or (n_free, k) to full length."""
        shape = (self.total,) + x.shape[1:]
        out = np.full(shape, fill, dtype=x.dtype)
        out[self.free] = x
        return out


def apply_dirichlet(matrices, dm: DofMap) -> ReducedSystem:
    """Eliminate constrained rows and columns symmetrically."""
    if sp.issparse(matrices) or isinstance(matrices, np.ndarray):
        matrices = (matrices,)
    free = dm.free_dofs
    if len(free) == 0:
        raise EmptyInteriorError("empty interior: every degree of freedom is constrained")
    reduced = tuple(sp.csr_matrix(A)[free][:, free] for A in matrices)
    return ReducedSystem(reduced, free, dm.total_dofs)


def matrix_to_coordinate_text(A) -> str:
    """Debug export: one ``i j value`` line per stored nonzero."""
    C = sp.coo_matrix(A)
    order = np.lexsort((C.col, C.row))
    return "".join(f"{C.row[i]} {C.col[i]} {float(C.data[i])!r}\n" for i in order)


# ----------------------------------------------------------------------
# fields


@dataclass(eq=False)
class Field:
    """Coefficient vector over a dof map (scalar or VecP2)."""

    dofmap: DofMap
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.dofmap.total_dofs,):
            raise ValueError(
                f"{self.dofmap.space} field needs {self.dofmap.total_dofs} values, got {self.values.shape}"
            )

    @property
    def mesh(self) -> Mesh:
        return self.dofmap.mesh

    @property
    def space(self) -> str:
        return self.dofmap.space

    def components(self):
        if self.space != "VecP2":
            return [self]
        n = self.dofmap.total_dofs // 2
        dm = dofmap(self.mesh, "P2")
        return [Field(dm, self.values[:n]), Field(dm, self.values[n:])]

    def at_quadrature(self, degree: int):
        """Values (nt, nq) and gradients (nt, nq, 2) at the quadrature points."""
        if self.space == "VecP2":
            raise ValueError("evaluate vector fields component-wise")
        L, w = triangle_rule(degree)
        mesh = self.mesh
        loc = self.values[self.dofmap.cell_dofs]
        if self.space == "Morley":
            vals, grads = morley_local_eval(mesh, L)
            return np.einsum("tqi,ti->tq", vals, loc), np.einsum("tqid,ti->tqd", grads, loc), w
        kind = _scalar_space(self.space)
        _, vals, grads = _local_basis(mesh, kind, degree)
        return np.einsum("qi,ti->tq", vals, loc), np.einsum("tqid,ti->tqd", grads, loc), w

    def integrate(self, fn, degree: int = 4) -> float:
        """Integral of ``fn(values, grads, points)`` over the mesh."""
        v, g, w = self.at_quadrature(degree)
        L, _ = triangle_rule(degree)
        pts = physical_points(self.mesh.vertices, self.mesh.triangles, L)
        return float(np.einsum("tq,q,t->", fn(v, g, pts), w, self.mesh.areas))

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(c.integrate(lambda v, g, x: v * v) for c in self.components())))

    def h1_seminorm(self) -> float:
        return float(
            np.sqrt(sum(c.integrate(lambda v, g, x: (g * g).sum(-1)) for c in self.components()))
        )

    def mean(self) -> float:
        return self.integrate(lambda v, g, x: v) / self.mesh.area()


def interpolate(mesh: Mesh, space: str, fn, grad=None) -> Field:
    """Nodal interpolant of ``fn(x, y)``.

    Morley needs ``grad(x, y) -> (gx, gy)`` for the edge normal derivatives.
    For VecP2, ``fn`` returns a pair of components.
    """
    dm = dofmap(mesh, space)
    V = mesh.vertices
    if space in ("P1", "P1pressure"):
        return Field(dm, fn(V[:, 0], V[:, 1]))
    e = mesh.edges
    mid = 0.5 * (V[e[:, 0]] + V[e[:, 1]])
    nodes = np.vstack([V, mid])
    if space == "P2":
        return Field(dm, fn(nodes[:, 0], nodes[:, 1]))
    if space == "VecP2":
        ux, uy = fn(nodes[:, 0], nodes[:, 1])
        return Field(dm, np.concatenate([np.broadcast_to(ux, len(nodes)), np.broadcast_to(uy, len(nodes))]))
    if grad is None:
        raise ValueError("Morley interpolation needs the gradient")
    gx, gy = grad(mid[:, 0], mid[:, 1])
    n = edge_normals(mesh)
    return Field(dm, np.concatenate([fn(V[:, 0], V[:, 1]), gx * n[:, 0] + gy * n[:, 1]]))


def l2_project_p1(mesh: Mesh, loads: np.ndarray) -> Field:
    """Solve the P1 mass system for a load vector ``int f phi_i``."""
    M = _cached(mesh, "M_P1", lambda: assemble_mass(mesh, "P1").tocsc())
    return Field(dofmap(mesh, "P1"), _cached_lu(mesh, "lu_M_P1", M).solve(loads))


def p1_loads_piecewise_constant(mesh: Mesh, cell_values: np.ndarray) -> np.ndarray:
    """Load vector of an elementwise-constant function against the P1 basis."""
    b = np.zeros(mesh.nv)
    np.add.at(b, mesh.triangles.ravel(), np.repeat(cell_values * mesh.areas / 3.0, 3))
    return b


def _cached(mesh, key, make):
    if key not in mesh._cache:
        mesh._cache[key] = make()
    return mesh._cache[key]


def _cached_lu(mesh, key, A):
    return _cached(mesh, key, lambda: spla.splu(sp.csc_matrix(A)))


def to_p2(f: Field) -> Field:
    """Continuous P2 representative of a P1 or Morley field.

    P1 is embedded exactly. Morley keeps the (continuous) vertex values
    and averages the elementwise values at each edge midpoint, i.e. the
    least-squares fit of one nodal value to the element samples.
    """
    mesh = f.mesh
    dm2 = dofmap(mesh, "P2")
    if f.space == "P2":
        return f
    e = mesh.edges
    if f.space in ("P1", "P1pressure"):
        v = f.values
        return Field(dm2, np.concatenate([v, 0.5 * (v[e[:, 0]] + v[e[:, 1]])]))
    if f.space != "Morley":
        raise ValueError(f"cannot convert {f.space} to P2")
    L = np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])
    vals, _ = morley_local_eval(mesh, L)  # (nt, 3 midpoints, 6)
    mid_vals = np.einsum("tqi,ti->tq", vals, f.values[f.dofmap.cell_dofs])
    acc = np.zeros(mesh.ne)
    cnt = np.zeros(mesh.ne)
    np.add.at(acc, mesh.tri_edges.ravel(), mid_vals.ravel())
    np.add.at(cnt, mesh.tri_edges.ravel(), 1.0)
    return Field(dm2, np.concatenate([f.values[: mesh.nv], acc / cnt]))


def morley_cell_hessians(f: Field) -> np.ndarray:
    """Elementwise constant Hessian (xx, xy, yy) of a Morley field, (nt, 3)."""
    mb = morley_basis(f.mesh)
    return np.einsum("tic,ti->tc", mb.hessians, f.values[f.dofmap.cell_dofs])


# ----------------------------------------------------------------------
# boundary traces


@dataclass
class BoundaryTrace:
    """Samples at boundary vertices and edge midpoints, loop by loop.

    Arrays have one entry per sample; sample ``2i`` is the start vertex of
    boundary edge ``i`` and sample ``2i + 1`` its midpoint.
    """

    component: np.ndarray
    s: np.ndarray
    points: np.ndarray
    values: np.ndarray
    edge_lengths: np.ndarray = field(repr=False)
    edge_component: np.ndarray = field(repr=False)

    def edge_samples(self):
        """(start, mid, end) values for every boundary edge."""
        v = self.values
        out = []
        offset = 0
        for c in np.unique(self.edge_component):
            n = int(np.sum(self.edge_component == c))
            seg = v[offset : offset + 2 * n]
            start, mid = seg[0::2], seg[1::2]
            out.append(np.column_stack([start, mid, np.roll(start, -1)]))
            offset += 2 * n
        return np.vstack(out)

    def integrate(self, g=lambda v: v, per_component=False):
        """Simpson's rule along the boundary (exact for quadratic traces)."""
        e = g(self.edge_samples())
        vals = self.edge_lengths * (e[:, 0] + 4 * e[:, 1] + e[:, 2]) / 6.0
        if per_component:
            return {int(c): float(vals[self.edge_component == c].sum()) for c in np.unique(self.edge_component)}
        return float(vals.sum())

    def length(self) -> float:
        return float(self.edge_lengths.sum())


def _trace_nodes(mesh: Mesh):
    from .geometry import boundary_loops

    loops = boundary_loops(mesh)
    lookup = {}
    for i, eid in enumerate(mesh.boundary_edge_ids):
        a, b, _ = mesh.boundary_edges[i]
        lookup[(int(a), int(b))] = eid
    comp, verts, mids = [], [], []
    for c, loop in enumerate(loops):
        comp_id = int(mesh.boundary_edges[mesh.boundary_edges[:, 0] == loop[0], 2][0])
        for i, a in enumerate(loop):
            b = loop[(i + 1) % len(loop)]
            verts.append(a)
            mids.append(lookup[(int(a), int(b))])
            comp.append(comp_id)
    return np.array(comp), np.array(verts), np.array(mids)


def boundary_trace(f: Field, mesh: Mesh | None = None) -> BoundaryTrace:
    """Trace of a scalar field along every boundary component.

    Morley fields are first reduced to P1 through their vertex values.
    """
    mesh = f.mesh if mesh is None else mesh
    comp, verts, mids = _trace_nodes(mesh)
    V = mesh.vertices
    e = mesh.edges
    if f.space in ("P1", "P1pressure", "Morley"):
        vv = f.values[: mesh.nv]
        vval, mval = vv[verts], 0.5 * (vv[e[mids, 0]] + vv[e[mids, 1]])
    elif f.space == "P2":
        vval, mval = f.values[verts], f.values[mesh.nv + mids]
    else:
        raise ValueError("boundary_trace takes scalar fields")
    mid_pts = 0.5 * (V[e[mids, 0]] + V[e[mids, 1]])
    n = len(verts)
    pts = np.empty((2 * n, 2))
    pts[0::2], pts[1::2] = V[verts], mid_pts
    values = np.empty(2 * n)
    values[0::2], values[1::2] = vval, mval
    lengths = np.linalg.norm(V[e[mids, 1]] - V[e[mids, 0]], axis=1)
    s = np.empty(2 * n)
    for c in np.unique(comp):
        sel = np.flatnonzero(comp == c)
        cum = np.concatenate([[0.0], np.cumsum(lengths[sel])[:-1]])
        s[2 * sel] = cum
        s[2 * sel + 1] = cum + 0.5 * lengths[sel]
    return BoundaryTrace(np.repeat(comp, 2), s, pts, values, lengths, comp)


def boundary_normal_gradient(mesh: Mesh, cell_grads: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outward normal component of an elementwise-constant gradient.

    Returns ``(values, lengths)`` per boundary edge, taken from the single
    triangle owning each edge.
    """
    owner = _cached(mesh, "edge_owner", lambda: _edge_owner(mesh))
    b = mesh.boundary_edges
    V = mesh.vertices
    t = V[b[:, 1]] - V[b[:, 0]]
    lengths = np.linalg.norm(t, axis=1)
    # domain on the left -> outward normal is the tangent turned clockwise
    nout = np.column_stack([t[:, 1], -t[:, 0]]) / lengths[:, None]
    g = cell_grads[owner[mesh.boundary_edge_ids]]
    return (g * nout).sum(axis=1), lengths


def _edge_owner(mesh):
    owner = np.zeros(mesh.ne, dtype=np.int64)
    owner[mesh.tri_edges.ravel()] = np.repeat(np.arange(mesh.nt), 3)
    return owner
