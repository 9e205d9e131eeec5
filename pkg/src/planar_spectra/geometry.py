"""Parametric planar domains and their triangulations.

Every domain is meshed on a fixed *reference* region (unit disc, the
annulus itself, or the rectangle itself) and mapped to physical space.
Refinement happens in reference coordinates, with new boundary midpoints
projected back onto the reference boundary, so the physical boundary
vertices always sit exactly on the analytic curve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

KINDS = ("disc", "ellipse", "rectangle", "annulus", "fourier_star")
MIN_STAR_RADIUS = 0.05
MAX_LEVEL = 8


class GeometryError(ValueError):
    """Invalid domain description."""


@dataclass(frozen=True)
class DomainSpec:
    """Parametric planar domain.

    Geometric lengths are the raw parameters multiplied by ``scale``.
    ``target_area`` of ``None`` means "keep the natural size".
    """

    kind: str
    params: tuple[float, ...] = ()
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    target_area: float | None = None
    scale: float = 1.0

    # constructors -----------------------------------------------------
    @classmethod
    def disc(cls, radius=1.0, target_area=None):
        return cls("disc", (float(radius),), target_area=target_area)

    @classmethod
    def ellipse(cls, semi_a, semi_b, target_area=None):
        return cls("ellipse", (float(semi_a), float(semi_b)), target_area=target_area)

    @classmethod
    def rectangle(cls, width, height, target_area=None):
        return cls("rectangle", (float(width), float(height)), target_area=target_area)

    @classmethod
    def annulus(cls, inner_r, outer_r, target_area=None):
        return cls("annulus", (float(inner_r), float(outer_r)), target_area=target_area)

    @classmethod
    def fourier_star(cls, base_radius=1.0, cos_coeffs=(), sin_coeffs=(), target_area=None):
        return cls(
            "fourier_star",
            (float(base_radius),),
            tuple(float(c) for c in cos_coeffs),
            tuple(float(c) for c in sin_coeffs),
            target_area=target_area,
        )

    # derived quantities -------------------------------------------------
    @property
    def simply_connected(self) -> bool:
        return self.kind != "annulus"

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(self.scale * p for p in self.params)

    def raw_area(self) -> float:
        """Analytic area of the unscaled domain."""
        p = self.params
        if self.kind == "disc":
            return math.pi * p[0] ** 2
        if self.kind == "ellipse":
            return math.pi * p[0] * p[1]
        if self.kind == "rectangle":
            return p[0] * p[1]
        if self.kind == "annulus":
            return math.pi * (p[1] ** 2 - p[0] ** 2)
        energy = sum(a * a for a in self.cos_coeffs) + sum(b * b for b in self.sin_coeffs)
        return math.pi * p[0] ** 2 * (1.0 + 0.5 * energy)

    def area(self) -> float:
        return self.scale**2 * self.raw_area()

    def star_radius(self, theta):
        """Physical radius r(theta) of a fourier_star boundary."""
        theta = np.asarray(theta, dtype=float)
        r = np.ones_like(theta)
        for k, a in enumerate(self.cos_coeffs, start=1):
            r = r + a * np.cos(k * theta)
        for k, b in enumerate(self.sin_coeffs, start=1):
            r = r + b * np.sin(k * theta)
        return self.scale * self.params[0] * r

    def validate(self) -> "DomainSpec":
        if self.kind not in KINDS:
            raise GeometryError(f"unknown domain kind {self.kind!r}")
        nparams = {"disc": 1, "ellipse": 2, "rectangle": 2, "annulus": 2, "fourier_star": 1}
        if len(self.params) != nparams[self.kind]:
            raise GeometryError(f"{self.kind} takes {nparams[self.kind]} parameter(s)")
        if not all(math.isfinite(p) and p > 0 for p in self.params):
            raise GeometryError(f"{self.kind} parameters must be positive, got {self.params}")
        if self.kind == "annulus" and not self.params[0] < self.params[1]:
            raise GeometryError("annulus requires 0 < inner_r < outer_r")
        if self.target_area is not None and not (
            math.isfinite(self.target_area) and self.target_area > 0
        ):
            raise GeometryError("target_area must be positive")
        if self.kind != "fourier_star" and (self.cos_coeffs or self.sin_coeffs):
            raise GeometryError("Fourier coefficients only apply to fourier_star")
        if self.kind == "fourier_star":
            coeffs = np.array(self.cos_coeffs + self.sin_coeffs, dtype=float)
            if not np.all(np.isfinite(coeffs)):
                raise GeometryError("star coefficients must be finite")
            theta = np.linspace(0.0, 2 * np.pi, 8192, endpoint=False)
            rel = self.star_radius(theta) / (self.scale * self.params[0])
            i = int(np.argmin(rel))
            if rel[i] < MIN_STAR_RADIUS:
                raise GeometryError(
                    f"star radius {rel[i]:.4g}*base at theta={theta[i]:.6f} "
                    f"is below {MIN_STAR_RADIUS}*base"
                )
        return self

    # text config ----------------------------------------------------------
    def to_config(self) -> str:
        lines = [f"kind = {self.kind}", "params = " + ", ".join(repr(p) for p in self.params)]
        if self.cos_coeffs:
            lines.append("cos_coeffs = " + ", ".join(repr(c) for c in self.cos_coeffs))
        if self.sin_coeffs:
            lines.append("sin_coeffs = " + ", ".join(repr(c) for c in self.sin_coeffs))
        if self.target_area is not None:
            lines.append(f"target_area = {self.target_area!r}")
        lines.append(f"scale = {self.scale!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_config(cls, text: str) -> "DomainSpec":
        values = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise GeometryError(f"malformed config line {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = val

        def floats(key):
            val = values.get(key, "")
            return tuple(float(v) for v in val.split(",") if v.strip())

        try:
            spec = cls(
                kind=values["kind"],
                params=floats("params"),
                cos_coeffs=floats("cos_coeffs"),
                sin_coeffs=floats("sin_coeffs"),
                target_area=float(values["target_area"]) if "target_area" in values else None,
                scale=float(values.get("scale", 1.0)),
            )
        except (KeyError, ValueError) as exc:
            raise GeometryError(f"bad domain config: {exc}") from exc
        return spec.validate()

    def label(self) -> str:
        parts = [self.kind] + [f"{p:g}" for p in self.params]
        parts += [f"a{k}={a:g}" for k, a in enumerate(self.cos_coeffs, 1) if a]
        parts += [f"b{k}={b:g}" for k, b in enumerate(self.sin_coeffs, 1) if b]
        if self.scale != 1.0:
            parts.append(f"scale={self.scale:.6g}")
        return " ".join(parts)


def normalize_area(spec: DomainSpec) -> DomainSpec:
    """Return a copy whose analytic area equals ``spec.target_area``.

    Eigenvalues scale as ``lambda(s*Omega) = lambda(Omega) / s**2``.
    """
    spec.validate()
    if spec.target_area is None:
        return replace(spec, scale=1.0)
    return replace(spec, scale=math.sqrt(spec.target_area / spec.raw_area()))


@dataclass(eq=False)
class Mesh:
    """Conforming triangulation with labeled boundary loops.

    ``boundary_edges`` rows are ``(i, j, component)`` oriented with the
    domain on the left; ``boundary_param`` holds the curve parameter of
    both endpoints of each boundary edge.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_param: np.ndarray
    refine_level: int
    spec: DomainSpec | None = None
    ref_vertices: np.ndarray | None = None
    ref_boundary: np.ndarray | None = None  # vertex -> component id, -1 interior
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def nv(self) -> int:
        return len(self.vertices)

    @property
    def nt(self) -> int:
        return len(self.triangles)

    def _edges(self):
        if "edges" not in self._cache:
            t = self.triangles
            # local edge k is opposite local vertex k
            local = np.stack([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]], axis=1)
            flat = np.sort(local.reshape(-1, 2), axis=1)
            edges, inverse = np.unique(flat, axis=0, return_inverse=True)
            self._cache["edges"] = edges
            self._cache["tri_edges"] = inverse.reshape(-1, 3)
        return self._cache["edges"], self._cache["tri_edges"]

    @property
    def edges(self) -> np.ndarray:
        """Unique edges as sorted vertex pairs."""
        return self._edges()[0]

    @property
    def tri_edges(self) -> np.ndarray:
        """Edge index opposite each local vertex, shape (nt, 3)."""
        return self._edges()[1]

    @property
    def ne(self) -> int:
        return len(self.edges)

    @property
    def areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def area(self) -> float:
        return float(self.areas.sum())

    @property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges[:, :2])

    @property
    def boundary_edge_ids(self) -> np.ndarray:
        """Indices into ``edges`` of the boundary edges, in loop order."""
        if "bids" not in self._cache:
            key = np.sort(self.boundary_edges[:, :2], axis=1)
            lookup = {tuple(e): i for i, e in enumerate(self.edges)}
            self._cache["bids"] = np.array([lookup[tuple(k)] for k in key], dtype=np.int64)
        return self._cache["bids"]

    @property
    def edge_on_boundary(self) -> np.ndarray:
        mask = np.zeros(self.ne, dtype=bool)
        mask[self.boundary_edge_ids] = True
        return mask

    def max_edge_length(self) -> float:
        e = self.edges
        return float(np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1).max())

    def n_components(self) -> int:
        return len(np.unique(self.boundary_edges[:, 2]))

    def euler_characteristic(self) -> int:
        return self.nv - self.ne + self.nt

    def boundary_length(self) -> float:
        b = self.boundary_edges
        return float(np.linalg.norm(self.vertices[b[:, 1]] - self.vertices[b[:, 0]], axis=1).sum())

    def to_text(self) -> str:
        """Plain-text export: ``v x y``, ``t i j k``, ``b i j component``."""
        out = [f"v {float(x)!r} {float(y)!r}" for x, y in self.vertices]
        out += [f"t {i} {j} {k}" for i, j, k in self.triangles]
        out += [f"b {i} {j} {c}" for i, j, c in self.boundary_edges]
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Mesh":
        verts, tris, bnd = [], [], []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append((float(parts[1]), float(parts[2])))
            elif parts[0] == "t":
                tris.append(tuple(int(p) for p in parts[1:4]))
            elif parts[0] == "b":
                bnd.append(tuple(int(p) for p in parts[1:4]))
        b = np.array(bnd, dtype=np.int64).reshape(-1, 3)
        return cls(
            np.array(verts, dtype=float),
            np.array(tris, dtype=np.int64),
            b,
            np.full((len(b), 2), np.nan),
            refine_level=0,
        )


# ----------------------------------------------------------------------
# reference meshes


def _ring_disc(rings: int):
    """Concentric-ring triangulation of the unit disc (ring i has 6i nodes)."""
    pts = [(0.0, 0.0)]
    start = [0]
    for i in range(1, rings + 1):
        start.append(len(pts))
        n = 6 * i
        for j in range(n):
            th = 2 * np.pi * j / n
            pts.append((i / rings * np.cos(th), i / rings * np.sin(th)))
    tris = []
    for j in range(6):
        tris.append((0, 1 + j, 1 + (j + 1) % 6))
    for i in range(1, rings):
        inner_n, outer_n = 6 * i, 6 * (i + 1)
        a, b = start[i], start[i + 1]
        for sector in range(6):
            for q in range(i + 1):
                o = sector * (i + 1) + q
                inn = sector * i + q
                # outward triangle
                tris.append((a + inn % inner_n, b + o % outer_n, b + (o + 1) % outer_n))
                if q < i:
                    tris.append((a + inn % inner_n, b + (o + 1) % outer_n, a + (inn + 1) % inner_n))
    verts = np.array(pts)
    nb = 6 * rings
    outer = start[rings] + np.arange(nb)
    bedges = np.column_stack([outer, np.roll(outer, -1), np.zeros(nb, dtype=np.int64)])
    comp = -np.ones(len(verts), dtype=np.int64)
    comp[outer] = 0
    return verts, np.array(tris, dtype=np.int64), bedges.astype(np.int64), comp


def _polar_annulus(r_in: float, r_out: float, nr: int, nth: int):
    s = np.linspace(r_in, r_out, nr + 1)
    th = 2 * np.pi * np.arange(nth) / nth
    R, T = np.meshgrid(s, th, indexing="ij")
    verts = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    idx = np.arange((nr + 1) * nth).reshape(nr + 1, nth)
    tris = []
    for i in range(nr):
        for j in range(nth):
            a, b = idx[i, j], idx[i, (j + 1) % nth]
            c, d = idx[i + 1, j], idx[i + 1, (j + 1) % nth]
            if (i + j) % 2 == 0:
                tris += [(a, c, d), (a, d, b)]
            else:
                tris += [(a, c, b), (b, c, d)]
    outer = idx[nr]
    inner = idx[0]
    b_out = np.column_stack([outer, np.roll(outer, -1), np.zeros(nth, dtype=np.int64)])
    # inner loop runs clockwise so the domain stays on the left
    b_in = np.column_stack([np.roll(inner, -1), inner, np.ones(nth, dtype=np.int64)])
    comp = -np.ones(len(verts), dtype=np.int64)
    comp[outer] = 0
    comp[inner] = 1
    return verts, np.array(tris, dtype=np.int64), np.vstack([b_out, b_in]), comp


def _grid_rectangle(w: float, h: float, nx: int, ny: int):
    x = np.linspace(0.0, w, nx + 1)
    y = np.linspace(0.0, h, ny + 1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i, j + 1], idx[i + 1, j + 1]
            if (i + j) % 2 == 0:
                tris += [(a, b, d), (a, d, c)]
            else:
                tris += [(a, b, c), (b, d, c)]
    loop = list(idx[:, 0]) + list(idx[nx, 1:]) + list(idx[nx - 1 :: -1, ny]) + list(idx[0, ny - 1 : 0 : -1])
    loop = np.array(loop)
    bedges = np.column_stack([loop, np.roll(loop, -1), np.zeros(len(loop), dtype=np.int64)])
    comp = -np.ones(len(verts), dtype=np.int64)
    comp[loop] = 0
    return verts, np.array(tris, dtype=np.int64), bedges, comp


def _reference(spec: DomainSpec):
    if spec.kind in ("disc", "ellipse", "fourier_star"):
        return _ring_disc(2)
    if spec.kind == "annulus":
        r_in, r_out = spec.params
        # keep cells roughly square at level 0
        nr = max(1, int(round(2 * (r_out - r_in) / r_out)))
        return _polar_annulus(r_in / r_out, 1.0, nr, 12)
    w, h = spec.params
    m = min(w, h)
    return _grid_rectangle(w / m, h / m, max(1, int(round(2 * w / m))), max(1, int(round(2 * h / m))))


def _project_to_reference_boundary(spec: DomainSpec, pts: np.ndarray, comp: np.ndarray):
    """Project reference points onto the reference boundary component."""
    if spec.kind == "rectangle":
        return pts  # straight sides: midpoints are already on the boundary
    out = pts.copy()
    r = np.linalg.norm(pts, axis=1)
    target = np.ones(len(pts))
    if spec.kind == "annulus":
        target = np.where(comp == 1, spec.params[0] / spec.params[1], 1.0)
    out *= (target / r)[:, None]
    return out


def _map_to_physical(spec: DomainSpec, ref: np.ndarray) -> np.ndarray:
    s = spec.scale
    if spec.kind == "disc":
        return s * spec.params[0] * ref
    if spec.kind == "ellipse":
        return ref * (s * np.array(spec.params))[None, :]
    if spec.kind == "annulus":
        return s * spec.params[1] * ref
    if spec.kind == "rectangle":
        m = min(spec.params)
        return s * m * ref
    theta = np.arctan2(ref[:, 1], ref[:, 0])
    return ref * spec.star_radius(theta)[:, None]


def _boundary_param(spec: DomainSpec, ref: np.ndarray, bedges: np.ndarray) -> np.ndarray:
    """Curve parameter of each boundary edge endpoint.

    Polar angle in reference space for curved kinds, arclength along the
    perimeter for rectangles.
    """
    a, b = ref[bedges[:, 0]], ref[bedges[:, 1]]
    if spec.kind == "rectangle":
        w, h = spec.params
        m = min(w, h)

        def arclen(p):
            x, y = p[:, 0] * m * spec.scale, p[:, 1] * m * spec.scale
            W, H = w * spec.scale, h * spec.scale
            return np.select(
                [np.isclose(y, 0) & (x < W), np.isclose(x, W) & (y < H), np.isclose(y, H)],
                [x, W + y, W + H + (W - x)],
                default=2 * W + H + (H - y),
            )

        return np.column_stack([arclen(a), arclen(b)])
    ta = np.mod(np.arctan2(a[:, 1], a[:, 0]), 2 * np.pi)
    tb = np.mod(np.arctan2(b[:, 1], b[:, 0]), 2 * np.pi)
    return np.column_stack([ta, tb])


def _assemble_mesh(spec, ref, tris, bedges, comp, level) -> Mesh:
    verts = _map_to_physical(spec, ref)
    return Mesh(
        vertices=verts,
        triangles=tris,
        boundary_edges=bedges,
        boundary_param=_boundary_param(spec, ref, bedges),
        refine_level=level,
        spec=spec,
        ref_vertices=ref,
        ref_boundary=comp,
    )


def refine(mesh: Mesh) -> Mesh:
    """Split every triangle into four; boundary midpoints land on the curve."""
    if mesh.spec is None or mesh.ref_vertices is None:
        raise GeometryError("refine needs a mesh produced by build_mesh")
    spec = mesh.spec
    edges, tri_edges = mesh.edges, mesh.tri_edges
    nv = mesh.nv
    ref = mesh.ref_vertices
    mids = 0.5 * (ref[edges[:, 0]] + ref[edges[:, 1]])

    bids = mesh.boundary_edge_ids
    bcomp = mesh.boundary_edges[:, 2]
    mid_comp = -np.ones(len(edges), dtype=np.int64)
    mid_comp[bids] = bcomp
    on_b = mid_comp >= 0
    mids[on_b] = _project_to_reference_boundary(spec, mids[on_b], mid_comp[on_b])

    new_ref = np.vstack([ref, mids])
    comp = np.concatenate([mesh.ref_boundary, mid_comp])

    t = mesh.triangles
    m = tri_edges + nv  # midpoint opposite local vertex k
    new_tris = np.concatenate(
        [
            np.column_stack([t[:, 0], m[:, 2], m[:, 1]]),
            np.column_stack([t[:, 1], m[:, 0], m[:, 2]]),
            np.column_stack([t[:, 2], m[:, 1], m[:, 0]]),
            np.column_stack([m[:, 0], m[:, 1], m[:, 2]]),
        ]
    )
    b = mesh.boundary_edges
    bm = bids + nv
    new_b = np.empty((2 * len(b), 3), dtype=np.int64)
    new_b[0::2] = np.column_stack([b[:, 0], bm, b[:, 2]])
    new_b[1::2] = np.column_stack([bm, b[:, 1], b[:, 2]])
    return _assemble_mesh(spec, new_ref, new_tris, new_b, comp, mesh.refine_level + 1)


def build_mesh(spec: DomainSpec, level: int) -> Mesh:
    """Quasi-uniform mesh of ``spec``; edge lengths halve with each level."""
    if not (isinstance(level, (int, np.integer)) and 0 <= level <= MAX_LEVEL):
        raise GeometryError(f"level must be an integer in [0, {MAX_LEVEL}], got {level!r}")
    spec = normalize_area(spec)
    ref, tris, bedges, comp = _reference(spec)
    mesh = _assemble_mesh(spec, ref, tris, bedges, comp, 0)
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def boundary_loops(mesh: Mesh) -> list[np.ndarray]:
    """Vertex sequences of each closed boundary loop, ordered by component."""
    loops = []
    for c in np.unique(mesh.boundary_edges[:, 2]):
        be = mesh.boundary_edges[mesh.boundary_edges[:, 2] == c]
        nxt = {int(i): int(j) for i, j, _ in be}
        start = int(be[0, 0])
        seq = [start]
        cur = nxt[start]
        while cur != start:
            seq.append(cur)
            cur = nxt[cur]
            if len(seq) > len(be):
                raise GeometryError("boundary edges do not form a closed loop")
        if len(seq) != len(be):
            raise GeometryError("boundary component is not a single loop")
        loops.append(np.array(seq))
    return loops


def on_analytic_boundary(spec: DomainSpec, pts: np.ndarray) -> np.ndarray:
    """Distance-like residual of points against the analytic boundary curve(s)."""
    x, y = pts[:, 0], pts[:, 1]
    L = spec.lengths
    if spec.kind == "disc":
        return np.abs(np.hypot(x, y) - L[0])
    if spec.kind == "ellipse":
        return np.abs(np.sqrt((x / L[0]) ** 2 + (y / L[1]) ** 2) - 1.0) * min(L)
    if spec.kind == "annulus":
        r = np.hypot(x, y)
        return np.minimum(np.abs(r - L[0]), np.abs(r - L[1]))
    if spec.kind == "rectangle":
        W, H = L
        return np.minimum.reduce([np.abs(x), np.abs(y), np.abs(x - W), np.abs(y - H)])
    theta = np.arctan2(y, x)
    return np.abs(np.hypot(x, y) - spec.star_radius(theta))


def iter_levels(spec: DomainSpec, levels: Iterable[int]):
    """Meshes for increasing levels, reusing refinement."""
    levels = sorted(levels)
    mesh = build_mesh(spec, levels[0])
    for lv in levels:
        while mesh.refine_level < lv:
            mesh = refine(mesh)
        yield lv, mesh
