import math

import numpy as np
import pytest
import scipy.sparse as sp

from planar_spectra import fem
from planar_spectra.eigensolve import SolveOptions, smallest_eigenpairs
from planar_spectra.geometry import DomainSpec, Mesh, build_mesh


def single_triangle(p=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))):
    V = np.array(p, dtype=float)
    T = np.array([[0, 1, 2]])
    B = np.array([[0, 1, 0], [1, 2, 0], [2, 0, 0]])
    return Mesh(V, T, B, np.zeros((3, 2)), refine_level=0)


@pytest.fixture(scope="module")
def disc3():
    return build_mesh(DomainSpec.disc(1.0), 3)


@pytest.fixture(scope="module")
def square2():
    return build_mesh(DomainSpec.rectangle(1.0, 1.0), 2)


def test_p1_reference_stiffness_and_mass():
    m = single_triangle()
    K = fem.assemble_stiffness(m, "P1").toarray()
    assert np.allclose(K, 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]), atol=1e-15)
    M = fem.assemble_mass(m, "P1").toarray()
    assert np.allclose(M, 0.5 / 12 * np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]), atol=1e-15)


def test_p1_mass_general_triangle():
    m = single_triangle(((0.3, -0.2), (2.0, 0.5), (0.4, 1.7)))
    A = m.areas[0]
    M = fem.assemble_mass(m, "P1").toarray()
    assert np.allclose(M, A / 12 * np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]]), atol=1e-14)


@pytest.mark.parametrize("space", ["P1", "P2", "VecP2", "Morley"])
def test_mass_sum_and_definiteness(disc3, space):
    M = fem.assemble_mass(disc3, space)
    factor = 2 if space == "VecP2" else 1
    if space != "Morley":  # the Morley basis is not a partition of unity
        assert M.sum() == pytest.approx(factor * disc3.area(), rel=1e-12)
    assert abs(M - M.T).max() <= 1e-13 * abs(M).max()
    if space != "Morley":
        ev = np.linalg.eigvalsh(M.toarray())
        assert ev.min() > 0


@pytest.mark.parametrize("space", ["P1", "P2", "VecP2"])
def test_stiffness_annihilates_constants(disc3, space):
    K = fem.assemble_stiffness(disc3, space)
    assert np.abs(K @ np.ones(K.shape[0])).max() < 1e-12 * abs(K).max()
    assert abs(K - K.T).max() <= 1e-13 * abs(K).max()


def test_p2_energy_of_quadratic(square2):
    # f = x^2 + x y: int |grad f|^2 over the unit square = 17/12 + ... computed exactly
    f = fem.interpolate(square2, "P2", lambda x, y: x**2 + x * y)
    K = fem.assemble_stiffness(square2, "P2")
    exact = 1 / 3 * 4 + 4 * 1 / 4 + 1 / 3 + 1 / 3  # (2x+y)^2 + x^2
    assert f.values @ (K @ f.values) == pytest.approx(exact, rel=1e-13)
    M = fem.assemble_mass(square2, "P2")
    # int (x^2 + x y)^2 = 1/5 + 2/8 + 1/9
    assert f.values @ (M @ f.values) == pytest.approx(1 / 5 + 1 / 4 + 1 / 9, rel=1e-13)


def test_p2_square_dirichlet_level4():
    m = build_mesh(DomainSpec.rectangle(1.0, 1.0), 4)
    dm = fem.dofmap(m, "P2")
    red = fem.apply_dirichlet((fem.assemble_stiffness(m, "P2"), fem.assemble_mass(m, "P2")), dm)
    lam = smallest_eigenpairs(*red.matrices, SolveOptions(k=1))[0].lam
    assert lam == pytest.approx(2 * math.pi**2, rel=1e-2)


def test_morley_dof_counts(disc3):
    dm = fem.dofmap(disc3, "Morley")
    assert dm.total_dofs == disc3.nv + disc3.ne
    assert len(dm.constrained_dofs) == 2 * len(disc3.boundary_edges)


def test_morley_kernel_and_quadratic_energy(disc3):
    H, G = fem.assemble_morley(disc3)
    for fn, grad in [
        (lambda x, y: np.ones_like(x), lambda x, y: (0 * x, 0 * y)),
        (lambda x, y: 2 * x - 3 * y, lambda x, y: (2 + 0 * x, -3 + 0 * y)),
    ]:
        v = fem.interpolate(disc3, "Morley", fn, grad).values
        assert abs(v @ (H @ v)) < 1e-10
    q = fem.interpolate(disc3, "Morley", lambda x, y: x**2 + y**2, lambda x, y: (2 * x, 2 * y))
    # D2 psi : D2 psi = 8 on every triangle
    assert q.values @ (H @ q.values) == pytest.approx(8 * disc3.area(), rel=1e-12)
    hess = fem.morley_cell_hessians(q)
    assert np.allclose(hess, [2.0, 0.0, 2.0], atol=1e-9)


def test_morley_reproduces_quadratics(disc3):
    fn = lambda x, y: 1 + x - 2 * y + 0.5 * x * x - x * y + 3 * y * y
    grad = lambda x, y: (1 + x - y, -2 - x + 6 * y)
    f = fem.interpolate(disc3, "Morley", fn, grad)
    L, w = fem.triangle_rule(4)
    v, g, _ = f.at_quadrature(4)
    pts = fem.physical_points(disc3.vertices, disc3.triangles, L)
    assert np.allclose(v, fn(pts[..., 0], pts[..., 1]), atol=1e-11)
    gx, gy = grad(pts[..., 0], pts[..., 1])
    assert np.allclose(g[..., 0], gx, atol=1e-10) and np.allclose(g[..., 1], gy, atol=1e-10)


def test_divergence_examples(disc3):
    B = fem.assemble_divergence(disc3)
    u = fem.interpolate(disc3, "VecP2", lambda x, y: (np.ones_like(x), np.zeros_like(x)))
    assert np.abs(B @ u.values).max() < 1e-13
    u = fem.interpolate(disc3, "VecP2", lambda x, y: (x, y))
    assert np.allclose(B @ u.values, 2 * fem.pressure_mean_vector(disc3), atol=1e-14)
    # rotated gradient of a quadratic bubble is P2 and exactly divergence free
    bub = lambda x, y: (-(-2 * y), 2 * x)  # psi = x^2 + y^2 - 1
    u = fem.interpolate(disc3, "VecP2", lambda x, y: (-2 * y, 2 * x))
    assert np.abs(B @ u.values).max() < 1e-13


def test_apply_dirichlet_empty_interior():
    m = single_triangle()
    K = fem.assemble_stiffness(m, "P1")
    with pytest.raises(fem.EmptyInteriorError, match="empty interior"):
        fem.apply_dirichlet(K, fem.dofmap(m, "P1"))


def test_reduced_stiffness_spd(disc3):
    dm = fem.dofmap(disc3, "P2")
    red = fem.apply_dirichlet(fem.assemble_stiffness(disc3, "P2"), dm)
    (K,) = red.matrices
    np.linalg.cholesky(K.toarray())
    x = np.arange(len(red.free), dtype=float)
    full = red.expand(x)
    assert np.all(full[dm.constrained_dofs] == 0) and np.array_equal(full[red.free], x)


def test_dirichlet_p1_rayleigh_decreases():
    lams = []
    for L in (1, 2, 3, 4):
        m = build_mesh(DomainSpec.rectangle(1.0, 1.0), L)
        dm = fem.dofmap(m, "P1")
        red = fem.apply_dirichlet((fem.assemble_stiffness(m, "P1"), fem.assemble_mass(m, "P1")), dm)
        lams.append(smallest_eigenpairs(*red.matrices, SolveOptions(k=1))[0].lam)
    assert all(b < a for a, b in zip(lams, lams[1:]))
    assert lams[-1] > 2 * math.pi**2


def test_boundary_trace_examples():
    m = build_mesh(DomainSpec.disc(1.0), 3)
    c = fem.interpolate(m, "P2", lambda x, y: 3.0 + 0 * x)
    tr = fem.boundary_trace(c)
    assert np.all(tr.values == 3.0)
    f = fem.interpolate(m, "P2", lambda x, y: x)
    tr = fem.boundary_trace(f)
    th = np.arctan2(tr.points[:, 1], tr.points[:, 0])
    assert np.allclose(tr.values[0::2], np.cos(th[0::2]), atol=1e-14)
    assert np.all(np.diff(tr.s) > 0)
    assert tr.length() == pytest.approx(m.boundary_length())


def test_boundary_trace_annulus_components():
    m = build_mesh(DomainSpec.annulus(0.5, 1.0), 2)
    f = fem.interpolate(m, "P1", lambda x, y: np.hypot(x, y))
    tr = fem.boundary_trace(f)
    for c in np.unique(tr.component):
        vals = tr.values[tr.component == c]
        assert np.ptp(vals) < 1e-14


def test_field_norms(disc3):
    f = fem.interpolate(disc3, "P2", lambda x, y: x)
    # int x^2 over the disc is area / 4, up to the polygonal boundary
    assert f.l2_norm() ** 2 == pytest.approx(disc3.area() / 4, rel=2e-3)
    assert f.h1_seminorm() ** 2 == pytest.approx(disc3.area(), rel=1e-13)
    assert abs(f.mean()) < 1e-14


def test_field_length_checked(disc3):
    with pytest.raises(ValueError, match="needs"):
        fem.Field(fem.dofmap(disc3, "P2"), np.zeros(3))


def test_to_p2_embeds_p1(disc3):
    f = fem.interpolate(disc3, "P1", lambda x, y: 2 * x - y)
    g = fem.to_p2(f)
    h = fem.interpolate(disc3, "P2", lambda x, y: 2 * x - y)
    assert np.allclose(g.values, h.values, atol=1e-14)


def test_matrix_export_format():
    m = single_triangle()
    text = fem.matrix_to_coordinate_text(fem.assemble_mass(m, "P1"))
    rows = [line.split() for line in text.splitlines()]
    assert len(rows) == 9 and rows[0][:2] == ["0", "0"]
    assert float(rows[0][2]) == pytest.approx(1 / 12)


def test_assembly_bitwise_reproducible(disc3):
    a = fem.assemble_mass(build_mesh(DomainSpec.disc(1.0), 3), "P2")
    b = fem.assemble_mass(build_mesh(DomainSpec.disc(1.0), 3), "P2")
    assert a.data.tobytes() == b.data.tobytes()
