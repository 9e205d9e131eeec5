import math

import numpy as np
import pytest

from planar_spectra import fem, spectra
from planar_spectra.eigensolve import TopologyError
from planar_spectra.geometry import DomainSpec
from planar_spectra.oracle import bessel_zero, disc_dirichlet

J11_SQ = bessel_zero(1, 1) ** 2
# square buckling, level 7 (O(h^2) sequence 52.3146, 52.3371, 52.3428 at levels 5-7)
SQUARE_BUCKLING_L7 = 52.34280371057261
SQUARE_BUCKLING_L5 = 52.31461489402535


@pytest.fixture(scope="module")
def disc():
    return DomainSpec.disc(1.0)


@pytest.fixture(scope="module")
def square():
    return DomainSpec.rectangle(1.0, 1.0)


def test_square_dirichlet_first_four(square):
    lam = spectra.dirichlet_eigs(square, 4, 4).eigenvalues
    exact = np.array([2, 5, 5, 8]) * math.pi**2
    assert np.all(np.abs(lam / exact - 1) < 5e-3)
    assert lam[2] - lam[1] < 1e-6 * lam[1]


def test_disc_dirichlet_against_bessel_zeros(disc):
    res = spectra.dirichlet_eigs(disc, 4, 6)
    assert np.all(np.abs(res.eigenvalues / disc_dirichlet(1.0, 6) - 1) < 2e-3)
    assert max(res.history["residuals"]) < 1e-9


def test_dirichlet_scales_with_radius():
    a = spectra.dirichlet_eigs(DomainSpec.disc(1.0), 3, 1).eigenvalues[0]
    b = spectra.dirichlet_eigs(DomainSpec.disc(2.0), 3, 1).eigenvalues[0]
    assert b == pytest.approx(a / 4, rel=1e-10)


def test_disc_buckling_and_stokes_agree_with_j11(disc):
    lb = spectra.buckling_eig(disc, 4).eigenvalues[0]
    ls = spectra.stokes_eig(disc, 4)
    assert lb == pytest.approx(J11_SQ, rel=2e-4)
    assert ls.eigenvalues[0] == pytest.approx(J11_SQ, rel=2e-4)
    assert ls.history["divergence_residuals"][0] < 1e-10


def test_square_buckling_regression(square):
    lam = spectra.buckling_eig(square, 5).eigenvalues[0]
    assert lam == pytest.approx(SQUARE_BUCKLING_L5, rel=1e-8)
    assert lam == pytest.approx(SQUARE_BUCKLING_L7, rel=1e-3)


def test_buckling_converges(disc):
    errs = [abs(spectra.buckling_eig(disc, L).eigenvalues[0] - J11_SQ) for L in (2, 3, 4)]
    assert errs[0] > errs[1] > errs[2]
    assert math.log2(errs[1] / errs[2]) > 1.5


def test_solve_dispatch_and_unknown_problem(disc):
    assert spectra.solve("dirichlet", disc, 2).eigenvalues[0] == spectra.dirichlet_eigs(disc, 2).eigenvalues[0]
    with pytest.raises(ValueError):
        spectra.solve("neumann", disc, 2)


def test_buckling_fields_structure(disc):
    res = spectra.buckling_eig(disc, 3)
    f = res.fields[0]
    psi = f["psi"]
    assert np.all(psi.values[psi.dofmap.constrained_dofs] == 0)
    h = f["h"]
    lam = res.eigenvalues[0]
    assert np.allclose(h.values, fem.to_p2(f["w"]).values + lam * psi.values)


def test_vorticity_of_rigid_rotation(disc):
    m = spectra.mesh_for(disc, 3)
    u = fem.interpolate(m, "VecP2", lambda x, y: (-y, x))
    w = spectra.vorticity(u)
    assert np.allclose(w.values, 2.0, atol=1e-12)


def test_vorticity_of_shear(disc):
    m = spectra.mesh_for(disc, 3)
    u = fem.interpolate(m, "VecP2", lambda x, y: (y * y, 0 * x))
    w = spectra.vorticity(u)
    # curl = -2y exactly; P1 projection of a linear is exact
    assert np.allclose(w.values, -2 * m.vertices[:, 1], atol=1e-12)


def test_stream_function_of_rotation(disc):
    m = spectra.mesh_for(disc, 4)
    u = fem.interpolate(m, "VecP2", lambda x, y: (-y * (1 - x * x - y * y), x * (1 - x * x - y * y)))
    psi = spectra.stream_function(u)
    assert spectra.perp_gradient_error(psi, u) < 5e-3
    # u = perp grad of psi = -(1 - r^2)^2 / 4
    exact = fem.interpolate(m, "P2", lambda x, y: -((1 - x * x - y * y) ** 2) / 4)
    assert np.abs(psi.values - exact.values).max() < 2e-3


def test_stream_function_rejects_annulus():
    spec = DomainSpec.annulus(0.5, 1.0)
    u = fem.interpolate(spectra.mesh_for(spec, 2), "VecP2", lambda x, y: (-y, x))
    with pytest.raises(TopologyError):
        spectra.stream_function(u)


def test_stokes_pressure_recovery(disc):
    res = spectra.stokes_eig(disc, 3)
    u, p = res.fields[0]["u"], res.fields[0]["p"]
    lam = res.eigenvalues[0]
    assert spectra.stokes_residual(u, p, lam) < 1e-10
    q = spectra.recover_pressure(u, lam)
    assert np.allclose(q.values, p.values, atol=1e-8 * np.abs(p.values).max() + 1e-12)


def test_harmonic_extension_examples(disc):
    m = spectra.mesh_for(disc, 3)
    c = spectra.harmonic_extension(m, lambda x, y: 2.5 + 0 * x)
    assert np.allclose(c.values, 2.5, atol=1e-12)
    x = spectra.harmonic_extension(m, lambda x, y: x - 3 * y)
    e = m.edges
    nodes = np.vstack([m.vertices, 0.5 * (m.vertices[e[:, 0]] + m.vertices[e[:, 1]])])
    assert np.allclose(x.values, nodes[:, 0] - 3 * nodes[:, 1], atol=1e-12)


def test_poisson_constant_rhs(disc):
    # Laplace(psi) = -2 with psi = 0 on r = 1 gives (1 - r^2) / 2
    m = spectra.mesh_for(disc, 4)
    psi = spectra.solve_poisson(m, lambda x, y: -2.0 + 0 * x)
    exact = fem.interpolate(m, "P2", lambda x, y: (1 - x * x - y * y) / 2)
    assert np.abs(psi.values - exact.values).max() < 2e-3
    assert spectra.laplacian_residual(psi, lambda x, y: -2.0 + 0 * x) < 1e-10


def test_helmholtz_residual_decreases(disc):
    r = []
    for L in (2, 3, 4):
        res = spectra.buckling_eig(disc, L)
        r.append(spectra.helmholtz_residual(res.fields[0]["w"], res.eigenvalues[0]))
    assert r[0] > r[1] > r[2]


def test_history_reports_dofs(disc):
    res = spectra.stokes_eig(disc, 2)
    assert res.history["ndofs"] == len(res.fields[0]["u"].values) - len(
        res.fields[0]["u"].dofmap.constrained_dofs)
