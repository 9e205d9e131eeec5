import math

import mpmath
import numpy as np
import pytest
import scipy.special as ss
from hypothesis import given, settings, strategies as st

from planar_spectra import oracle


@given(st.integers(0, 5), st.floats(0.0, 100.0))
@settings(max_examples=200, deadline=None)
def test_bessel_matches_scipy(n, x):
    assert oracle.bessel_j(n, x) == pytest.approx(ss.jv(n, x), abs=1e-13)


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("k", [1, 2, 5, 10])
def test_zeros_match_mpmath(n, k):
    z = oracle.bessel_zero(n, k)
    assert z == pytest.approx(float(mpmath.besseljzero(n, k)), rel=1e-14)
    assert oracle.bessel_zero_entry(n, k).residual < 1e-14


def test_zeros_interlace():
    for n in range(5):
        for k in range(1, 9):
            assert oracle.bessel_zero(n, k) < oracle.bessel_zero(n + 1, k) < oracle.bessel_zero(n, k + 1)


def test_known_values():
    assert oracle.bessel_zero(0, 1) == pytest.approx(2.404825557695773, rel=1e-15)
    assert oracle.bessel_zero(1, 1) == pytest.approx(3.831705970207512, rel=1e-15)
    # unit-area disc: pi j11^2
    assert oracle.disc_reference_for_area(1.0, "buckling1") == pytest.approx(46.1247711, rel=1e-8)
    assert oracle.disc_reference(2.0, "dirichlet1") == pytest.approx(2.404825557695773**2 / 4)


def test_disc_dirichlet_multiplicities():
    v = oracle.disc_dirichlet(1.0, 15)
    assert v[0] == pytest.approx(oracle.bessel_zero(0, 1) ** 2)
    assert v[1] == v[2] == pytest.approx(oracle.bessel_zero(1, 1) ** 2)
    assert v[3] == v[4] == pytest.approx(oracle.bessel_zero(2, 1) ** 2)
    assert v[5] == pytest.approx(oracle.bessel_zero(0, 2) ** 2)
    ref = sorted(
        float(mpmath.besseljzero(n, m)) ** 2
        for n in range(12) for m in range(1, 6) for _ in range(1 if n == 0 else 2)
    )[:15]
    assert v == pytest.approx(ref, rel=1e-13)
    assert np.all(np.diff(v) >= 0)


def test_rectangle_values():
    assert oracle.rectangle_dirichlet(1, 1, 4) == pytest.approx(
        [2 * math.pi**2, 5 * math.pi**2, 5 * math.pi**2, 8 * math.pi**2])
    assert oracle.rectangle_dirichlet(2, 1, 3) == pytest.approx(
        [math.pi**2 * 1.25, math.pi**2 * 2, math.pi**2 * 3.25])


def test_argument_validation():
    with pytest.raises(ValueError):
        oracle.bessel_j(6, 1.0)
    with pytest.raises(ValueError):
        oracle.bessel_j(0, 101.0)
    with pytest.raises(ValueError):
        oracle.bessel_zero(0, 11)
    with pytest.raises(ValueError):
        oracle.disc_reference(-1.0, "dirichlet1")
    with pytest.raises(ValueError):
        oracle.disc_reference(1.0, "neumann1")
    with pytest.raises(ValueError):
        oracle.rectangle_dirichlet(0, 1, 1)
