"""Symmetric quadrature rules on the reference triangle.

Points are barycentric triples; weights sum to one so that
``sum(w * f(x)) * area`` integrates over a physical triangle.
"""
import numpy as np


def _orbit(a):
    b = 1.0 - 2.0 * a
    return [(a, a, b), (a, b, a), (b, a, a)]


def _orbit6(a, b):
    c = 1.0 - a - b
    return [(a, b, c), (b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)]


def _rule(groups):
    pts, wts = [], []
    for w, orbit in groups:
        pts += orbit
        wts += [w] * len(orbit)
    return np.array(pts), np.array(wts)


RULES = {
    1: (np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0])),
    2: _rule([(1 / 3, _orbit(1 / 6))]),
    # Dunavant, 6 points
    4: _rule(
        [
            (0.22338158967801146570, _orbit(0.44594849091596488632)),
            (0.10995174365532186764, _orbit(0.091576213509770743460)),
        ]
    ),
    # Dunavant, 12 points
    6: _rule(
        [
            (0.11678627572637936603, _orbit(0.24928674517091042129)),
            (0.050844906370206816921, _orbit(0.063089014491502228340)),
            (0.082851075618373575194, _orbit6(0.053145049844816947353, 0.31035245103378440542)),
        ]
    ),
}


def triangle_rule(degree: int):
    """Smallest stored rule exact for polynomials of ``degree``."""
    for d in sorted(RULES):
        if d >= degree:
            return RULES[d]
    raise ValueError(f"no triangle rule of degree {degree}")


def physical_points(vertices: np.ndarray, triangles: np.ndarray, bary: np.ndarray) -> np.ndarray:
    """Map barycentric points into every triangle: shape (nt, nq, 2)."""
    p = vertices[triangles]  # (nt, 3, 2)
    return np.einsum("qk,tkd->tqd", bary, p)
