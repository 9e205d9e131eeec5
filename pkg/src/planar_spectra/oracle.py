"""Closed-form reference spectra for discs and rectangles.

Bessel functions are evaluated from scratch (power series for small
arguments, Miller's backward recurrence otherwise) so the reference
values do not depend on any special-function library.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

MAX_ORDER = 5
MAX_ARG = 100.0
SERIES_LIMIT = 8.0


def _series(n: int, x: float) -> float:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    q = -half * half
    k = 0
    # terms decrease monotonically once k > x/2; stop below the 1e-17 level
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if k > half and abs(term) < 1e-17:
            return total


def _miller(n: int, x: float) -> float:
    start = 2 * (int(x) + 30 + n)
    start += start % 2
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    want = 0.0
    for k in range(start, 0, -1):
        j_prev = 2.0 * k / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if k - 1 == n:
            want = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
            want *= 1e-250
    norm += j_cur  # J_0 term
    return want / norm


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for 0 <= n <= 5, 0 <= x <= 100."""
    if not (isinstance(n, int) and 0 <= n <= MAX_ORDER):
        raise ValueError(f"order must be an integer in [0, {MAX_ORDER}], got {n!r}")
    x = float(x)
    if not (0.0 <= x <= MAX_ARG):
        raise ValueError(f"argument must lie in [0, {MAX_ARG}], got {x!r}")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= SERIES_LIMIT:
        return _series(n, x)
    return _miller(n, x)


@dataclass(frozen=True)
class BesselZero:
    order: int
    index: int
    value: float
    residual: float


@lru_cache(maxsize=None)
def bessel_zero_entry(n: int, k: int) -> BesselZero:
    if not (0 <= n <= MAX_ORDER and 1 <= k <= 10):
        raise ValueError(f"need 0 <= n <= {MAX_ORDER} and 1 <= k <= 10")
    found = 0
    a = 1.0
    fa = bessel_j(n, a)
    while a < MAX_ARG:
        b = a + 1.0
        fb = bessel_j(n, b)
        if fa == 0.0 or fa * fb < 0.0:
            found += 1
            if found == k:
                break
        a, fa = b, fb
    else:
        raise ValueError(f"no bracket for zero {k} of J_{n} in [1, {MAX_ARG}]")
    if fa == 0.0:
        root = a
    else:
        lo, hi, flo = a, b, fa
        # bisect down to adjacent floats
        while True:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            fm = bessel_j(n, mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        root = 0.5 * (lo + hi)
    return BesselZero(n, k, root, abs(bessel_j(n, root)))


def bessel_zero(n: int, k: int) -> float:
    """k-th positive zero of J_n."""
    return bessel_zero_entry(n, k).value


DISC_QUANTITIES = ("dirichlet1", "dirichlet2", "buckling1", "stokes1")


def disc_reference(radius: float, which: str) -> float:
    """First eigenvalues of a disc of the given radius."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if which == "dirichlet1":
        z = bessel_zero(0, 1)
    elif which in ("dirichlet2", "buckling1", "stokes1"):
        z = bessel_zero(1, 1)
    else:
        raise ValueError(f"unknown quantity {which!r}; expected one of {DISC_QUANTITIES}")
    return (z / radius) ** 2


def disc_dirichlet(radius: float, k: int) -> list[float]:
    """The k smallest Dirichlet eigenvalues of a disc, with multiplicity.

    Orders n >= 1 appear twice (cos and sin modes). Only orders up to
    MAX_ORDER are tabulated, which covers k <= 15.
    """
    if not 1 <= k <= 15:
        raise ValueError("k must lie in 1..15")
    vals = []
    for n in range(MAX_ORDER + 1):
        for m in range(1, 6):
            lam = (bessel_zero(n, m) / radius) ** 2
            vals += [lam] if n == 0 else [lam, lam]
    vals.sort()
    # every eigenvalue of order > MAX_ORDER exceeds j_{6,1}^2 > 90
    cutoff = 9.936109524217684 ** 2 / radius**2
    vals = [v for v in vals if v < cutoff]
    if len(vals) < k:
        raise ValueError(f"only {len(vals)} disc eigenvalues are tabulated")
    return vals[:k]


def disc_reference_for_area(area: float, which: str) -> float:
    return disc_reference(math.sqrt(area / math.pi), which)


def rectangle_dirichlet(w: float, h: float, k: int) -> list[float]:
    """The k smallest Dirichlet eigenvalues pi^2 ((m/w)^2 + (n/h)^2)."""
    if w <= 0 or h <= 0:
        raise ValueError("rectangle sides must be positive")
    vals = [
        math.pi**2 * ((m / w) ** 2 + (n / h) ** 2)
        for m in range(1, k + 1)
        for n in range(1, k + 1)
    ]
    return sorted(vals)[:k]
