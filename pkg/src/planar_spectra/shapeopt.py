"""Area-constrained minimization of low eigenvalues over Fourier stars.

The boundary is ``r(theta) = R (1 + sum_k a_k cos k theta + b_k sin k theta)``
with ``R`` fixed by the area constraint, so the objective only depends on
the shape coefficients. The disc (all coefficients zero) should come out
as the minimizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import spectra
from .geometry import DomainSpec, GeometryError
from .oracle import disc_reference_for_area

# Both objectives share the disc value j11^2 / R^2. The second Dirichlet
# eigenvalue is deliberately absent: the disc does not minimize it (its
# double eigenvalue splits at first order under a cos 2 theta perturbation).
OBJECTIVES = {"stokes1": "stokes", "buckling1": "buckling"}
MAX_MODES = 8


@dataclass(frozen=True)
class ShapeParams:
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        for c in (self.cos_coeffs, self.sin_coeffs):
            if len(c) > MAX_MODES:
                raise ValueError(f"at most {MAX_MODES} modes are supported")
            if not all(math.isfinite(x) for x in c):
                raise ValueError("shape coefficients must be finite")

    @classmethod
    def zeros(cls, m: int) -> "ShapeParams":
        return cls((0.0,) * m, (0.0,) * m)

    @property
    def modes(self) -> int:
        return max(len(self.cos_coeffs), len(self.sin_coeffs))

    def padded(self, m: int) -> "ShapeParams":
        if m < self.modes:
            raise ValueError("cannot drop modes")
        a = tuple(self.cos_coeffs) + (0.0,) * (m - len(self.cos_coeffs))
        b = tuple(self.sin_coeffs) + (0.0,) * (m - len(self.sin_coeffs))
        return ShapeParams(a, b)

    def max_abs(self) -> float:
        return max((abs(x) for x in self.cos_coeffs + self.sin_coeffs), default=0.0)

    def rotated(self, phi: float) -> "ShapeParams":
        """Coefficients of the same shape rotated by ``phi``."""
        m = self.padded(self.modes)
        a, b = [], []
        for k, (ak, bk) in enumerate(zip(m.cos_coeffs, m.sin_coeffs), start=1):
            c, s = math.cos(k * phi), math.sin(k * phi)
            a.append(ak * c - bk * s)
            b.append(ak * s + bk * c)
        return ShapeParams(tuple(a), tuple(b))

    def spec(self, area: float = math.pi) -> DomainSpec:
        return DomainSpec.fourier_star(1.0, self.cos_coeffs, self.sin_coeffs, target_area=area)

    @classmethod
    def parse(cls, text: str | None, m: int) -> "ShapeParams":
        """Parse ``"a2=0.1,b3=-0.05"``; ``None``/``"none"``/``""`` give the disc."""
        a = [0.0] * m
        b = [0.0] * m
        if text and text.strip().lower() != "none":
            for item in text.split(","):
                key, _, val = item.partition("=")
                key = key.strip().lower()
                if not val or key[:1] not in ("a", "b") or not key[1:].isdigit():
                    raise ValueError(f"bad start coefficient {item!r}; expected e.g. a2=0.1")
                k = int(key[1:])
                if not 1 <= k <= m:
                    raise ValueError(f"mode {k} outside 1..{m}")
                (a if key[0] == "a" else b)[k - 1] = float(val)
        return cls(tuple(a), tuple(b))


def evaluate_objective(params: ShapeParams, objective: str = "stokes1", level: int = 3,
                       area: float = math.pi) -> tuple[float, float]:
    """``(lam, gap)`` with ``gap = lam - lam(disc of the same area)``.

    Invalid shapes give ``(inf, inf)``.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {sorted(OBJECTIVES)}")
    problem = OBJECTIVES[objective]
    try:
        spec = params.spec(area).validate()
    except GeometryError:
        return math.inf, math.inf
    lam = float(spectra.solve(problem, spec, level, 1).eigenvalues[0])
    ref = disc_reference_for_area(area, objective)
    return lam, lam - ref


@dataclass
class OptOptions:
    objective: str = "stokes1"
    level: int = 3
    modes: int = 4
    xatol: float = 1e-4
    max_evals: int = 400
    initial_step: float | None = None  # default: half the largest start coefficient, at least 10 xatol
    area: float = math.pi
    final_level: int | None = None


@dataclass
class Iterate:
    params: ShapeParams
    lam: float
    gap: float


@dataclass
class OptTrajectory:
    evaluations: list[Iterate] = field(default_factory=list)
    accepted: list[Iterate] = field(default_factory=list)
    converged: bool = False
    message: str = ""
    final: Iterate | None = None
    final_level_value: Iterate | None = None
    reference: float = float("nan")

    @property
    def n_evals(self) -> int:
        return len(self.evaluations)

    @property
    def best(self) -> Iterate:
        return self.accepted[-1] if self.accepted else self.evaluations[0]

    def relative_gap(self) -> float:
        return self.best.gap / self.reference

    def table(self):
        """Rows ``(iteration, a_1..a_m, b_1..b_m, lam, gap)`` over accepted iterates."""
        rows = []
        for i, it in enumerate(self.accepted):
            rows.append([i, *it.params.cos_coeffs, *it.params.sin_coeffs, it.lam, it.gap])
        return rows


def _to_params(x, m):
    # mode 1 is (to first order) a translation, so it stays fixed at zero
    a = (0.0,) + tuple(float(v) for v in x[: m - 1])
    b = (0.0,) + tuple(float(v) for v in x[m - 1 :])
    return ShapeParams(a, b)


def minimize(params0: ShapeParams, opts: OptOptions | None = None) -> OptTrajectory:
    """Nelder-Mead on the eigenvalue gap over modes 2..m.

    Terminates when the simplex is smaller than ``opts.xatol`` in every
    coordinate or after ``opts.max_evals`` objective evaluations.
    """
    opts = opts or OptOptions()
    m = opts.modes
    if not 2 <= m <= MAX_MODES:
        raise ValueError(f"modes must lie in 2..{MAX_MODES}")
    p0 = params0.padded(max(m, params0.modes))
    if p0.modes > m:
        raise ValueError(f"start uses {p0.modes} modes but only {m} are optimized")
    if p0.cos_coeffs[0] or p0.sin_coeffs[0]:
        raise ValueError("mode-1 coefficients are fixed at zero (they only translate the shape)")
    p0.spec(opts.area).validate()

    x0 = np.array(p0.cos_coeffs[1:] + p0.sin_coeffs[1:])
    if opts.objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {opts.objective!r}; expected one of {sorted(OBJECTIVES)}")
    traj = OptTrajectory(reference=disc_reference_for_area(opts.area, opts.objective))
    memo = {}

    def f(x):
        key = tuple(np.round(x, 15))
        if key not in memo:
            p = _to_params(x, m)
            lam, gap = evaluate_objective(p, opts.objective, opts.level, opts.area)
            it = Iterate(p, lam, gap)
            traj.evaluations.append(it)
            memo[key] = it
        return memo[key].gap

    def accept(xk):
        it = memo[tuple(np.round(xk, 15))]
        if not traj.accepted or it.gap < traj.accepted[-1].gap:
            traj.accepted.append(it)

    f(x0)
    accept(x0)
    n = len(x0)
    step = opts.initial_step
    if step is None:
        # the simplex starts at the scale of the perturbation; a start at
        # the disc only needs a small simplex to confirm local optimality
        step = max(0.5 * float(np.abs(x0).max(initial=0.0)), 10 * opts.xatol)
    simplex = np.vstack([x0] + [x0 + step * e for e in np.eye(n)])
    res = _scipy_minimize(
        f, x0, method="Nelder-Mead", callback=accept,
        options=dict(xatol=opts.xatol, fatol=np.inf, maxfev=opts.max_evals, initial_simplex=simplex),
    )
    accept(res.x)
    traj.converged = bool(res.success)
    traj.message = str(res.message)
    traj.final = traj.accepted[-1]
    if opts.final_level is not None:
        lam, gap = evaluate_objective(traj.final.params, opts.objective, opts.final_level, opts.area)
        traj.final_level_value = Iterate(traj.final.params, lam, gap)
    return traj


def optimality_certificate(params: ShapeParams, level: int, area: float = math.pi, thresholds_=None):
    """Boundary-constancy and pressure checks on the shape, both judged against the disc thresholds."""
    from . import verify

    spec = params.spec(area)
    schiffer = verify.check_schiffer_boundary(spec, level, expect="disc", thresholds_=thresholds_)
    pressure = verify.check_pressure_conditions(spec, level, expect="disc", thresholds_=thresholds_)
    ok = schiffer.passed and pressure.passed
    return verify.CheckReport(
        "optimality-certificate", spectra.normalize_area(spec), level,
        max(schiffer.metric, pressure.metric), schiffer.threshold, bool(ok), "<",
        schiffer.reference_values + pressure.reference_values,
        extra_metrics={
            "schiffer": schiffer.to_dict(),
            "pressure": pressure.to_dict(),
        },
    )
