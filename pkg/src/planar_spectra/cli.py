"""Command-line interface.

Subcommands: ``spectrum``, ``verify``, ``optimize``, ``convergence`` and
``replay``. Every run writes one JSON report holding the schema version,
the fully resolved configuration, the results and a footer with the
aggregate verdict. Exit codes: 0 pass, 1 a check failed, 2 bad
configuration, 3 solver failure, 4 optimizer did not converge.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import oracle, shapeopt, spectra, verify
from .eigensolve import ConvergenceError, FactorizationError, TopologyError
from .geometry import DomainSpec, GeometryError, normalize_area

log = logging.getLogger("planar_spectra")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SOLVER, EXIT_NOCONV = 0, 1, 2, 3, 4
COMMANDS = ("spectrum", "verify", "optimize", "convergence", "replay")
DOMAINS = ("disc", "ellipse", "rectangle", "annulus", "star", "fourier_star")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "spectrum"
    domain: str | None = None
    radius: float = 1.0
    a: float = 2.0
    b: float = 1.0
    w: float = 1.0
    h: float = 1.0
    inner: float = 0.5
    outer: float = 1.0
    base_radius: float = 1.0
    cos: str = ""
    sin: str = ""
    area: float | None = None
    problem: str = "dirichlet"
    level: int = 4
    k: int = 1
    check: str = "all"
    all_gallery: bool = False
    expect: str = "auto"
    nu: float = 1.0
    objective: str = "stokes1"
    modes: int = 4
    start: str = "a2=0.1"
    max_evals: int = 400
    final_level: int | None = None
    levels: str = "2-5"
    thresholds: dict = field(default_factory=dict)
    seed: int = 0
    timing: bool = True

    def echo(self) -> dict:
        """Resolved configuration, as embedded in reports (output paths excluded)."""
        return asdict(self)


_INT = ("level", "k", "modes", "max_evals", "final_level", "seed")
_FLOAT = ("radius", "a", "b", "w", "h", "inner", "outer", "base_radius", "area", "nu")
_BOOL = ("all_gallery", "timing")


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in _INT:
            return int(value)
        if key in _FLOAT:
            v = float(value)
            if not math.isfinite(v):
                raise ValueError
            return v
        if key in _BOOL:
            if isinstance(value, bool):
                return value
            s = str(value).strip().lower()
            if s not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return s in ("true", "1", "yes")
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {value!r} for {key}") from None
    return value


def parse_thresholds(items) -> dict:
    out = {}
    for item in items or []:
        if isinstance(item, dict):
            out.update(item)
            continue
        for part in str(item).split(","):
            if not part.strip():
                continue
            name, sep, val = part.partition("=")
            if not sep:
                raise ConfigError(f"threshold override {part!r} must look like name=value")
            name = name.strip()
            if name not in verify.DEFAULT_THRESHOLDS:
                raise ConfigError(f"unknown threshold {name!r}")
            try:
                out[name] = float(val)
            except ValueError:
                raise ConfigError(f"threshold {name} needs a number, got {val!r}") from None
    return out


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys use flag names."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values, thresholds = {}, []
    names = {f.name for f in fields(RunConfig)}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ConfigError(f"{path}:{n}: expected key = value")
        if key == "threshold":
            thresholds.append(val.strip())
        elif key not in names or key == "thresholds":
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        else:
            values[key] = val.strip()
    if thresholds:
        values["thresholds"] = parse_thresholds(thresholds)
    return values


def resolve(command: str, file_values: dict, flag_values: dict) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    cfg = RunConfig(command=command)
    merged = {**file_values, **{k: v for k, v in flag_values.items() if v is not None}}
    thr = dict(file_values.get("thresholds", {}))
    thr.update(flag_values.get("thresholds") or {})
    for key, val in merged.items():
        if key in ("thresholds", "command"):
            continue
        setattr(cfg, key, _coerce(key, val))
    cfg.thresholds = thr
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    if cfg.domain is not None and cfg.domain not in DOMAINS:
        raise ConfigError(f"--domain must be one of {', '.join(DOMAINS)}")
    if cfg.problem not in spectra.PROBLEMS:
        raise ConfigError(f"--problem must be one of {', '.join(spectra.PROBLEMS)}")
    if not 0 <= cfg.level <= 8:
        raise ConfigError("--level must lie in 0..8")
    if cfg.k < 1:
        raise ConfigError("--k must be at least 1")
    if cfg.check != "all" and cfg.check not in verify.CHECKS:
        raise ConfigError(f"--check must be 'all' or one of {', '.join(verify.CHECKS)}")
    if cfg.expect not in ("auto", "disc", "nondisc"):
        raise ConfigError("--expect must be auto, disc or nondisc")
    if cfg.objective not in shapeopt.OBJECTIVES:
        raise ConfigError(f"--objective must be one of {', '.join(shapeopt.OBJECTIVES)}")
    if not 2 <= cfg.modes <= shapeopt.MAX_MODES:
        raise ConfigError(f"--modes must lie in 2..{shapeopt.MAX_MODES}")
    if cfg.max_evals < 1:
        raise ConfigError("--max-evals must be positive")
    if not cfg.nu > 0:
        raise ConfigError("--nu must be positive")
    parse_levels(cfg.levels)
    try:
        verify.thresholds(cfg.thresholds)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


def parse_levels(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
            levels = list(range(lo, hi + 1))
        else:
            levels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--levels must look like 2-5 or 2,3,4; got {text!r}") from None
    if len(levels) < 2 or any(not 0 <= L <= 8 for L in levels):
        raise ConfigError("--levels needs at least two levels in 0..8")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("--levels must be strictly increasing")
    return levels


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad coefficient list {text!r}") from None


def domain_spec(cfg: RunConfig) -> DomainSpec:
    kind = cfg.domain or "disc"
    if kind == "disc":
        spec = DomainSpec.disc(cfg.radius, cfg.area)
    elif kind == "ellipse":
        spec = DomainSpec.ellipse(cfg.a, cfg.b, cfg.area)
    elif kind == "rectangle":
        spec = DomainSpec.rectangle(cfg.w, cfg.h, cfg.area)
    elif kind == "annulus":
        spec = DomainSpec.annulus(cfg.inner, cfg.outer, cfg.area)
    else:
        spec = DomainSpec.fourier_star(cfg.base_radius, _floats(cfg.cos), _floats(cfg.sin), cfg.area)
    return normalize_area(spec)


# ----------------------------------------------------------------------
# report plumbing


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, DomainSpec):
        return _jsonable(asdict(x))
    return x


def make_report(cfg: RunConfig, body: dict, passed: bool, exit_code: int, seconds: float) -> dict:
    footer = {"pass": bool(passed), "exit_code": int(exit_code)}
    footer["timing"] = {"wall_seconds": round(seconds, 3)} if cfg.timing else None
    return _jsonable(
        {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config": cfg.echo(), "body": body, "footer": footer}
    )


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path: str, text: str):
    """Write through a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    umask = os.umask(0)
    os.umask(umask)
    try:
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_table(path: str, header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    write_atomic(path, buf.getvalue())


def comparable(report: dict) -> dict:
    """Report with wall-clock timing removed."""
    r = json.loads(json.dumps(report))
    r.get("footer", {}).pop("timing", None)
    return r


# ----------------------------------------------------------------------
# commands


def _oracle(spec: DomainSpec, problem: str, k: int):
    """Closed-form eigenvalues when available, else None."""
    if spec.kind == "disc":
        R = spec.lengths[0]
        if problem == "dirichlet" and k <= 15:
            return oracle.disc_dirichlet(R, k), "oracle:bessel"
        if problem in ("buckling", "stokes") and k == 1:
            return [oracle.disc_reference(R, "buckling1")], "oracle:bessel"
    if spec.kind == "rectangle" and problem == "dirichlet":
        w, h = spec.lengths
        return oracle.rectangle_dirichlet(w, h, k), "oracle:separation-of-variables"
    return None, None


def cmd_spectrum(cfg: RunConfig, plot: str | None = None, table: str | None = None):
    spec = domain_spec(cfg)
    res = spectra.solve(cfg.problem, spec, cfg.level, cfg.k, cfg.seed)
    ref, prov = _oracle(spec, cfg.problem, cfg.k)
    records = []
    for i, p in enumerate(res.eigenpairs):
        rec = {"index": i + 1, "lambda": p.lam, "residual": p.residual}
        if ref is not None:
            rec.update(reference=ref[i], provenance=prov, relative_error=p.lam / ref[i] - 1.0)
        records.append(rec)
    body = {
        "domain": spec,
        "problem": cfg.problem,
        "level": cfg.level,
        "mesh": {"vertices": res.mesh.nv, "triangles": res.mesh.nt},
        "ndofs": res.history["ndofs"],
        "eigenpairs": records,
    }
    if "divergence_residuals" in res.history:
        body["divergence_residuals"] = res.history["divergence_residuals"]
    if table:
        write_table(table, ["index", "lambda", "residual", "reference", "relative_error"],
                    [[r["index"], r["lambda"], r["residual"], r.get("reference", ""), r.get("relative_error", "")]
                     for r in records])
    if plot:
        plot_result(res, plot)
    return body, True


def cmd_verify(cfg: RunConfig):
    names = verify.CHECKS if cfg.check == "all" else (cfg.check,)
    if cfg.all_gallery or cfg.domain is None:
        specs = verify.gallery()
    else:
        specs = {cfg.domain: domain_spec(cfg)}
        for name in names:
            if not verify.applicable(name, specs[cfg.domain]):
                raise ConfigError(f"check {name!r} needs a simply connected domain")
    reports = []
    for name in names:
        for key, spec in specs.items():
            if not verify.applicable(name, spec):
                continue
            rep = verify.run_check(name, spec, cfg.level, cfg.thresholds, cfg.expect, cfg.nu)
            d = rep.to_dict()
            d["gallery_key"] = key
            reports.append(d)
            log.info("%s", rep.line())
    ok = all(r["pass"] for r in reports)
    return {"level": cfg.level, "checks": reports, "n_checks": len(reports),
            "n_failed": sum(not r["pass"] for r in reports)}, ok


def cmd_optimize(cfg: RunConfig, table: str | None = None):
    try:
        p0 = shapeopt.ShapeParams.parse(cfg.start, cfg.modes)
        p0.spec().validate()
        if p0.cos_coeffs[0] or p0.sin_coeffs[0]:
            raise ValueError("mode-1 coefficients only translate the shape and are fixed at zero")
    except (ValueError, GeometryError) as exc:
        raise ConfigError(f"invalid --start: {exc}") from exc
    area = cfg.area if cfg.area is not None else math.pi
    opts = shapeopt.OptOptions(objective=cfg.objective, level=cfg.level, modes=cfg.modes,
                               max_evals=cfg.max_evals, area=area, final_level=cfg.final_level)
    traj = shapeopt.minimize(p0, opts)
    m = cfg.modes
    header = ["iteration", *[f"a{k}" for k in range(1, m + 1)], *[f"b{k}" for k in range(1, m + 1)], "lambda", "gap"]
    if table:
        write_table(table, header, traj.table())
    cert = shapeopt.optimality_certificate(traj.final.params, cfg.level, area, cfg.thresholds)
    body = {
        "objective": cfg.objective,
        "converged": traj.converged,
        "message": traj.message,
        "evaluations": traj.n_evals,
        "reference": traj.reference,
        "reference_provenance": "oracle:bessel",
        "final": {
            "cos_coeffs": traj.final.params.cos_coeffs,
            "sin_coeffs": traj.final.params.sin_coeffs,
            "max_abs_coeff": traj.final.params.max_abs(),
            "lambda": traj.final.lam,
            "gap": traj.final.gap,
            "relative_gap": traj.final.gap / traj.reference,
        },
        "trajectory": {"columns": header, "rows": traj.table()},
        "certificate": cert.to_dict(),
    }
    if traj.final_level_value is not None:
        body["final_level"] = {"level": cfg.final_level, "lambda": traj.final_level_value.lam,
                               "gap": traj.final_level_value.gap}
    return body, traj.converged and cert.passed, traj.converged


def cmd_convergence(cfg: RunConfig, table: str | None = None):
    spec = domain_spec(cfg)
    levels = parse_levels(cfg.levels)
    idx = cfg.k - 1
    ref, prov = _oracle(spec, cfg.problem, cfg.k)
    rows = []
    for L in levels:
        lam = spectra.solve(cfg.problem, spec, L, cfg.k, cfg.seed).eigenvalues[idx]
        rows.append({"level": L, "lambda": lam})
    if ref is not None:
        for r in rows:
            r["error"] = r["lambda"] - ref[idx]
    else:
        # no closed form: successive differences stand in for the error
        for a, b in zip(rows, rows[1:]):
            a["error"] = a["lambda"] - b["lambda"]
    errs = [r.get("error") for r in rows]
    # each refinement halves h, so the order over a pair sits on the finer level
    for i in range(1, len(rows)):
        prev, cur = errs[i - 1], errs[i]
        if prev and cur:
            steps = rows[i]["level"] - rows[i - 1]["level"]
            rows[i]["observed_order"] = math.log2(abs(prev / cur)) / steps
    known = [abs(e) for e in errs if e is not None]
    monotone = all(b < a for a, b in zip(known, known[1:]))
    if table:
        write_table(table, ["level", "lambda", "error", "observed_order"],
                    [[r["level"], r["lambda"], r.get("error", ""), r.get("observed_order", "")] for r in rows])
    body = {"domain": spec, "problem": cfg.problem, "k": cfg.k, "reference": None if ref is None else ref[idx],
            "provenance": prov or "self-convergence", "rows": rows, "monotone_error_decrease": monotone}
    return body, monotone


# ----------------------------------------------------------------------
# plotting


def plot_result(res, path: str):
    """Colour-mapped first eigenfield and its boundary trace as SVG."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.tri import Triangulation

    from . import fem

    mesh = res.mesh
    f = res.fields[0]
    if res.problem == "dirichlet":
        field_, label = f["u"], "u"
    elif res.problem == "buckling":
        field_, label = f["w"], "Laplacian of psi"
    else:
        field_, label = spectra.vorticity(f["u"]), "vorticity"
    vals = field_.values[: mesh.nv]
    tri = Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.triangles)
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 4))
    tpc = ax0.tripcolor(tri, vals, shading="gouraud", cmap="viridis")
    fig.colorbar(tpc, ax=ax0)
    ax0.set_aspect("equal")
    ax0.set_title(f"{res.problem}: {label}, lambda={res.eigenvalues[0]:.6g}")
    tr = fem.boundary_trace(field_)
    for c in np.unique(tr.component):
        sel = tr.component == c
        ax1.plot(tr.s[sel], tr.values[sel], lw=1, label=f"loop {c}")
    ax1.set_xlabel("arc length")
    ax1.set_title("boundary trace")
    ax1.legend()
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    write_atomic(path, buf.getvalue())


# ----------------------------------------------------------------------
# argument parsing


def _add_common(p):
    g = p.add_argument_group("domain")
    g.add_argument("--domain", choices=DOMAINS)
    g.add_argument("--radius", type=float)
    g.add_argument("--a", type=float, help="ellipse semi-axis along x")
    g.add_argument("--b", type=float, help="ellipse semi-axis along y")
    g.add_argument("--w", type=float, help="rectangle width")
    g.add_argument("--h", type=float, help="rectangle height")
    g.add_argument("--inner", type=float, help="annulus inner radius")
    g.add_argument("--outer", type=float, help="annulus outer radius")
    g.add_argument("--base-radius", dest="base_radius", type=float)
    g.add_argument("--cos", help="star cosine coefficients a1,a2,...")
    g.add_argument("--sin", help="star sine coefficients b1,b2,...")
    g.add_argument("--area", type=float, help="target area (default: natural size)")
    p.add_argument("--level", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold", action="append", dest="thresholds", metavar="NAME=VALUE")
    p.add_argument("--config", help="key = value file; explicit flags take precedence")
    p.add_argument("--output", "-o", help="report path (default: stdout)")
    p.add_argument("--no-timing", dest="timing", action="store_const", const=False,
                   help="leave wall-clock time out of the report footer")
    p.add_argument("--verbose", "-v", action="store_true")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="planar-spectra", description=__doc__.split("\n")[0], allow_abbrev=False)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="smallest eigenvalues of one problem", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--problem", choices=spectra.PROBLEMS)
    p.add_argument("--plot", help="SVG file for the first eigenfield")
    p.add_argument("--table", help="CSV file of eigenvalues")

    p = sub.add_parser("verify", help="run identity and inequality checks", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--check", choices=("all",) + verify.CHECKS)
    p.add_argument("--all-gallery", dest="all_gallery", action="store_const", const=True)
    p.add_argument("--expect", choices=("auto", "disc", "nondisc"))
    p.add_argument("--nu", type=float, help="viscosity for the cellular-flow decay rate")

    p = sub.add_parser("optimize", help="minimize an eigenvalue over Fourier stars", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--objective", choices=tuple(shapeopt.OBJECTIVES))
    p.add_argument("--modes", type=int)
    p.add_argument("--start", help="e.g. a2=0.1,b3=0.05, or 'none' for the disc")
    p.add_argument("--max-evals", dest="max_evals", type=int)
    p.add_argument("--final-level", dest="final_level", type=int)
    p.add_argument("--table", help="CSV trajectory file")

    p = sub.add_parser("convergence", help="eigenvalue error over a range of levels", allow_abbrev=False)
    _add_common(p)
    p.add_argument("--problem", choices=spectra.PROBLEMS)
    p.add_argument("--levels", help="e.g. 2-5")
    p.add_argument("--table", help="CSV file of the sweep")

    p = sub.add_parser("replay", help="re-run the configuration embedded in a report", allow_abbrev=False)
    p.add_argument("report")
    p.add_argument("--output", "-o")
    p.add_argument("--compare", action="store_true", help="exit 1 unless the new report matches (timing aside)")
    p.add_argument("--verbose", "-v", action="store_true")
    return ap


_NOT_CONFIG = ("config", "output", "plot", "table", "verbose", "command", "report", "compare")


def run(cfg: RunConfig, plot=None, table=None):
    """Execute a resolved configuration; returns ``(report, exit_code)``."""
    t0 = time.perf_counter()
    converged = True
    if cfg.command == "spectrum":
        body, ok = cmd_spectrum(cfg, plot, table)
    elif cfg.command == "verify":
        body, ok = cmd_verify(cfg)
    elif cfg.command == "optimize":
        body, ok, converged = cmd_optimize(cfg, table)
    elif cfg.command == "convergence":
        body, ok = cmd_convergence(cfg, table)
    else:
        raise ConfigError(f"unknown command {cfg.command!r}")
    code = EXIT_OK if ok else (EXIT_NOCONV if not converged else EXIT_FAIL)
    return make_report(cfg, body, ok, code, time.perf_counter() - t0), code


def _emit(report, output):
    text = dumps(report)
    if output:
        write_atomic(output, text)
    else:
        sys.stdout.write(text)


def _config_from_report(path: str) -> RunConfig:
    try:
        rep = json.load(open(path, encoding="utf-8"))
        if rep.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema version {rep.get('schema_version')!r}")
        cfg = RunConfig(**rep["config"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot replay {path}: {exc}") from exc
    validate(cfg)
    return cfg, rep


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            cfg, original = _config_from_report(args.report)
            report, code = run(cfg)
            _emit(report, args.output)
            if args.compare and comparable(report) != comparable(original):
                print("replayed report differs from the original", file=sys.stderr)
                return EXIT_FAIL
            return code
        flags = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
        flags["thresholds"] = parse_thresholds(flags.get("thresholds"))
        file_values = read_config_file(args.config) if args.config else {}
        cfg = resolve(args.command, file_values, flags)
        report, code = run(cfg, getattr(args, "plot", None), getattr(args, "table", None))
        _emit(report, args.output)
        return code
    except (ConfigError, GeometryError, TopologyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FactorizationError, ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
