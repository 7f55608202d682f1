"""Command-line front end: ``twocenters <command> [flags]``.

Every command validates its flags before computing and writes its files only
after the computation succeeded.  Errors are reported as a JSON object on
stderr with a nonzero exit status; commands with a verdict exit 0 iff it
passes.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bifurcation, diagram, dynamics, homoclinic, knots, quadrature
from .bifurcation import EnergyMomentum, Region, classify
from .errors import DomainError, InadmissiblePoint, TwoCentersError
from .params import make_params

OUT_ENV = "TWOCENTERS_OUT"

EXIT_FAIL = 1
EXIT_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    mu: float
    tol: float = 1e-12
    quad_tol: float = quadrature.QUAD_RTOL
    eps: float = bifurcation.CLASSIFY_EPS
    out: str = "."
    seed: int = 0
    fmt: str | None = None

    def validate(self):
        if not (0.0 < self.mu < 1.0):
            raise DomainError(f"--mu must lie in (0, 1), got {self.mu!r}")
        for name in ("tol", "quad_tol", "eps"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if self.fmt not in (None, "csv", "json", "svg"):
            raise DomainError(f"unknown format {self.fmt!r}")

    @property
    def params(self):
        return make_params(self.mu)

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def path(self, name: str) -> Path:
        return Path(self.out) / name


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _write_files(files: dict):
    """Write {path: text} atomically (temporary file, then rename)."""
    umask = os.umask(0)
    os.umask(umask)
    for path, text in files.items():
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.chmod(tmp, 0o666 & ~umask)  # mkstemp creates 0600
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _config(args) -> RunConfig:
    out = os.environ.get(OUT_ENV) or args.out
    cfg = RunConfig(mu=args.mu, tol=args.tol, out=out, seed=args.seed, fmt=args.format)
    cfg.validate()
    return cfg


def _require_negative(name, value):
    if not value < 0.0:
        raise DomainError(f"{name} must be negative, got {value!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_diagram(args, cfg: RunConfig):
    g_lo, g_hi = args.g_range
    c_lo, c_hi = args.c_range
    if not (g_lo < g_hi and c_lo < c_hi):
        raise DomainError("ranges must be increasing")
    if c_hi >= 0.0:
        raise DomainError(f"the c-window must lie below 0, got [{c_lo!r}, {c_hi!r}]")
    n = args.resolution
    if n < 2:
        raise DomainError("resolution must be at least 2")
    params = cfg.params
    gs, cs = diagram.grid_axes((g_lo, g_hi), (c_lo, c_hi), n, n)
    labels = diagram.classify_grid(params, gs, cs, cfg.eps)
    files = {}
    if cfg.fmt in (None, "csv"):
        buf = io.StringIO()
        diagram.write_diagram_csv(buf, params, gs, cs, labels)
        files[cfg.path("diagram.csv")] = buf.getvalue()
    if cfg.fmt in (None, "svg"):
        files[cfg.path("diagram.svg")] = diagram.diagram_svg(params, gs, cs, labels, args.size)
    _write_files(files)
    counts = {}
    for row in labels:
        for lab in row:
            counts[lab] = counts.get(lab, 0) + 1
    return {"files": sorted(str(p) for p in files), "label_counts": counts}, True


def cmd_orbit(args, cfg: RunConfig):
    params = cfg.params
    _require_negative("--c", args.c)
    if args.lyapunov:
        orbit = homoclinic.lyapunov_orbit(args.c, params, cfg.tol)
        y0 = orbit.trajectory.y[0]
        traj = dynamics.integrate(y0, params, args.c, args.span, cfg.tol, g=orbit.g_c)
        summary = {"kind": "lyapunov", "g": orbit.g_c, "nu_star": orbit.nu_star,
                   "nu_deviation": float(np.max(np.abs(traj.y[:, 1] - orbit.nu_star)))}
    else:
        if args.g is None:
            raise DomainError("--g is required unless --lyapunov is given")
        point = EnergyMomentum(args.g, args.c)
        label = classify(point, params, eps=cfg.eps)
        if label.kind is Region.FORBIDDEN:
            raise InadmissiblePoint(f"(g, c) = ({args.g!r}, {args.c!r}) lies in the forbidden region")
        if not label.regular:
            raise InadmissiblePoint(f"(g, c) = ({args.g!r}, {args.c!r}) is a critical value ({label.text})")
        y0 = dynamics.initial_state(point, params, tuple(args.phase), tuple(args.signs), args.component)
        traj = dynamics.integrate(y0, params, args.c, args.span, cfg.tol)
        summary = {"kind": "torus", "region": label.text, "g": args.g}
    buf = io.StringIO()
    traj.to_jsonl(buf)
    files = {cfg.path("orbit.jsonl"): buf.getvalue()}
    if cfg.fmt == "svg":
        q1, q2 = traj.cartesian_positions()
        files[cfg.path("orbit.svg")] = diagram.orbit_svg(q1, q2)
    _write_files(files)
    summary.update({"c": args.c, "samples": len(traj), "max_Q": traj.max_q,
                    "max_Q_lambda_drift": traj.max_q_lambda_drift, "files": sorted(str(p) for p in files)})
    return summary, True


def cmd_rotation(args, cfg: RunConfig):
    point = EnergyMomentum(args.g, args.c)
    rot = quadrature.rotation_number(point, cfg.params, args.component)
    label = classify(point, cfg.params, args.component)
    return {"g": args.g, "c": args.c, "region": label.text, "component": rot.component,
            "rotation_number": rot.value, "T_lambda": rot.t_lambda, "T_nu": rot.t_nu}, True


def cmd_family(args, cfg: RunConfig):
    params = cfg.params
    if args.c_list:
        c_grid = [float(c) for c in args.c_list]
    else:
        lo, hi, n = args.c_grid
        c_grid = np.linspace(lo, hi, int(n)).tolist()
    for c in c_grid:
        _require_negative("c", c)
    fam = quadrature.solve_family(args.k, args.l, params, c_grid, args.family)
    buf = io.StringIO()
    quadrature.write_family_csv([fam], buf)
    files = {cfg.path("family.csv"): buf.getvalue()}
    _write_files(files)
    return {"k": fam.k, "l": fam.l, "family": fam.family, "solved": len(fam.samples),
            "requested": len(c_grid), "notes": fam.notes, "files": sorted(str(p) for p in files)}, \
        bool(fam.samples)


def cmd_homoclinic(args, cfg: RunConfig):
    params = cfg.params
    _require_negative("--c", args.c)
    reports = []
    if args.collision:
        for focus in args.collision:
            _, rep = homoclinic.collision_homoclinic(args.c, params, focus, tol=cfg.tol)
            reports.append(dict(rep.to_dict(), focus=focus))
    else:
        rep = homoclinic.verify_homoclinic(args.c, params, args.component, args.orbits, cfg.rng(), tol=cfg.tol)
        reports.append(rep.to_dict())
    ok = all(r["verdict"] == "pass" for r in reports)
    result = reports[0] if len(reports) == 1 else {"reports": reports, "verdict": "pass" if ok else "fail"}
    _write_files({cfg.path("homoclinic.json"): _dumps(result) + "\n"})
    return result, ok


def cmd_molecule(args, cfg: RunConfig):
    graphs = bifurcation.molecule(args.c, cfg.params)
    if cfg.fmt == "json":
        return {"c": args.c, "mu": cfg.params.mu_input, "graphs": [g.to_dict() for g in graphs]}, True
    return "\n".join(g.text() for g in graphs), True


def cmd_knot(args, cfg: RunConfig):
    params = cfg.params
    _require_negative("--c", args.c)
    if args.g is not None:
        point = EnergyMomentum(args.g, args.c)
    else:
        point = quadrature.family_point(args.k, args.l, args.c, params, args.component)
    cert = knots.certify_knot(point, params, args.k, args.l, args.component, tol=cfg.tol)
    result = cert.to_dict()
    _write_files({cfg.path("knot.json"): _dumps(result) + "\n"})
    return result, cert.passed


COMMANDS = {
    "diagram": cmd_diagram,
    "orbit": cmd_orbit,
    "rotation": cmd_rotation,
    "family": cmd_family,
    "homoclinic": cmd_homoclinic,
    "molecule": cmd_molecule,
    "knot": cmd_knot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu", type=float, required=True, help="mass ratio in (0, 1)")
    common.add_argument("--tol", type=float, default=1e-12, help="integrator tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=".", help=f"output directory (overridden by ${OUT_ENV})")
    common.add_argument("--format", choices=["csv", "json", "svg"], default=None)

    p = argparse.ArgumentParser(prog="twocenters", description="Euler problem of two fixed centers")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("diagram", parents=[common], help="classify a (g, c) grid; CSV and SVG")
    s.add_argument("--g-range", type=float, nargs=2, default=(-3.0, 3.0))
    s.add_argument("--c-range", type=float, nargs=2, default=(-3.0, -0.05))
    s.add_argument("--resolution", type=int, default=600)
    s.add_argument("--size", type=int, default=1000)

    s = sub.add_parser("orbit", parents=[common], help="integrate one orbit; JSON lines")
    s.add_argument("--g", type=float)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--span", type=float, default=50.0)
    s.add_argument("--phase", type=float, nargs=2, default=(0.0, 0.0))
    s.add_argument("--signs", type=int, nargs=2, default=(1, 1))
    s.add_argument("--component", choices=["earth", "moon"], default=None)
    s.add_argument("--lyapunov", action="store_true", help="follow the Lyapunov orbit at energy c")

    s = sub.add_parser("rotation", parents=[common], help="rotation number of a torus")
    s.add_argument("--g", type=float, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--component", choices=["earth", "moon"], default=None)

    s = sub.add_parser("family", parents=[common], help="solve R(g, c) = k/l along energies")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--c-grid", type=float, nargs=3, metavar=("C_MIN", "C_MAX", "N"), default=(-2.6, -2.0, 7))
    s.add_argument("--c", dest="c_list", type=float, nargs="+")
    s.add_argument("--family", choices=["earth", "moon", "L", "P"], default=None)

    s = sub.add_parser("homoclinic", parents=[common], help="certify homoclinic leaf orbits")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--component", choices=list(homoclinic.COMPONENTS), default="earth")
    s.add_argument("--orbits", type=int, default=20)
    s.add_argument("--collision", choices=["E", "M"], nargs="+", help="collision orbits from these foci instead")

    s = sub.add_parser("molecule", parents=[common], help="molecule of an energy level")
    s.add_argument("--c", type=float, required=True)

    s = sub.add_parser("knot", parents=[common], help="knot certificate for a T_{k,l} torus (c < cJ)")
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--g", type=float, default=None, help="torus value (default: solve the family)")
    s.add_argument("--component", choices=["earth", "moon"], default="earth")
    return p


def _error(exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
    return EXIT_ERROR


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        result, ok = COMMANDS[args.command](args, cfg)
    except (TwoCentersError, ValueError, OSError) as exc:
        return _error(exc)
    if isinstance(result, str):
        sys.stdout.write(result + "\n")
    else:
        sys.stdout.write(_dumps(result) + "\n")
    return 0 if ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
