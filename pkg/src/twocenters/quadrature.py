"""Subsystem cells, oscillation periods and rotation numbers.

On a leaf (g, c) the doubled-chart momenta are

    p_lam^2 = (c cosh^2 lam + 2 cosh lam + g) / 2,
    p_nu^2  = (-c cos^2 nu - 2 delta cos nu - g) / 2,

and the flow of Q moves lam and nu with speeds 4 p_lam and 4 p_nu.  A full
cycle of a subsystem therefore takes  (1/2) int dx / |p|  over a libration
cell, or  int dnu / (4 |p_nu|)  over a rotation.  Turning points are simple
roots, removed by the substitution x = center + halfwidth * sin(theta): the
resulting integrands are analytic on [-pi/2, pi/2].
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np
from scipy.optimize import brentq

from .bifurcation import (EnergyMomentum, Region, classify, family_component, family_interval,
                          solve_roots)
from .errors import CriticalPoint, DegenerateCell, DomainError, InadmissiblePoint, NoRoot
from .params import SystemParams

QUAD_RTOL = 1e-12


class CellKind(str, enum.Enum):
    THROUGH_ORIGIN = "libration-through-origin"  # lam in [-lam2, lam2]
    ONE_SIDED = "libration-one-sided"  # lam in [lam1, lam2], lam1 > 0
    ARC_MOON = "libration-on-arc"  # nu in [-nu2, nu2]
    ARC_EARTH = "libration-through-pi"  # nu in [pi - phi1, pi + phi1]
    ROTATION = "full-rotation"


@dataclass(frozen=True)
class SubsystemCell:
    which: str  # 'lambda' or 'nu'
    kind: CellKind
    lo: float  # cell endpoints in lam or nu (rotation: -pi, pi)
    hi: float
    turning_values: tuple  # endpoints in xi or eta
    point: EnergyMomentum = field(repr=False)
    delta: float = field(repr=False)

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def halfwidth(self) -> float:
        return 0.5 * (self.hi - self.lo)

    @property
    def libration(self) -> bool:
        return self.kind is not CellKind.ROTATION

    def position(self, u: float) -> float:
        """Coordinate at relative position u in [-1, 1] (exact endpoints at u = +-1)."""
        if u == 1.0:
            return self.hi
        if u == -1.0:
            return self.lo
        return self.center + self.halfwidth * u

    def momentum_squared(self, x):
        g, c = self.point.g, self.point.c
        if self.which == "lambda":
            ch = np.cosh(x)
            return 0.5 * (c * ch * ch + 2.0 * ch + g)
        cs = np.cos(x)
        return 0.5 * (-c * cs * cs - 2.0 * self.delta * cs - g)

    @cached_property
    def period(self) -> float:
        return cell_period(self)


def subsystem_cells(point: EnergyMomentum, params: SystemParams, component: str | None = None):
    """The lam- and nu-cells of the torus over a regular value.

    ``component`` ('earth' or 'moon') selects the torus in the S region and
    defaults to the Earth torus there; it is ignored in the L and P regions.
    """
    label = classify(point, params)
    if label.kind in (Region.ON_CURVE, Region.SADDLE_VALUE):
        raise CriticalPoint(f"(g, c) = ({point.g!r}, {point.c!r}) is a critical value ({label.text})")
    if label.kind is Region.FORBIDDEN:
        raise InadmissiblePoint(f"(g, c) = ({point.g!r}, {point.c!r}) is not accessible")
    roots = solve_roots(point, params)
    xi_lo, xi_hi = roots.xi_range
    if xi_lo == 1.0:
        lam2 = math.acosh(xi_hi)
        lam_cell = SubsystemCell("lambda", CellKind.THROUGH_ORIGIN, -lam2, lam2, (1.0, xi_hi), point, params.delta)
    else:
        lam_cell = SubsystemCell("lambda", CellKind.ONE_SIDED, math.acosh(xi_lo), math.acosh(xi_hi),
                                 (xi_lo, xi_hi), point, params.delta)

    if label.kind in (Region.L, Region.P):
        nu_cell = SubsystemCell("nu", CellKind.ROTATION, -math.pi, math.pi, (-1.0, 1.0), point, params.delta)
    else:
        comp = component or (label.component_hint if label.component_hint in ("earth", "moon") else "earth")
        if comp not in ("earth", "moon"):
            raise DomainError(f"unknown component {component!r}")
        if label.kind is Region.SPRIME and comp == "moon":
            raise InadmissiblePoint("no Moon torus in the S' region")
        e1, e2 = roots.eta_roots
        if comp == "earth":
            phi1 = math.acos(-e1)
            nu_cell = SubsystemCell("nu", CellKind.ARC_EARTH, math.pi - phi1, math.pi + phi1, (-1.0, e1),
                                    point, params.delta)
        else:
            nu2 = math.acos(e2)
            nu_cell = SubsystemCell("nu", CellKind.ARC_MOON, -nu2, nu2, (e2, 1.0), point, params.delta)
    return lam_cell, nu_cell


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _gl(fun, a, b):
    m, r = 0.5 * (a + b), 0.5 * (b - a)
    return r * float(np.dot(_GL_WEIGHTS, fun(m + r * _GL_NODES)))


def adaptive_gauss_legendre(fun, a, b, rtol=QUAD_RTOL, max_depth=40):
    """Integrate a vectorized ``fun`` over [a, b] by recursive bisection.

    A panel is accepted when the 20-point rule and its two halves agree to
    ``rtol`` relative to the running total.
    """
    whole = _gl(fun, a, b)
    total_scale = abs(whole)
    stack = [(a, b, whole, 0)]
    result = 0.0
    while stack:
        lo, hi, est, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _gl(fun, lo, mid), _gl(fun, mid, hi)
        refined = left + right
        if abs(refined - est) <= rtol * max(total_scale, 1e-300) or depth >= max_depth:
            result += refined
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return result


def _shc(x):
    """sinh(x)/x, stable at 0."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    big = np.abs(x) > 1e-4
    out[big] = np.sinh(x[big]) / x[big]
    xs = x[~big]
    out[~big] = 1.0 + xs * xs / 6.0
    return out


def _snc(x):
    """sin(x)/x, stable at 0."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    big = np.abs(x) > 1e-4
    out[big] = np.sin(x[big]) / x[big]
    xs = x[~big]
    out[~big] = 1.0 - xs * xs / 6.0
    return out


def cell_integrand(cell: SubsystemCell):
    """The smooth integrand on theta in [-pi/2, pi/2] (rotation: nu in [-pi, pi])."""
    g, c, d = cell.point.g, cell.point.c, cell.delta
    w = cell.halfwidth
    kind = cell.kind
    if kind is CellKind.THROUGH_ORIGIN:
        xi1 = solve_roots_pair(1.0, g, c)[0]

        def f(th):
            s = np.sin(th)
            lam = w * s
            return 1.0 / np.sqrt(-c * (np.cosh(lam) - xi1) * _shc(0.5 * w * (1 + s)) * _shc(0.5 * w * (1 - s)))
    elif kind is CellKind.ONE_SIDED:
        lam1, lam2 = cell.lo, cell.hi

        def f(th):
            s = np.sin(th)
            lam = cell.center + w * s
            return 1.0 / np.sqrt(-2.0 * c * np.sinh(0.5 * (lam + lam1)) * np.sinh(0.5 * (lam + lam2))
                                 * _shc(0.5 * w * (1 + s)) * _shc(0.5 * w * (1 - s)))
    elif kind is CellKind.ARC_MOON:
        eta1 = solve_roots_pair(d, g, c)[0]

        def f(th):
            s = np.sin(th)
            eta = np.cos(w * s)
            return 1.0 / np.sqrt(-c * (eta - eta1) * _snc(0.5 * w * (1 + s)) * _snc(0.5 * w * (1 - s)))
    elif kind is CellKind.ARC_EARTH:
        eta2 = solve_roots_pair(d, g, c)[1]

        def f(th):
            s = np.sin(th)
            eta = -np.cos(w * s)
            return 1.0 / np.sqrt(-c * (eta2 - eta) * _snc(0.5 * w * (1 + s)) * _snc(0.5 * w * (1 - s)))
    else:
        roots = solve_roots_pair(d, g, c)
        if roots is None:
            center = -d / c
            disc = (g * c - d * d) / (c * c)

            def f(nu):
                eta = np.cos(nu)
                return 0.25 / np.sqrt(-0.5 * c * ((eta - center) ** 2 + disc))
        else:
            e1, e2 = roots

            def f(nu):
                eta = np.cos(nu)
                return 0.25 / np.sqrt(-0.5 * c * (eta - e1) * (eta - e2))
    return f


def solve_roots_pair(b, g, c):
    disc = b * b - g * c
    if disc < 0.0:
        return None
    r2 = (-b - math.sqrt(disc)) / c
    return (g / (c * r2) if r2 != 0.0 else 0.0, r2)


def cell_period(cell: SubsystemCell, rtol: float = QUAD_RTOL) -> float:
    """Time in s for one full cycle of the subsystem."""
    if cell.libration and not cell.halfwidth > 0.0:
        raise DegenerateCell(f"{cell.which}-cell has zero width")
    f = cell_integrand(cell)
    if cell.kind is CellKind.ROTATION:
        value = adaptive_gauss_legendre(f, -math.pi, math.pi, rtol)
    else:
        value = adaptive_gauss_legendre(f, -0.5 * math.pi, 0.5 * math.pi, rtol)
    if not (math.isfinite(value) and value > 0.0):
        raise DegenerateCell(f"{cell.which}-period is not finite ({value!r})")
    return value


def harmonic_period_lambda(c: float) -> float:
    """Small-oscillation lam-period about cosh lam = -1/c (the elliptic orbit)."""
    return math.pi / math.sqrt(2.0 * (c * c - 1.0) / c)


# ---------------------------------------------------------------------------
# rotation numbers and families


@dataclass(frozen=True)
class RotationNumber:
    value: float
    point: EnergyMomentum
    t_lambda: float
    t_nu: float
    component: str | None = None


def rotation_number(point: EnergyMomentum, params: SystemParams, component: str | None = None) -> RotationNumber:
    """R = T_nu / T_lam, both periods of full doubled-chart cycles."""
    lam_cell, nu_cell = subsystem_cells(point, params, component)
    t_lam, t_nu = lam_cell.period, nu_cell.period
    comp = component if nu_cell.kind in (CellKind.ARC_EARTH, CellKind.ARC_MOON) else None
    if comp is None and nu_cell.kind is CellKind.ARC_EARTH:
        comp = "earth"
    return RotationNumber(t_nu / t_lam, point, t_lam, t_nu, comp)


@dataclass
class TorusFamily:
    k: int
    l: int
    family: str
    samples: list  # (g, c, residual)
    notes: list = field(default_factory=list)

    def rows(self):
        return [(self.k, self.l, c, g, res) for g, c, res in self.samples]


def _rotation_of_g(c, params, component):
    def fun(g):
        return rotation_number(EnergyMomentum(g, c), params, component).value
    return fun


def solve_family(k: int, l: int, params: SystemParams, c_grid, family: str | None = None,
                 n_scan: int = 64, margin: float = 1e-6, residual_tol: float = 1e-10) -> TorusFamily:
    """Tori with R(g, c) = k/l along each energy of ``c_grid``.

    ``family`` names a torus family of the molecule ('earth', 'moon', 'L',
    'P'); by default the Earth family.  Energies where no root is bracketed or
    the residual exceeds ``residual_tol`` are skipped with a note.
    """
    k, l = int(k), int(l)
    if k <= 0 or l <= 0 or gcd(k, l) != 1:
        raise DomainError(f"(k, l) = ({k}, {l}) must be coprime positive integers")
    family = family or "earth"
    component = family_component(family)
    target = k / l
    out = TorusFamily(k, l, family, [])
    for c in c_grid:
        c = float(c)
        try:
            lo, hi = family_interval(c, params, family)
        except Exception as exc:  # BandEdge or missing family
            out.notes.append(f"c={c!r}: {exc}")
            continue
        w = hi - lo
        gs = lo + w * (margin + (1.0 - 2.0 * margin) * (np.arange(n_scan) + 0.5) / n_scan)
        fun = _rotation_of_g(c, params, component)
        try:
            vals = np.array([fun(g) for g in gs]) - target
        except CriticalPoint as exc:
            out.notes.append(f"c={c!r}: {exc}")
            continue
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
        if idx.size == 0:
            out.notes.append(f"c={c!r}: no root of R = {k}/{l} (R in [{vals.min() + target:.6g}, "
                             f"{vals.max() + target:.6g}])")
            continue
        i = int(idx[0])
        g = brentq(lambda x: fun(x) - target, gs[i], gs[i + 1], xtol=1e-15, rtol=1e-15, maxiter=200)
        res = abs(fun(g) - target)
        if res > residual_tol:
            out.notes.append(f"c={c!r}: residual {res:.3g} above {residual_tol:g}")
            continue
        out.samples.append((g, c, res))
    return out


def family_point(k: int, l: int, c: float, params: SystemParams, family: str | None = None) -> EnergyMomentum:
    fam = solve_family(k, l, params, [c], family)
    if not fam.samples:
        raise NoRoot("; ".join(fam.notes) or f"no T_{k},{l} torus at c = {c!r}")
    g, c, _ = fam.samples[0]
    return EnergyMomentum(g, c)


def write_family_csv(families, path_or_file):
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        fh = open(path_or_file, "w", newline="")
        close = True
    else:
        fh = path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "l", "c", "g", "residual"])
        for fam in families:
            for row in fam.rows():
                w.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4])])
    finally:
        if close:
            fh.close()
