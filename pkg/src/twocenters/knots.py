"""Closure of orbits on rational tori and their winding counts.

On a torus with R = T_nu / T_lam = k/l (k, l coprime) the doubled-chart orbit
closes after k lam-cycles and l nu-cycles, at s = k T_lam = l T_nu, and is a
(k, l) torus knot in the regularized level set.  Here k always counts the
lam-cycles and l the nu-cycles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .bifurcation import EnergyMomentum, Region, classify
from .coords import wrap_angle
from .dynamics import Trajectory, initial_state, integrate
from .errors import BandError, InconsistentCounts, NoClosure
from .params import SystemParams
from .quadrature import CellKind, rotation_number, subsystem_cells

CLOSURE_TOL = 1e-6
ROTATION_TOL = 1e-8


def state_distance(a, b) -> np.ndarray:
    """Max-norm distance between doubled states, nu compared on the circle."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    d = np.abs(a - b)
    d[:, 1] = np.abs(wrap_angle(a[:, 1] - b[:, 1]))
    return d.max(axis=1)


@dataclass(frozen=True)
class Closure:
    time: float
    residual: float


def detect_closure(traj: Trajectory, predicted: float, tol: float = CLOSURE_TOL, window: float = 0.05,
                   n_grid: int = 4001) -> Closure:
    """Nearest return to the initial state within predicted*(1 +- window)."""
    y0 = traj.y[0]
    s0 = traj.s[0]
    span_end = traj.s[-1] - s0
    lo = (1.0 - window) * predicted
    hi = min((1.0 + window) * predicted, span_end)
    if hi <= lo:
        raise NoClosure(f"trajectory (length {span_end:.6g}) does not reach the closure window around {predicted:.6g}")
    grid = np.linspace(lo, hi, n_grid)
    dist = state_distance(traj.at(s0 + grid), y0)
    i = int(np.argmin(dist))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n_grid - 1)]

    def sq(t):
        v = traj.at(s0 + t)
        d = v - y0
        d[1] = wrap_angle(d[1])
        return float(d @ d)
    res = minimize_scalar(sq, bounds=(a, b), method="bounded", options={"xatol": 1e-14})
    t = float(res.x) if sq(res.x) <= sq(grid[i]) else float(grid[i])
    residual = float(state_distance(traj.at(s0 + t), y0)[0])
    if residual > tol:
        raise NoClosure(f"closest return in [{lo:.6g}, {hi:.6g}] is {residual:.3e} away (tolerance {tol:g})")
    return Closure(t, residual)


@dataclass(frozen=True)
class WindingCounts:
    lambda_cycles: int
    nu_cycles: int
    lambda_angle_cycles: int
    nu_angle_cycles: int

    @property
    def pair(self):
        return self.lambda_cycles, self.nu_cycles


def _phase_winding(x, p, center):
    """Signed number of turns of (x - center, p) around the origin."""
    ang = np.unwrap(np.arctan2(p, x - center))
    return (ang[-1] - ang[0]) / (2.0 * math.pi)


def winding_counts(traj: Trajectory, closure_time: float, lam_cell, nu_cell) -> WindingCounts:
    """Cycle counts of both subsystems over [0, closure_time], by two methods.

    Method 1 counts descending zero crossings of the momenta (rotations: the
    unwrapped nu swept); method 2 measures the turning angle of (x - center, p).
    """
    s0 = traj.s[0]
    t_end = s0 + closure_time
    inside = traj.s <= t_end
    y = np.vstack([traj.y[inside], traj.at(t_end)])

    def crossings(index):
        t = traj.crossings(index, 0.0, -1) - s0
        margin = 1e-9 * max(1.0, closure_time)
        return int(np.count_nonzero((t > margin) & (t < closure_time - margin)))

    lam_cross = crossings(2)
    lam_angle = abs(_phase_winding(y[:, 0], y[:, 2], lam_cell.center))
    if nu_cell.kind is CellKind.ROTATION:
        sweep = abs(y[-1, 1] - y[0, 1]) / (2.0 * math.pi)
        nu_cross = int(round(sweep))
        # angle method for a rotation: winding of (cos nu, sin nu)
        nu_angle = abs(_phase_winding(np.cos(y[:, 1]), np.sin(y[:, 1]), 0.0))
    else:
        nu_cross = crossings(3)
        nu_angle = abs(_phase_winding(y[:, 1], y[:, 3], nu_cell.center))
    counts = WindingCounts(lam_cross, nu_cross, int(round(lam_angle)), int(round(nu_angle)))
    if (counts.lambda_cycles, counts.nu_cycles) != (counts.lambda_angle_cycles, counts.nu_angle_cycles):
        raise InconsistentCounts(f"crossing counts {counts.pair} disagree with angle counts "
                                 f"({counts.lambda_angle_cycles}, {counts.nu_angle_cycles})")
    if max(abs(lam_angle - round(lam_angle)), abs(nu_angle - round(nu_angle))) > 1e-3:
        raise InconsistentCounts(f"winding angles ({lam_angle:.6f}, {nu_angle:.6f}) are not whole turns")
    return counts


@dataclass
class KnotCertificate:
    point: EnergyMomentum
    component: str
    k_observed: int  # lam-cycles
    l_observed: int  # nu-cycles
    rotation_value: float
    closure_time: float
    closure_residual: float
    rotation_residual: float
    phase: tuple = (0.0, 0.0)
    counts: WindingCounts | None = field(default=None, repr=False)

    @property
    def coprime(self) -> bool:
        return math.gcd(self.k_observed, self.l_observed) == 1

    @property
    def passed(self) -> bool:
        return (self.coprime and self.closure_residual <= CLOSURE_TOL
                and self.rotation_residual <= ROTATION_TOL)

    def to_dict(self) -> dict:
        return {
            "g": self.point.g, "c": self.point.c, "component": self.component,
            "k_observed": self.k_observed, "l_observed": self.l_observed,
            "lambda_cycles": self.k_observed, "nu_cycles": self.l_observed,
            "rotation_number": self.rotation_value, "closure_time": self.closure_time,
            "closure_residual": self.closure_residual, "rotation_residual": self.rotation_residual,
            "phase": list(self.phase), "pass": self.passed,
        }


def rational_approximation(value: float, max_denominator: int = 1000) -> Fraction:
    return Fraction(value).limit_denominator(max_denominator)


def certify_knot(point: EnergyMomentum, params: SystemParams, k: int | None = None, l: int | None = None,
                 component: str = "earth", phase=(0.3, 0.2), signs=(1, 1), tol: float = 1e-12,
                 closure_tol: float = CLOSURE_TOL) -> KnotCertificate:
    """Integrate one orbit of the rational torus over (g, c) through its closure.

    Only energies below cJ are accepted: there each component of the
    regularized level set is a 3-sphere with molecule A - A.
    """
    if not point.c < params.cJ:
        raise BandError(f"c = {point.c!r} is not below cJ = {params.cJ!r}")
    label = classify(point, params, component)
    if label.kind not in (Region.S_EARTH, Region.S_MOON, Region.SPRIME):
        raise BandError(f"(g, c) lies in region {label.text}, not on an Earth or Moon torus")
    rot = rotation_number(point, params, component)
    if k is None or l is None:
        frac = rational_approximation(rot.value)
        k, l = frac.numerator, frac.denominator
    predicted = k * rot.t_lambda
    lam_cell, nu_cell = subsystem_cells(point, params, component)
    y0 = initial_state(point, params, phase, signs, component)
    traj = integrate(y0, params, point.c, 1.06 * predicted, tol=tol)
    closure = detect_closure(traj, predicted, closure_tol)
    counts = winding_counts(traj, closure.time, lam_cell, nu_cell)
    k_obs, l_obs = counts.pair
    rot_res = abs(k_obs / l_obs - rot.value) if l_obs else math.inf
    return KnotCertificate(point, component, k_obs, l_obs, rot.value, closure.time, closure.residual,
                           rot_res, tuple(float(x) for x in phase), counts)
