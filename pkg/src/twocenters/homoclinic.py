"""The Lyapunov orbit and its singular leaf.

For c in (cJ, cH) the hyperbolic (Lyapunov) orbit sits at g_c = delta^2/c,
where h has the double root eta* = -delta/c.  With nu* = arccos(eta*), nu is
frozen at +-nu* while lam oscillates through its whole cell.  Every other
orbit on the leaf g_c satisfies

    p_nu = sigma (c cos nu + delta) / sqrt(-2c),   sigma = +-1,

so nu moves monotonically inside (nu*, 2 pi - nu*) (Earth side) or
(-nu*, nu*) (Moon side) and tends to the ends in both time directions: the
leaf orbits are homoclinic to the Lyapunov orbit.  They are integrated with
this first-order nu-equation (integrator.LEAF), which is exact on the leaf and
keeps the equilibrium nu* free of round-off driven escape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import integrator
from .bifurcation import EnergyMomentum
from .dynamics import Trajectory, integrate, q_parts
from .errors import BandError, ExplicitlyDegenerate, VerificationFailure
from .params import SystemParams
from .quadrature import CellKind, SubsystemCell

CHECKPOINTS = (10.0, 20.0, 40.0, 80.0, 160.0)
FINAL_TOL = 1e-4
NOISE_FLOOR = 1e-13
TANGENCY_MIN = 1e-6
COMPONENTS = ("earth", "moon")


def _check_band(c: float, params: SystemParams, closed: bool = False):
    inside = (params.cJ <= c <= params.cH) if closed else (params.cJ < c < params.cH)
    if not inside:
        raise BandError(f"c = {c!r} is outside the Lyapunov band ({params.cJ!r}, {params.cH!r})")


def _check_lyapunov_params(c: float, params: SystemParams):
    if params.delta == 0.0:
        raise ExplicitlyDegenerate("equal masses: the Lyapunov family degenerates (l4 is the axis g = 0)")
    _check_band(c, params)


def critical_integral(c: float, params: SystemParams) -> float:
    """g_c = delta^2 / c."""
    return params.delta ** 2 / c


def equilibrium_nu(c: float, params: SystemParams) -> float:
    """nu* = arccos(-delta/c), nudged by a few ulps so that delta + c cos nu* == 0
    holds in floating point whenever such a float exists."""
    target = -params.delta / c
    nu0 = math.acos(target)
    best, best_val = nu0, abs(params.delta + c * math.cos(nu0))
    x = nu0
    for _ in range(16):
        x = math.nextafter(x, math.inf)
        v = abs(params.delta + c * math.cos(x))
        if v < best_val:
            best, best_val = x, v
    x = nu0
    for _ in range(16):
        x = math.nextafter(x, -math.inf)
        v = abs(params.delta + c * math.cos(x))
        if v < best_val:
            best, best_val = x, v
    return best


def lyapunov_lambda_cell(c: float, params: SystemParams) -> SubsystemCell:
    g = critical_integral(c, params)
    disc = 1.0 - g * c
    xi2 = (-1.0 - math.sqrt(disc)) / c
    lam2 = math.acosh(xi2)
    return SubsystemCell("lambda", CellKind.THROUGH_ORIGIN, -lam2, lam2, (1.0, xi2), EnergyMomentum(g, c),
                         params.delta)


def hyperbola_vertex(c: float, params: SystemParams):
    """Axis point (q1, 0) of the hyperbola eta = -delta/c (normalized frame)."""
    return (-params.delta / (2.0 * c), 0.0)


@dataclass
class LyapunovOrbit:
    c: float
    g_c: float
    nu_star: float
    params: SystemParams = field(repr=False)
    lam_cell: SubsystemCell = field(repr=False)
    trajectory: Trajectory = field(repr=False)

    @property
    def period(self) -> float:
        return self.lam_cell.period

    @property
    def eta_locus(self) -> float:
        return math.cos(self.nu_star)

    @property
    def nu_deviation(self) -> float:
        return float(np.max(np.abs(self.trajectory.y[:, 1] - self.nu_star)))

    @property
    def cartesian_diameter(self) -> float:
        """Length of the arc of hyperbola traced by the orbit (endpoint distance)."""
        return math.sinh(self.lam_cell.hi) * math.sin(self.nu_star)

    def max_distance_from(self, q1: float, q2: float = 0.0) -> float:
        x, y = self.trajectory.cartesian_positions()
        if self.params.mirrored:
            x = -x
        return float(np.max(np.hypot(x - q1, y - q2)))

    def h_residuals(self):
        """(h-factor, derivative) at eta*: both vanish at a double root."""
        e = math.cos(self.nu_star)
        c, d = self.c, self.params.delta
        return c * e * e + 2.0 * d * e + self.g_c, 2.0 * c * e + 2.0 * d


def lyapunov_orbit(c: float, params: SystemParams, tol: float = 1e-12) -> LyapunovOrbit:
    _check_lyapunov_params(c, params)
    g_c = critical_integral(c, params)
    nu_star = equilibrium_nu(c, params)
    cell = lyapunov_lambda_cell(c, params)
    y0 = np.array([cell.hi, nu_star, 0.0, 0.0])
    traj = integrate(y0, params, c, cell.period, tol=tol, g=g_c)
    orbit = LyapunovOrbit(c, g_c, nu_star, params, cell, traj)
    if orbit.nu_deviation > 1e-8:
        raise VerificationFailure(f"nu left the Lyapunov locus by {orbit.nu_deviation:.3e}",
                                  data={"c": c, "nu_star": nu_star})
    return orbit


def nu_effective_potential_curvature(c: float, params: SystemParams) -> float:
    """Second derivative at nu* of V(nu) = 2 delta cos nu + c cos^2 nu (Q_nu = 2 p^2 + V)."""
    nu = math.acos(-params.delta / c)
    s, cs = math.sin(nu), math.cos(nu)
    return -2.0 * params.delta * cs + 2.0 * c * (s * s - cs * cs)


# ---------------------------------------------------------------------------
# leaf orbits


def component_nu_range(c: float, params: SystemParams, component: str):
    nu_star = math.acos(-params.delta / c)
    if component == "earth":
        return nu_star, 2.0 * math.pi - nu_star
    if component == "moon":
        return -nu_star, nu_star
    raise ValueError(f"component must be 'earth' or 'moon', got {component!r}")


def collision_angle(component: str) -> float:
    return math.pi if component == "earth" else 0.0


def leaf_state(c: float, params: SystemParams, component: str, lam_phase: float = 0.5,
               nu_phase: float = 0.0, signs=(1, 1)) -> np.ndarray:
    """State on the singular leaf, lam at relative position ``lam_phase`` in its
    cell and nu at ``nu_phase`` in (-1, 1) of the component's nu-range."""
    _check_lyapunov_params(c, params)
    if not -1.0 < nu_phase < 1.0:
        raise ValueError("nu_phase must lie strictly inside (-1, 1)")
    g = critical_integral(c, params)
    cell = lyapunov_lambda_cell(c, params)
    lo, hi = component_nu_range(c, params, component)
    lam = cell.position(lam_phase)
    nu = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nu_phase
    ch = math.cosh(lam)
    pl2 = max(0.5 * (c * ch * ch + 2.0 * ch + g), 0.0)
    pl = 0.0 if abs(lam_phase) == 1.0 else math.copysign(math.sqrt(pl2), signs[0])
    pn = math.copysign(abs(c * math.cos(nu) + params.delta) / math.sqrt(-2.0 * c), signs[1])
    return np.array([lam, nu, pl, pn])


@dataclass
class LeafOrbit:
    component: str
    forward: Trajectory
    backward: Trajectory


def leaf_orbit(c: float, params: SystemParams, component: str = "earth", lam_phase: float = 0.5,
               nu_phase: float = 0.0, signs=(1, 1), horizon: float = CHECKPOINTS[-1], tol: float = 1e-12,
               mode: int = integrator.LEAF) -> LeafOrbit:
    y0 = leaf_state(c, params, component, lam_phase, nu_phase, signs)
    return _leaf_from_state(y0, c, params, component, horizon, tol, mode)


def _leaf_from_state(y0, c, params, component, horizon, tol, mode=integrator.LEAF):
    g = critical_integral(c, params)
    fwd = integrate(y0, params, c, horizon, tol=tol, mode=mode, g=g)
    bwd = integrate(y0, params, c, -horizon, tol=tol, mode=mode, g=g)
    return LeafOrbit(component, fwd, bwd)


def distance_to_locus(nu, nu_star: float):
    """Distance on the circle from nu to the nearer of +-nu*."""
    nu = np.asarray(nu, dtype=float)
    d1 = np.abs(np.remainder(nu - nu_star + math.pi, 2 * math.pi) - math.pi)
    d2 = np.abs(np.remainder(nu + nu_star + math.pi, 2 * math.pi) - math.pi)
    return np.minimum(d1, d2)


def _is_settling(dists, floor=NOISE_FLOOR) -> bool:
    return all(b <= max(a, floor) for a, b in zip(dists, dists[1:]))


def rotation_count(orbit: LeafOrbit) -> int:
    """Passages of nu through the collision-side angle (pi for the Earth side,
    0 for the Moon side, modulo 2 pi) over the whole orbit."""
    nu = np.concatenate([orbit.backward.y[:, 1], orbit.forward.y[:, 1]])
    ref = collision_angle(orbit.component)
    lo, hi = nu.min(), nu.max()
    m_lo = math.ceil((lo - ref) / (2 * math.pi))
    m_hi = math.floor((hi - ref) / (2 * math.pi))
    return max(0, m_hi - m_lo + 1)


def nu_monotone(orbit: LeafOrbit) -> bool:
    nu = np.concatenate([orbit.backward.y[::-1, 1], orbit.forward.y[1:, 1]])
    d = np.diff(nu)
    return bool(np.all(d >= 0.0) or np.all(d <= 0.0))


def crossing_speed(orbit: LeafOrbit, c: float, params: SystemParams) -> float:
    """|nu'| where nu passes the collision-side angle (nan if it does not)."""
    ref = collision_angle(orbit.component)
    # on the leaf nu' = 4 p_nu and |p_nu| depends on nu alone
    if rotation_count(orbit) == 0:
        return float("nan")
    return 4.0 * abs(c * math.cos(ref) + params.delta) / math.sqrt(-2.0 * c)


@dataclass
class OrbitCheck:
    phase: tuple
    sign: tuple
    checkpoints_fwd: list
    checkpoints_bwd: list
    rotation_count: int
    collision_flag: bool
    monotone: bool
    crossing_speed: float
    max_q: float
    passed: bool
    reasons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"phase": list(self.phase), "sign": list(self.sign), "checkpoints_fwd": self.checkpoints_fwd,
                "checkpoints_bwd": self.checkpoints_bwd, "rotation_count": self.rotation_count,
                "collision_flag": self.collision_flag, "pass": self.passed}


@dataclass
class HomoclinicReport:
    mu: float
    c: float
    component: str
    orbits: list
    checkpoints: tuple = CHECKPOINTS

    @property
    def verdict(self) -> bool:
        return bool(self.orbits) and all(o.passed for o in self.orbits)

    @property
    def convergence_forward(self):
        return [o.checkpoints_fwd for o in self.orbits]

    @property
    def convergence_backward(self):
        return [o.checkpoints_bwd for o in self.orbits]

    def to_dict(self) -> dict:
        return {"mu": self.mu, "c": self.c, "component": self.component,
                "orbits": [o.to_dict() for o in self.orbits], "verdict": "pass" if self.verdict else "fail"}

    def raise_for_verdict(self):
        if not self.verdict:
            bad = [o for o in self.orbits if not o.passed]
            raise VerificationFailure(f"{len(bad)} of {len(self.orbits)} leaf orbits failed: {bad[0].reasons}",
                                      data=bad[0].to_dict())


def check_orbit(orbit: LeafOrbit, c: float, params: SystemParams, phase, sign, collision: bool = False,
                checkpoints=CHECKPOINTS, final_tol: float = FINAL_TOL) -> OrbitCheck:
    nu_star = math.acos(-params.delta / c)
    fwd = distance_to_locus(orbit.forward.at(np.array(checkpoints))[:, 1], nu_star).tolist()
    bwd = distance_to_locus(orbit.backward.at(-np.array(checkpoints))[:, 1], nu_star).tolist()
    count = rotation_count(orbit)
    mono = nu_monotone(orbit)
    speed = crossing_speed(orbit, c, params)
    max_q = max(orbit.forward.max_q, orbit.backward.max_q)
    reasons = []
    for name, d in (("forward", fwd), ("backward", bwd)):
        if not _is_settling(d):
            reasons.append(f"{name} distances not monotone: {d}")
        if not d[-1] <= final_tol:
            reasons.append(f"{name} final distance {d[-1]:.3e} > {final_tol:g}")
    if count != 1:
        reasons.append(f"rotation count {count}")
    if not mono:
        reasons.append("nu is not monotone")
    if not (speed >= TANGENCY_MIN):
        reasons.append(f"crossing speed {speed!r} below {TANGENCY_MIN:g}")
    return OrbitCheck(tuple(float(x) for x in phase), tuple(int(s) for s in sign), fwd, bwd, count, collision,
                      mono, speed, max_q, not reasons, reasons)


def verify_homoclinic(c: float, params: SystemParams, component: str = "earth", n_orbits: int = 20,
                      rng: np.random.Generator | None = None, checkpoints=CHECKPOINTS,
                      final_tol: float = FINAL_TOL, tol: float = 1e-12) -> HomoclinicReport:
    """Integrate ``n_orbits`` leaf orbits with random phases and momentum signs
    in both time directions and check their convergence to the Lyapunov locus."""
    _check_lyapunov_params(c, params)
    if rng is None:
        rng = np.random.default_rng(0)
    checks = []
    for _ in range(n_orbits):
        lam_phase = float(rng.uniform(-1.0, 1.0))
        nu_phase = float(rng.uniform(-0.9, 0.9))
        signs = tuple(int(s) for s in rng.choice([-1, 1], size=2))
        orbit = leaf_orbit(c, params, component, lam_phase, nu_phase, signs, checkpoints[-1], tol)
        checks.append(check_orbit(orbit, c, params, (lam_phase, nu_phase), signs,
                                  checkpoints=checkpoints, final_tol=final_tol))
    return HomoclinicReport(params.mu_input, c, component, checks, tuple(checkpoints))


# ---------------------------------------------------------------------------
# collision homoclinics


@dataclass(frozen=True)
class CollisionMomenta:
    p_lambda_sq: float  # at lam = 0
    p_nu_sq_moon: float  # at cos nu = +1
    p_nu_sq_earth: float  # at cos nu = -1


def collision_momenta(c: float, params: SystemParams) -> CollisionMomenta:
    """Squared momenta at the two primaries on the leaf g_c = delta^2/c."""
    _check_band(c, params, closed=True)
    d = params.delta
    return CollisionMomenta((c * c + 2.0 * c + d * d) / (2.0 * c), (c + d) ** 2 / (-2.0 * c),
                            (c - d) ** 2 / (-2.0 * c))


def collision_state(c: float, params: SystemParams, focus: str = "E", signs=(1, 1)) -> np.ndarray:
    mom = collision_momenta(c, params)
    if focus == "E":
        nu, pn2 = math.pi, mom.p_nu_sq_earth
    elif focus == "M":
        nu, pn2 = 0.0, mom.p_nu_sq_moon
    else:
        raise ValueError(f"focus must be 'E' or 'M', got {focus!r}")
    return np.array([0.0, nu, math.copysign(math.sqrt(mom.p_lambda_sq), signs[0]),
                     math.copysign(math.sqrt(pn2), signs[1])])


def collision_homoclinic(c: float, params: SystemParams, focus: str = "E", signs=(1, 1),
                         checkpoints=CHECKPOINTS, final_tol: float = FINAL_TOL, tol: float = 1e-12):
    """Leaf orbit through a primary; returns (LeafOrbit, HomoclinicReport)."""
    _check_lyapunov_params(c, params)
    y0 = collision_state(c, params, focus, signs)
    ql, qn = q_parts(y0, c, params.delta)
    if abs(ql + qn) > 1e-12:
        raise VerificationFailure(f"collision state has Q = {ql + qn:.3e}")
    component = "earth" if focus == "E" else "moon"
    orbit = _leaf_from_state(y0, c, params, component, checkpoints[-1], tol)
    check = check_orbit(orbit, c, params, (0.0, 0.0), signs, collision=True, checkpoints=checkpoints,
                        final_tol=final_tol)
    return orbit, HomoclinicReport(params.mu_input, c, component, [check], tuple(checkpoints))
