"""The regularized flow of Q in the doubled chart.

On the energy level c the regularized Hamiltonian

    Q = (H - c)(cosh^2 lam - cos^2 nu) = Q_lam + Q_nu,
    Q_lam = 2 p_lam^2 - 2 cosh lam - c cosh^2 lam,
    Q_nu  = 2 p_nu^2 + 2 delta cos nu + c cos^2 nu,

is smooth everywhere (collisions included) and separates.  Orbits of H at
energy c are the orbits of Q on Q = 0, reparametrized by
ds = dt / (cosh^2 lam - cos^2 nu).  On a leaf (g, c): Q_lam = g, Q_nu = -g.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import integrator
from .bifurcation import EnergyMomentum
from .coords import Chart, PhaseState, doubled, doubled_positions_to_cartesian, wrap_angle
from .errors import InadmissiblePoint, NonzeroQ, ToleranceExceeded
from .params import SystemParams
from .quadrature import subsystem_cells

DEFAULT_TOL = 1e-12
HMAX = 0.1
START_Q_TOL = 1e-8  # loose enough to restart from the end of an integrated trajectory


@dataclass(frozen=True)
class RegularizedEnergy:
    c: float
    q_lambda: float
    q_nu: float

    @property
    def total(self) -> float:
        return self.q_lambda + self.q_nu


def q_parts(y, c: float, delta: float):
    """(Q_lam, Q_nu) for one state or an (N, 4) array of states."""
    y = np.asarray(y, dtype=float)
    lam, nu, pl, pn = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
    ch = np.cosh(lam)
    cs = np.cos(nu)
    return 2.0 * pl * pl - 2.0 * ch - c * ch * ch, 2.0 * pn * pn + 2.0 * delta * cs + c * cs * cs


def regularized_energy(state: PhaseState, params: SystemParams, c: float) -> RegularizedEnergy:
    ql, qn = q_parts(_doubled_values(state), c, params.delta)
    return RegularizedEnergy(float(c), float(ql), float(qn))


def vector_field(state, params: SystemParams, c: float) -> np.ndarray:
    """(lam', nu', p_lam', p_nu') of the Hamiltonian field of Q."""
    out = np.empty(4)
    integrator.rhs(integrator.FULL, float(c), params.delta, 1.0, _doubled_values(state), out)
    return out


def _doubled_values(state):
    if isinstance(state, PhaseState):
        if state.chart is not Chart.DOUBLED:
            raise ValueError(f"expected a doubled-chart state, got {state.chart.value}")
        return np.array(state.values, dtype=float)
    return np.asarray(state, dtype=float).reshape(4)


def momenta_squared(point: EnergyMomentum, params: SystemParams, lam: float, nu: float):
    g, c = point.g, point.c
    ch = math.cosh(lam)
    cs = math.cos(nu)
    return 0.5 * (c * ch * ch + 2.0 * ch + g), 0.5 * (-c * cs * cs - 2.0 * params.delta * cs - g)


def state_at(point: EnergyMomentum, params: SystemParams, lam: float, nu: float, signs=(1, 1),
             zero=(False, False)) -> PhaseState:
    """Doubled state on the leaf (g, c) at given positions.

    Momenta come from the leaf relations with the requested signs.  ``zero``
    forces a momentum to exactly 0 (turning points); tiny negative squares
    from rounding are clipped.
    """
    pl2, pn2 = momenta_squared(point, params, lam, nu)
    scale = 1e-12 * (1.0 + abs(point.c) * math.cosh(lam) ** 2 + abs(point.g))
    if pl2 < -scale or pn2 < -scale:
        raise InadmissiblePoint(f"position (lam, nu) = ({lam!r}, {nu!r}) is outside the leaf "
                                f"({point.g!r}, {point.c!r}): p^2 = ({pl2:.3g}, {pn2:.3g})")
    pl = 0.0 if zero[0] else math.copysign(math.sqrt(max(pl2, 0.0)), signs[0])
    pn = 0.0 if zero[1] else math.copysign(math.sqrt(max(pn2, 0.0)), signs[1])
    return doubled(lam, nu, pl, pn)


def initial_state(point: EnergyMomentum, params: SystemParams, phase=(0.0, 0.0), signs=(1, 1),
                  component: str | None = None) -> PhaseState:
    """A state on the torus over (g, c).

    ``phase`` = (u_lam, u_nu) in [-1, 1]^2 places lam and nu relatively inside
    their cells (0 = cell midpoint, +-1 = turning points, where the momentum is
    exactly zero).  On a rotation cell nu = pi u_nu.  ``signs`` chooses the
    momentum signs.
    """
    lam_cell, nu_cell = subsystem_cells(point, params, component)
    u_l, u_n = (float(u) for u in phase)
    if not (-1.0 <= u_l <= 1.0 and -1.0 <= u_n <= 1.0):
        raise ValueError(f"phase must lie in [-1, 1]^2, got {phase!r}")
    lam = lam_cell.position(u_l)
    nu = nu_cell.position(u_n)
    zero = (abs(u_l) == 1.0, nu_cell.libration and abs(u_n) == 1.0)
    return state_at(point, params, lam, nu, signs, zero)


def reverse_momenta(state: PhaseState) -> PhaseState:
    """The anti-symplectic involution p -> -p."""
    v = np.array(state.values)
    v[2:] = -v[2:]
    return PhaseState(state.chart, v)


@dataclass
class Trajectory:
    """Samples of the regularized flow with the dense-output polynomials.

    ``y[:, 1]`` is the integrated (unwrapped) nu; ``nu_wrapped`` reduces it to
    [-pi, pi).
    """
    params: SystemParams
    c: float
    g: float
    s: np.ndarray
    y: np.ndarray
    cont: np.ndarray = field(repr=False)
    mode: int = integrator.FULL
    sigma: float = 1.0
    tol: float = DEFAULT_TOL
    stats: integrator.StepStats | None = None
    q_abs: np.ndarray = field(init=False, repr=False)
    q_lambda_dev: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        ql, qn = q_parts(self.y, self.c, self.params.delta)
        self.q_abs = np.abs(ql + qn)
        self.q_lambda_dev = np.abs(ql - self.g)

    @property
    def start_point(self) -> EnergyMomentum:
        return EnergyMomentum(self.g, self.c)

    @property
    def drift_log(self) -> np.ndarray:
        return np.column_stack([self.q_abs, self.q_lambda_dev])

    @property
    def max_q(self) -> float:
        return float(self.q_abs.max())

    @property
    def max_q_lambda_drift(self) -> float:
        return float(self.q_lambda_dev.max())

    @property
    def nu_unwrapped(self) -> np.ndarray:
        return self.y[:, 1]

    @property
    def nu_wrapped(self) -> np.ndarray:
        return wrap_angle(self.y[:, 1])

    @property
    def samples(self):
        for s, v in zip(self.s, self.y):
            yield float(s), doubled(*v)

    def __len__(self):
        return len(self.s)

    def at(self, s) -> np.ndarray:
        """Dense-output state(s) at time(s) s."""
        scalar = np.ndim(s) == 0
        q = np.atleast_1d(np.asarray(s, dtype=float))
        lo, hi = min(self.s[0], self.s[-1]), max(self.s[0], self.s[-1])
        if np.any(q < lo - 1e-12 * max(1.0, abs(lo))) or np.any(q > hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError("query time outside the integrated span")
        out = integrator.dense_eval(self.s, self.cont, np.ascontiguousarray(q))
        return out[0] if scalar else out

    def cartesian_positions(self):
        return doubled_positions_to_cartesian(self.y[:, 0], self.y[:, 1], self.params)

    def crossings(self, index: int, level: float = 0.0, direction: int = 0) -> np.ndarray:
        """Refined times where component ``index`` crosses ``level``.

        direction -1: descending (in increasing s), +1: ascending, 0: both.
        Times are returned in increasing order.
        """
        order = np.argsort(self.s, kind="stable")
        s = self.s[order]
        v = self.y[order, index] - level
        rev = self.s[-1] < self.s[0]
        a, b = v[:-1], v[1:]
        down = (a > 0.0) & (b <= 0.0)
        up = (a < 0.0) & (b >= 0.0)
        mask = down if direction < 0 else up if direction > 0 else (down | up)
        hits = []
        for j in np.nonzero(mask)[0]:
            if b[j] == 0.0:
                hits.append(s[j + 1])
                continue
            seg = (len(self.s) - 2 - j) if rev else j
            hits.append(self._refine(seg, index, level, s[j], s[j + 1]))
        return np.array(hits)

    def _refine(self, seg, index, level, s_a, s_b):
        coef = self.cont[seg, :, index]
        s0 = self.s[seg]
        h = self.s[seg + 1] - s0

        def fun(t):
            th = (t - s0) / h
            th1 = 1.0 - th
            return coef[0] + th * (coef[1] + th1 * (coef[2] + th * (coef[3] + th1 * coef[4]))) - level
        fa, fb = fun(s_a), fun(s_b)
        if fa == 0.0:
            return s_a
        if fb == 0.0 or fa * fb > 0.0:
            return s_b
        return brentq(fun, s_a, s_b, xtol=1e-15, rtol=1e-15, maxiter=200)

    def to_jsonl(self, fh):
        ql, qn = q_parts(self.y, self.c, self.params.delta)
        q = ql + qn
        wrapped = self.nu_wrapped
        for i in range(len(self.s)):
            rec = {"s": float(self.s[i]), "lambda": float(self.y[i, 0]), "nu_wrapped": float(wrapped[i]),
                   "nu_unwrapped": float(self.y[i, 1]), "p_lambda": float(self.y[i, 2]),
                   "p_nu": float(self.y[i, 3]), "Q": float(q[i]), "Q_lambda": float(ql[i])}
            fh.write(json.dumps(rec) + "\n")


def integrate(initial, params: SystemParams, c: float, s_span=100.0, tol: float = DEFAULT_TOL,
              mode: int = integrator.FULL, g: float | None = None, hmax: float = HMAX,
              check: bool = True) -> Trajectory:
    """Integrate the regularized flow on Q = 0.

    ``s_span`` is either the final time (start at 0; negative integrates
    backwards) or a pair (s0, s1).  Raises NonzeroQ if the start is off the
    level set, ToleranceExceeded if |Q| exceeds 10 tol max(|s1 - s0|, 1) at any
    sample.  ``g`` defaults to Q_lam at the start.
    """
    y0 = _doubled_values(initial)
    c = float(c)
    ql0, qn0 = q_parts(y0, c, params.delta)
    if abs(ql0 + qn0) > START_Q_TOL:
        raise NonzeroQ(f"initial state has Q = {ql0 + qn0:.3e}, expected 0 on the level c = {c!r}")
    if np.ndim(s_span) == 0:
        s0, s1 = 0.0, float(s_span)
    else:
        s0, s1 = (float(x) for x in s_span)
    sigma = 1.0
    if mode == integrator.LEAF:
        sigma = _leaf_sigma(y0, c, params.delta)
    status, s, y, cont, stats = integrator.solve(mode, c, params.delta, sigma, y0, s0, s1, tol, hmax)
    traj = Trajectory(params, c, float(ql0) if g is None else float(g), s, y, cont, mode, sigma, tol, stats)
    if status != 0:
        raise ToleranceExceeded(f"integration stopped early (status {status}) at s = {s[-1]!r}",
                                sample=(float(s[-1]), y[-1].copy()))
    if check:
        bound = 10.0 * tol * max(abs(s1 - s0), 1.0)
        i = int(np.argmax(traj.q_abs))
        if traj.q_abs[i] > bound:
            raise ToleranceExceeded(f"|Q| = {traj.q_abs[i]:.3e} exceeds {bound:.3e} at s = {s[i]!r}",
                                    sample=(float(s[i]), y[i].copy()))
    return traj


def _leaf_sigma(y0, c, delta):
    a = c * math.cos(y0[1]) + delta
    if a == 0.0 or y0[3] == 0.0:
        # on the periodic orbit itself nu does not move; either sign works
        return 1.0
    return math.copysign(1.0, y0[3]) * math.copysign(1.0, a)


# ---------------------------------------------------------------------------
# periods measured along trajectories


def libration_period(traj: Trajectory, momentum_index: int) -> tuple:
    """(period, cycles) from descending zero crossings of p_lam (2) or p_nu (3)."""
    t = traj.crossings(momentum_index, 0.0, -1)
    if len(t) < 2:
        raise ValueError("fewer than two complete cycles in the trajectory")
    return (t[-1] - t[0]) / (len(t) - 1), len(t) - 1


def rotation_period(traj: Trajectory) -> tuple:
    """(period, cycles) of a rotating nu from crossings of nu_0 + 2 pi m."""
    nu = traj.y[:, 1]
    ref = nu[0] + 0.5 * math.pi
    up = nu[-1] > nu[0]
    m_lo = math.ceil((min(nu) - ref) / (2 * math.pi))
    m_hi = math.floor((max(nu) - ref) / (2 * math.pi))
    times = []
    for m in range(m_lo, m_hi + 1):
        ts = traj.crossings(1, ref + 2 * math.pi * m, 1 if up else -1)
        if len(ts):
            times.append(ts[0])
    times.sort()
    if len(times) < 2:
        raise ValueError("fewer than two complete rotations in the trajectory")
    return (times[-1] - times[0]) / (len(times) - 1), len(times) - 1


def measured_periods(traj: Trajectory, nu_rotates: bool) -> tuple:
    t_lam, _ = libration_period(traj, 2)
    t_nu = rotation_period(traj)[0] if nu_rotates else libration_period(traj, 3)[0]
    return t_lam, t_nu
