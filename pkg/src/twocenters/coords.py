"""Charts of the planar phase space and the exact maps between them.

Three charts are supported:

* ``CARTESIAN``  (q1, q2, p1, p2), caller frame (mirrored when mu > 1/2);
* ``ELLIPTIC``   (xi, eta, p_xi, p_eta) with xi = |q-E| + |q-M|,
  eta = |q-E| - |q-M|.  This chart covers a half plane; the sign of q2 is
  not part of the state;
* ``DOUBLED``    (lam, nu, p_lam, p_nu) with xi = cosh lam, eta = cos nu.
  It covers the plane twice, (lam, nu) and (-lam, -nu) being the same point,
  and is the chart in which the regularized flow is integrated.

Momenta always transform so that p.dq is preserved.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularity
from .params import EARTH, MOON, SystemParams, hamiltonian_cartesian

CLIP = 1e-14


class Chart(str, enum.Enum):
    CARTESIAN = "cartesian"
    ELLIPTIC = "elliptic"
    DOUBLED = "doubled"


@dataclass(frozen=True)
class PhaseState:
    chart: Chart
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(4)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "chart", Chart(self.chart))

    @property
    def q(self):
        return self.values[:2]

    @property
    def p(self):
        return self.values[2:]

    def wrapped(self) -> "PhaseState":
        """Doubled state with nu reduced to [-pi, pi)."""
        if self.chart is not Chart.DOUBLED:
            return self
        v = self.values.copy()
        v[1] = wrap_angle(v[1])
        return PhaseState(self.chart, v)

    def __repr__(self):
        vals = ", ".join(f"{x:.12g}" for x in self.values)
        return f"PhaseState({self.chart.value}, [{vals}])"


def cartesian(q1, q2, p1, p2) -> PhaseState:
    return PhaseState(Chart.CARTESIAN, (q1, q2, p1, p2))


def elliptic(xi, eta, p_xi, p_eta) -> PhaseState:
    return PhaseState(Chart.ELLIPTIC, (xi, eta, p_xi, p_eta))


def doubled(lam, nu, p_lam, p_nu) -> PhaseState:
    return PhaseState(Chart.DOUBLED, (lam, nu, p_lam, p_nu))


@dataclass(frozen=True)
class ConservedPair:
    h_value: float
    g_value: float


def wrap_angle(x):
    """Reduce angles to [-pi, pi)."""
    return (x + np.pi) % (2.0 * np.pi) - np.pi


def _clip_xi(xi):
    if xi < 1.0:
        if xi < 1.0 - CLIP:
            raise ValueError(f"xi must be >= 1, got {xi!r}")
        return 1.0
    return xi


def _clip_eta(eta):
    if abs(eta) > 1.0:
        if abs(eta) > 1.0 + CLIP:
            raise ValueError(f"eta must lie in [-1, 1], got {eta!r}")
        return math.copysign(1.0, eta)
    return eta


def _unmirror(values, params):
    q1, q2, p1, p2 = (float(x) for x in values)
    if params is not None and params.mirrored:
        return -q1, q2, -p1, p2
    return q1, q2, p1, p2


def _mirror(values, params):
    # the reflection q1 -> -q1 is an involution
    return _unmirror(values, params)


def _distances(q1, q2):
    return math.hypot(q1 - EARTH[0], q2), math.hypot(q1 - MOON[0], q2)


def _position_jacobian_doubled(lam, nu):
    """d(q1, q2)/d(lam, nu)."""
    sh, ch = math.sinh(lam), math.cosh(lam)
    s, c = math.sin(nu), math.cos(nu)
    return 0.5 * np.array([[sh * c, -ch * s], [ch * s, sh * c]])


def _cartesian_to_doubled_position(q1, q2, sheet=1):
    r_e, r_m = _distances(q1, q2)
    xi = _clip_xi(r_e + r_m)
    eta = _clip_eta(r_e - r_m)
    lam = math.acosh(xi)
    nu = math.acos(eta)
    if q2 < 0.0:
        nu = -nu
    if sheet < 0:
        lam, nu = -lam, -nu
    return lam, nu


def to_elliptic(state: PhaseState, params: SystemParams | None = None) -> PhaseState:
    """Convert a Cartesian or Doubled state to the single-cover elliptic chart.

    Raises ChartSingularity (carrying the positions) where the momentum map
    degenerates: on the q1 axis, i.e. xi = 1 or |eta| = 1.
    """
    if state.chart is Chart.ELLIPTIC:
        return state
    if state.chart is Chart.DOUBLED:
        lam, nu, pl, pn = (float(x) for x in state.values)
        xi, eta = math.cosh(lam), math.cos(nu)
        sh, s = math.sinh(lam), math.sin(nu)
        if sh == 0.0 or s == 0.0:
            raise ChartSingularity("elliptic momenta undefined on the axis", positions=(xi, eta))
        return elliptic(xi, eta, pl / sh, -pn / s)
    q1, q2, p1, p2 = _unmirror(state.values, params)
    r_e, r_m = _distances(q1, q2)
    xi, eta = r_e + r_m, r_e - r_m
    if r_e == 0.0 or r_m == 0.0:
        raise ChartSingularity("position at a primary", positions=(xi, eta))
    scale = max(1.0, abs(q1))
    if abs(q2) <= 1e-14 * scale:
        raise ChartSingularity("elliptic momenta undefined on the axis", positions=(xi, _clip_eta(eta)))
    ue = np.array([q1 - EARTH[0], q2]) / r_e
    um = np.array([q1 - MOON[0], q2]) / r_m
    jac = np.vstack([ue + um, ue - um])
    p_ell = np.linalg.solve(jac.T, np.array([p1, p2]))
    return elliptic(xi, eta, p_ell[0], p_ell[1])


def to_doubled(state: PhaseState, params: SystemParams | None = None, branch=(1, 1)) -> PhaseState:
    """Convert to the doubly covered chart.

    From the elliptic chart ``branch`` = (sign of lam, sign of nu) selects
    one of the four lifts.  From the Cartesian chart the lift is fixed by the
    sign of q2 up to the deck transformation (lam, nu) -> (-lam, -nu);
    ``branch[0]`` picks the sheet.
    """
    if state.chart is Chart.DOUBLED:
        return state
    if state.chart is Chart.ELLIPTIC:
        xi, eta, p_xi, p_eta = (float(x) for x in state.values)
        xi, eta = _clip_xi(xi), _clip_eta(eta)
        lam = branch[0] * math.acosh(xi)
        nu = branch[1] * math.acos(eta)
        # at xi = 1 or |eta| = 1 the factors vanish and the momenta are 0
        return doubled(lam, nu, p_xi * math.sinh(lam), -p_eta * math.sin(nu))
    q1, q2, p1, p2 = _unmirror(state.values, params)
    r_e, r_m = _distances(q1, q2)
    if r_e == 0.0 or r_m == 0.0:
        lam, nu = _cartesian_to_doubled_position(q1, q2, branch[0])
        raise ChartSingularity("momenta undefined at a primary", positions=(lam, nu))
    lam, nu = _cartesian_to_doubled_position(q1, q2, branch[0])
    jac = _position_jacobian_doubled(lam, nu)
    p_ln = jac.T @ np.array([p1, p2])
    return doubled(lam, nu, p_ln[0], p_ln[1])


def to_cartesian(state: PhaseState, params: SystemParams | None = None, upper: bool = True) -> PhaseState:
    """Convert an Elliptic or Doubled state to Cartesian coordinates.

    Elliptic states do not know the sign of q2; ``upper`` chooses it.
    """
    if state.chart is Chart.CARTESIAN:
        return state
    if state.chart is Chart.DOUBLED:
        lam, nu, pl, pn = (float(x) for x in state.values)
        jac = _position_jacobian_doubled(lam, nu)
        q1 = 0.5 * math.cosh(lam) * math.cos(nu)
        q2 = 0.5 * math.sinh(lam) * math.sin(nu)
        det = np.linalg.det(jac)
        if abs(det) <= 1e-28:
            raise ChartSingularity("Cartesian momenta undefined at a primary",
                                   positions=_mirror((q1, q2, 0.0, 0.0), params)[:2])
        p = np.linalg.solve(jac.T, np.array([pl, pn]))
        return cartesian(*_mirror((q1, q2, p[0], p[1]), params))
    xi, eta, p_xi, p_eta = (float(x) for x in state.values)
    xi, eta = _clip_xi(xi), _clip_eta(eta)
    q1 = 0.5 * xi * eta
    q2 = 0.5 * math.sqrt(max(0.0, (xi * xi - 1.0) * (1.0 - eta * eta)))
    if not upper:
        q2 = -q2
    r_e, r_m = 0.5 * (xi + eta), 0.5 * (xi - eta)
    if r_e == 0.0 or r_m == 0.0:
        raise ChartSingularity("position at a primary", positions=_mirror((q1, q2, 0.0, 0.0), params)[:2])
    ue = np.array([q1 - EARTH[0], q2]) / r_e
    um = np.array([q1 - MOON[0], q2]) / r_m
    jac = np.vstack([ue + um, ue - um])
    p = jac.T @ np.array([p_xi, p_eta])
    return cartesian(*_mirror((q1, q2, p[0], p[1]), params))


def doubled_positions_to_cartesian(lam, nu, params: SystemParams | None = None):
    """Vectorized (lam, nu) -> (q1, q2), in the caller frame."""
    lam = np.asarray(lam, dtype=float)
    nu = np.asarray(nu, dtype=float)
    q1 = 0.5 * np.cosh(lam) * np.cos(nu)
    q2 = 0.5 * np.sinh(lam) * np.sin(nu)
    if params is not None and params.mirrored:
        q1 = -q1
    return q1, q2


def evaluate_H_G(state: PhaseState, params: SystemParams) -> ConservedPair:
    """Energy H and the separation integral G of a state in any chart."""
    if state.chart is Chart.CARTESIAN:
        h = hamiltonian_cartesian(params, state)
        dbl = to_doubled(state, params)
        return ConservedPair(h, _doubled_HG(dbl.values, params)[1])
    if state.chart is Chart.DOUBLED:
        h, g = _doubled_HG(state.values, params)
        return ConservedPair(h, g)
    xi, eta, p_xi, p_eta = (float(x) for x in state.values)
    denom = xi * xi - eta * eta
    if denom == 0.0:
        raise ChartSingularity("H and G undefined at a primary", positions=(xi, eta))
    h_xi = 2.0 * (xi * xi - 1.0) * p_xi ** 2 - 2.0 * xi
    h_eta = 2.0 * (1.0 - eta * eta) * p_eta ** 2 + 2.0 * params.delta * eta
    return ConservedPair((h_xi + h_eta) / denom, -(eta * eta * h_xi + xi * xi * h_eta) / denom)


def _doubled_HG(values, params):
    lam, nu, pl, pn = (float(x) for x in values)
    ch2 = math.cosh(lam) ** 2
    c2 = math.cos(nu) ** 2
    denom = ch2 - c2
    if denom == 0.0:
        raise ChartSingularity("H and G undefined at a primary", positions=(lam, nu))
    h_lam = 2.0 * pl * pl - 2.0 * math.cosh(lam)
    h_nu = 2.0 * pn * pn + 2.0 * params.delta * math.cos(nu)
    return (h_lam + h_nu) / denom, -(h_lam * c2 + h_nu * ch2) / denom
