"""Mass ratio and the critical constants derived from it.

The Earth (weight 1 - mu) sits at E = (-1/2, 0) and the Moon (weight mu) at
M = (1/2, 0).  Internally the heavier body is always the Earth, so a mass
ratio above 1/2 is stored as 1 - mu together with a mirror flag; Cartesian
input is reflected in q1 before it reaches the normalized frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularityError

EARTH = (-0.5, 0.0)
MOON = (0.5, 0.0)


@dataclass(frozen=True)
class SystemParams:
    mu: float
    mirrored: bool = False
    delta: float = field(init=False)
    cJ: float = field(init=False)
    cE: float = field(init=False)
    cH: float = field(init=False)
    saddle_q1: float = field(init=False)

    def __post_init__(self):
        mu = self.mu
        if not 0.0 < mu <= 0.5:
            raise DomainError(f"normalized mass ratio must lie in (0, 1/2], got {mu!r}")
        root = math.sqrt(mu * (1.0 - mu))
        delta = 1.0 - 2.0 * mu
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "cJ", -1.0 - 2.0 * root)
        object.__setattr__(self, "cE", -1.0)
        object.__setattr__(self, "cH", -1.0 + 2.0 * mu)
        # 0/0 at equal masses; the symmetric limit is the midpoint
        l = 0.0 if delta == 0.0 else (1.0 - 2.0 * root) / (2.0 * delta)
        object.__setattr__(self, "saddle_q1", l)

    @property
    def mu_input(self) -> float:
        """The mass ratio as the caller gave it (before mirroring)."""
        return 1.0 - self.mu if self.mirrored else self.mu

    @property
    def saddle_g(self) -> float:
        """Integral value at the saddle, where l3 and l4 meet at c = cJ."""
        return 2.0 * math.sqrt(self.mu * (1.0 - self.mu)) - 1.0


def make_params(mu: float) -> SystemParams:
    mu = float(mu)
    if not (0.0 < mu < 1.0) or math.isnan(mu):
        raise DomainError(f"mass ratio must lie in (0, 1), got {mu!r}")
    if mu > 0.5:
        return SystemParams(1.0 - mu, mirrored=True)
    return SystemParams(mu)


def hamiltonian_cartesian(params: SystemParams, state) -> float:
    """Energy 1/2|p|^2 - (1-mu)/|q-E| - mu/|q-M| of a Cartesian state.

    ``state`` is a PhaseState in the Cartesian chart or any 4-sequence
    (q1, q2, p1, p2), expressed in the caller's frame (mirroring applied here).
    """
    q1, q2, p1, p2 = _cartesian_values(state)
    if params.mirrored:
        q1, p1 = -q1, -p1
    r_e = math.hypot(q1 - EARTH[0], q2)
    r_m = math.hypot(q1 - MOON[0], q2)
    if r_e == 0.0 or r_m == 0.0:
        raise SingularityError(f"position ({q1}, {q2}) coincides with a primary")
    mu = params.mu
    return 0.5 * (p1 * p1 + p2 * p2) - (1.0 - mu) / r_e - mu / r_m


def _cartesian_values(state):
    chart = getattr(state, "chart", None)
    if chart is not None:
        if chart.value != "cartesian":
            raise ValueError(f"expected a Cartesian state, got chart {chart.value!r}")
        values = state.values
    else:
        values = state
    q1, q2, p1, p2 = (float(v) for v in np.asarray(values, dtype=float))
    return q1, q2, p1, p2
