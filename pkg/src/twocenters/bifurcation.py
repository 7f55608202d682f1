"""Root analysis of the separated polynomials, the (g, c) bifurcation diagram
and the molecules of the energy levels.

Notation: g is the value of the separation integral G, c the energy, and
delta = 1 - 2 mu.  The xi-motion is admissible where

    f(xi) = (c xi^2 + 2 xi + g)(xi^2 - 1) >= 0,   xi >= 1,

and the eta-motion where

    h(eta) = (c eta^2 + 2 delta eta + g)(eta^2 - 1) >= 0,   |eta| <= 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BandEdge, DomainError
from .params import SystemParams

CLASSIFY_EPS = 1e-9
BAND_EPS = 1e-9


@dataclass(frozen=True)
class EnergyMomentum:
    g: float
    c: float

    def __post_init__(self):
        if not self.c < 0.0:
            raise DomainError(f"only negative energies are supported, got c={self.c!r}")
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "c", float(self.c))


def poly_f(point: EnergyMomentum, xi):
    return (point.c * xi ** 2 + 2.0 * xi + point.g) * (xi ** 2 - 1.0)


def poly_h(point: EnergyMomentum, params: SystemParams, eta):
    return (point.c * eta ** 2 + 2.0 * params.delta * eta + point.g) * (eta ** 2 - 1.0)


def discriminants(point: EnergyMomentum, params: SystemParams):
    """Discriminants of the quartics f and h (in that order).

    Each vanishes exactly on the lines and hyperbola where the quartic has a
    repeated root; the last factor keeps its sign, so a negative value means
    that the two non-trivial roots are complex.
    """
    g, c, d = point.g, point.c, params.delta
    disc_f = 16.0 * (c + g + 2.0) ** 2 * (c + g - 2.0) ** 2 * (1.0 - g * c)
    disc_h = 16.0 * (c + g + 2.0 * d) ** 2 * (c + g - 2.0 * d) ** 2 * (d * d - g * c)
    return disc_f, disc_h


@dataclass(frozen=True)
class RootData:
    xi_roots: tuple | None  # None: complex pair
    eta_roots: tuple | None
    xi_range: tuple | None  # None: no admissible xi
    eta_ranges: tuple = ()

    @property
    def eta_full(self) -> bool:
        return self.eta_ranges == ((-1.0, 1.0),)


def _ordered_roots(b, g, c):
    """Real roots r1 <= r2 of c r^2 + 2 b r + g (c < 0, b >= 0), or None."""
    disc = b * b - g * c
    if disc < 0.0:
        return None
    s = math.sqrt(disc)
    r2 = (-b - s) / c  # no cancellation: b, s >= 0 and c < 0
    r1 = g / (c * r2) if r2 != 0.0 else 0.0
    return (r1, r2)


def solve_roots(point: EnergyMomentum, params: SystemParams) -> RootData:
    g, c = point.g, point.c
    xi_roots = _ordered_roots(1.0, g, c)
    if xi_roots is None or xi_roots[1] < 1.0:
        xi_range = None
    elif xi_roots[0] <= 1.0:
        xi_range = (1.0, xi_roots[1])
    else:
        xi_range = xi_roots

    eta_roots = _ordered_roots(params.delta, g, c)
    if eta_roots is None:
        ranges = ((-1.0, 1.0),)
    else:
        e1, e2 = eta_roots
        if e1 >= 1.0 or e2 <= -1.0:
            ranges = ((-1.0, 1.0),)
        else:
            parts = []
            if e1 >= -1.0:
                parts.append((-1.0, e1))
            if e2 <= 1.0:
                parts.append((e2, 1.0))
            ranges = tuple(parts)
    return RootData(xi_roots, eta_roots, xi_range, ranges)


class Region(str, enum.Enum):
    FORBIDDEN = "forbidden"
    SPRIME = "S'"
    S = "S"
    S_EARTH = "S_Earth"
    S_MOON = "S_Moon"
    L = "L"
    P = "P"
    ON_CURVE = "on_curve"
    SADDLE_VALUE = "saddle_value"


@dataclass(frozen=True)
class RegionLabel:
    kind: Region
    component_hint: str | None = None  # 'earth', 'moon', 'both'
    curves: tuple = ()

    @property
    def text(self) -> str:
        if self.kind is Region.ON_CURVE:
            return "+".join(self.curves)
        return self.kind.value

    @property
    def regular(self) -> bool:
        return self.kind in (Region.SPRIME, Region.S, Region.S_EARTH, Region.S_MOON, Region.L, Region.P)


def curve_distances(point: EnergyMomentum, params: SystemParams) -> dict:
    """First-order distance from (g, c) to each critical curve present at c."""
    g, c, d = point.g, point.c, params.delta
    out = {
        "l1": abs(c + g - 2.0 * d) / math.sqrt(2.0),
        "l2": abs(c + g + 2.0 * d) / math.sqrt(2.0),
        "l3": abs(c + g + 2.0) / math.sqrt(2.0),
    }
    norm = math.hypot(g, c)
    if params.cJ < c < params.cH:
        out["l4"] = abs(g * c - d * d) / norm
    if c > params.cE:
        out["l5"] = abs(g * c - 1.0) / norm
    return out


def classify(point: EnergyMomentum, params: SystemParams, component: str | None = None,
             eps: float = CLASSIFY_EPS) -> RegionLabel:
    """Region of the bifurcation diagram containing (g, c).

    In the S region both an Earth and a Moon torus exist; ``component``
    ('earth' or 'moon') selects one, otherwise the label is S with hint 'both'.
    """
    if math.hypot(point.g - params.saddle_g, point.c - params.cJ) < eps:
        return RegionLabel(Region.SADDLE_VALUE)
    close = tuple(sorted(k for k, v in curve_distances(point, params).items() if v < eps))
    if close:
        return RegionLabel(Region.ON_CURVE, curves=close)

    roots = solve_roots(point, params)
    if roots.xi_range is None or not roots.eta_ranges:
        return RegionLabel(Region.FORBIDDEN)
    earth = any(a == -1.0 and b < 1.0 for a, b in roots.eta_ranges)
    moon = any(a > -1.0 and b == 1.0 for a, b in roots.eta_ranges)
    if roots.xi_range[0] > 1.0:
        if roots.eta_full:
            return RegionLabel(Region.P)
        raise AssertionError(f"unexpected root pattern at {point}: {roots}")
    if roots.eta_full:
        return RegionLabel(Region.L)
    if earth and moon:
        if component == "earth":
            return RegionLabel(Region.S_EARTH, "earth")
        if component == "moon":
            return RegionLabel(Region.S_MOON, "moon")
        return RegionLabel(Region.S, "both")
    if earth:
        return RegionLabel(Region.SPRIME, "earth")
    # only the Moon interval: cannot happen once mu <= 1/2
    return RegionLabel(Region.S_MOON, "moon")


def torus_count(label: RegionLabel) -> int:
    """Number of Liouville tori in the physical phase space over a regular value."""
    return {Region.S: 2, Region.SPRIME: 1, Region.L: 1, Region.P: 2,
            Region.S_EARTH: 1, Region.S_MOON: 1}[label.kind]


# ---------------------------------------------------------------------------
# critical orbits and molecules


class OrbitKind(str, enum.Enum):
    INTERIOR_COLLISION = "interior-collision"
    EXTERIOR_COLLISION = "exterior-collision"
    DOUBLE_COLLISION = "double-collision"
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


class Atom(str, enum.Enum):
    A = "A"
    B = "B"
    A_STAR = "A*"


DEGREE = {Atom.A: 1, Atom.B: 3, Atom.A_STAR: 2}


@dataclass(frozen=True)
class CriticalOrbitDescriptor:
    kind: OrbitKind
    g_at_c: float
    atom: Atom
    curve: str
    body: str | None = None  # 'E' or 'M' for collision orbits
    orientation: int = 0  # +1 / -1 for the two elliptic orbits

    @property
    def name(self) -> str:
        tag = self.kind.value
        if self.body:
            tag += f"({self.body})"
        if self.orientation:
            tag += "+" if self.orientation > 0 else "-"
        return tag


@dataclass(frozen=True)
class MoleculeEdge:
    u: int
    v: int
    family: str  # 'earth', 'moon', 'L', 'P+', 'P-'


@dataclass
class MoleculeGraph:
    nodes: list
    edges: list
    component: str  # 'earth', 'moon', 'whole'
    c: float = field(default=float("nan"))

    def degree(self, i: int) -> int:
        return sum((e.u == i) + (e.v == i) for e in self.edges)

    def check(self):
        for i, node in enumerate(self.nodes):
            if self.degree(i) != DEGREE[node.atom]:
                raise AssertionError(f"atom {node.atom.value} at {node.name} has degree {self.degree(i)}")
        gs = [n.g_at_c for n in self.nodes]
        if any(b < a for a, b in zip(gs, gs[1:])):
            raise AssertionError("nodes are not ordered by g")
        for e in self.edges:
            if not self.nodes[e.u].g_at_c <= self.nodes[e.v].g_at_c:
                raise AssertionError("edges must point towards larger g")

    def text(self) -> str:
        lines = [f"molecule ({self.component}) at c = {self.c:.10g}"]
        for i, n in enumerate(self.nodes):
            lines.append(f"  [{i}] {n.atom.value:<2} {n.name:<26} g = {n.g_at_c:.10g}")
        for e in self.edges:
            lines.append(f"  {self.nodes[e.u].atom.value}[{e.u}] -- {self.nodes[e.v].atom.value}[{e.v}]  ({e.family})")
        lines.append("  chain: " + self.chain())
        return "\n".join(lines)

    def chain(self) -> str:
        """Compact left-to-right reading, grouping atoms that share a g value."""
        groups = []
        for n in self.nodes:
            if groups and groups[-1][0] == n.g_at_c and groups[-1][1] == n.atom:
                groups[-1][2] += 1
            else:
                groups.append([n.g_at_c, n.atom, 1])
        return " - ".join((f"{k}{a.value}" if k > 1 else a.value) for _, a, k in groups)

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "c": self.c,
            "nodes": [{"kind": n.kind.value, "body": n.body, "orientation": n.orientation,
                       "atom": n.atom.value, "curve": n.curve, "g": n.g_at_c} for n in self.nodes],
            "edges": [{"u": e.u, "v": e.v, "family": e.family} for e in self.edges],
        }


class Band(str, enum.Enum):
    BELOW_J = "c<cJ"
    J_TO_E = "cJ<c<cE"
    E_TO_H = "cE<c<cH"
    ABOVE_H = "cH<c<0"


def energy_band(c: float, params: SystemParams, tol: float = BAND_EPS) -> Band:
    if not c < 0.0:
        raise DomainError(f"only negative energies are supported, got c={c!r}")
    for name, edge in (("cJ", params.cJ), ("cE", params.cE), ("cH", params.cH)):
        if abs(c - edge) <= tol:
            raise BandEdge(f"c = {c!r} is at the transition energy {name} = {edge!r}")
    if c < params.cJ:
        return Band.BELOW_J
    if c < params.cE:
        return Band.J_TO_E
    if c < params.cH:
        return Band.E_TO_H
    return Band.ABOVE_H


def critical_g(c: float, params: SystemParams) -> dict:
    """g of every critical curve at energy c (regardless of band)."""
    d = params.delta
    return {"l1": 2.0 * d - c, "l2": -c - 2.0 * d, "l3": -c - 2.0, "l4": d * d / c, "l5": 1.0 / c}


def critical_orbits_at_energy(c: float, params: SystemParams) -> list:
    band = energy_band(c, params)
    gs = critical_g(c, params)
    D = CriticalOrbitDescriptor
    K = OrbitKind
    ext_e = D(K.EXTERIOR_COLLISION, gs["l1"], Atom.A, "l1", body="E")
    ext_m = D(K.EXTERIOR_COLLISION, gs["l2"], Atom.A_STAR if band is Band.ABOVE_H else Atom.A, "l2", body="M")
    if band is Band.BELOW_J:
        return [D(K.INTERIOR_COLLISION, gs["l3"], Atom.A, "l3", body="E"),
                D(K.INTERIOR_COLLISION, gs["l3"], Atom.A, "l3", body="M"),
                ext_m, ext_e]
    orbits = []
    if band in (Band.E_TO_H, Band.ABOVE_H):
        orbits += [D(K.ELLIPTIC, gs["l5"], Atom.A, "l5", orientation=+1),
                   D(K.ELLIPTIC, gs["l5"], Atom.A, "l5", orientation=-1)]
    orbits.append(D(K.DOUBLE_COLLISION, gs["l3"], Atom.A if band is Band.J_TO_E else Atom.B, "l3"))
    if band in (Band.J_TO_E, Band.E_TO_H):
        orbits.append(D(K.HYPERBOLIC, gs["l4"], Atom.B, "l4"))
    orbits += [ext_m, ext_e]
    return orbits


def molecule(c: float, params: SystemParams) -> list:
    """Molecule(s) of the energy level c: two graphs below cJ, one above."""
    band = energy_band(c, params)
    orbits = critical_orbits_at_energy(c, params)
    E = MoleculeEdge
    if band is Band.BELOW_J:
        int_e, int_m, ext_m, ext_e = orbits
        graphs = [MoleculeGraph([int_e, ext_e], [E(0, 1, "earth")], "earth", c),
                  MoleculeGraph([int_m, ext_m], [E(0, 1, "moon")], "moon", c)]
    elif band is Band.J_TO_E:
        # double collision, hyperbolic, exterior M, exterior E
        graphs = [MoleculeGraph(orbits, [E(0, 1, "L"), E(1, 2, "moon"), E(1, 3, "earth")], "whole", c)]
    elif band is Band.E_TO_H:
        # elliptic+, elliptic-, double collision, hyperbolic, exterior M, exterior E
        graphs = [MoleculeGraph(orbits, [E(0, 2, "P+"), E(1, 2, "P-"), E(2, 3, "L"),
                                         E(3, 4, "moon"), E(3, 5, "earth")], "whole", c)]
    else:
        # elliptic+, elliptic-, double collision, exterior M (A*), exterior E
        graphs = [MoleculeGraph(orbits, [E(0, 2, "P+"), E(1, 2, "P-"), E(2, 3, "L"),
                                         E(3, 4, "earth")], "whole", c)]
    for gr in graphs:
        gr.check()
    return graphs


def torus_families(c: float, params: SystemParams) -> list:
    """Regular torus families at energy c as (family, g_lo, g_hi) triples.

    Each family is an edge of the molecule; 'P+' and 'P-' share an interval.
    """
    out = []
    for gr in molecule(c, params):
        for e in gr.edges:
            out.append((e.family, gr.nodes[e.u].g_at_c, gr.nodes[e.v].g_at_c))
    return out


def family_interval(c: float, params: SystemParams, family: str) -> tuple:
    fam = "P+" if family == "P" else family
    for name, lo, hi in torus_families(c, params):
        if name == fam:
            return lo, hi
    raise DomainError(f"no {family!r} torus family at c = {c!r}")


def family_component(family: str) -> str | None:
    """Component hint used by the period computations for a torus family."""
    return family if family in ("earth", "moon") else None


def sample_regular_point(rng: np.random.Generator, params: SystemParams, c_range=(-2.5, -0.2),
                         margin: float = 0.05, families=None):
    """Draw (point, family) with g at least ``margin`` (relative) inside a family interval."""
    while True:
        c = float(rng.uniform(*c_range))
        try:
            fams = torus_families(c, params)
        except BandEdge:
            continue
        if families is not None:
            fams = [f for f in fams if f[0] in families]
            if not fams:
                continue
        name, lo, hi = fams[int(rng.integers(len(fams)))]
        w = hi - lo
        if w <= 0.0:
            continue
        g = float(rng.uniform(lo + margin * w, hi - margin * w))
        point = EnergyMomentum(g, c)
        if not classify(point, params, eps=1e-6).regular:
            continue
        return point, name
