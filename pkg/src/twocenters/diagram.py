"""Grid classification of the (g, c) plane and plain SVG rendering."""
from __future__ import annotations

import csv

import numpy as np

from .bifurcation import CLASSIFY_EPS, EnergyMomentum, classify
from .params import SystemParams

COLORS = {
    "S": "#8fbcd4",
    "S'": "#c9a0dc",
    "L": "#f2c57c",
    "P": "#9fd39b",
    "forbidden": "#ffffff",
}
CURVE_COLORS = {"l1": "#b03030", "l2": "#d07020", "l3": "#303030", "l4": "#2050b0", "l5": "#208040"}
ON_CURVE_COLOR = "#000000"


def grid_axes(g_range, c_range, n_g: int, n_c: int):
    gs = np.linspace(g_range[0], g_range[1], n_g)
    cs = np.linspace(c_range[0], c_range[1], n_c)
    return gs, cs


def classify_grid(params: SystemParams, gs, cs, eps: float = CLASSIFY_EPS):
    """Labels indexed [i_c, i_g]."""
    return [[classify(EnergyMomentum(g, c), params, eps=eps).text for g in gs] for c in cs]


def write_diagram_csv(fh, params: SystemParams, gs, cs, labels):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["mu", "g", "c", "label"])
    mu = repr(params.mu_input)
    for i, c in enumerate(cs):
        for j, g in enumerate(gs):
            w.writerow([mu, repr(float(g)), repr(float(c)), labels[i][j]])


def curve_polylines(params: SystemParams, g_range, c_range, n: int = 400) -> dict:
    """Critical curves as (g, c) point arrays, each on its own c-range."""
    c_lo, c_hi = c_range
    d = params.delta
    out = {}

    def add(name, lo, hi, gfun):
        lo, hi = max(lo, c_lo), min(hi, c_hi)
        if hi <= lo:
            return
        c = np.linspace(lo, hi, n)
        g = gfun(c)
        keep = (g >= g_range[0]) & (g <= g_range[1])
        if keep.sum() >= 2:
            out[name] = np.column_stack([g[keep], c[keep]])

    add("l1", c_lo, c_hi, lambda c: 2.0 * d - c)
    add("l2", c_lo, c_hi, lambda c: -c - 2.0 * d)
    add("l3", c_lo, c_hi, lambda c: -c - 2.0)
    if d > 0.0:
        add("l4", params.cJ, params.cH, lambda c: d * d / c)
    else:
        # equal masses: l4 is the axis g = 0 across the open band (-2, 0)
        add("l4", params.cJ, params.cH, lambda c: np.zeros_like(c))
    add("l5", params.cE, 0.0, lambda c: 1.0 / c)
    return out


def _color(label: str) -> str:
    return COLORS.get(label, ON_CURVE_COLOR)


def diagram_svg(params: SystemParams, gs, cs, labels, size: int = 1000, curves: bool = True) -> str:
    n_c, n_g = len(cs), len(gs)
    cw, ch = size / n_g, size / n_c
    g0, g1, c0, c1 = gs[0], gs[-1], cs[0], cs[-1]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<title>bifurcation diagram, mu = {params.mu_input!r}</title>']
    for i in range(n_c):
        y = size - (i + 1) * ch  # larger c at the top
        row = labels[i]
        j = 0
        while j < n_g:
            k = j
            while k + 1 < n_g and row[k + 1] == row[j]:
                k += 1
            parts.append(f'<rect x="{j * cw:.3f}" y="{y:.3f}" width="{(k - j + 1) * cw:.3f}" '
                         f'height="{ch:.3f}" fill="{_color(row[j])}"/>')
            j = k + 1
    if curves:
        for name, pts in curve_polylines(params, (g0, g1), (c0, c1)).items():
            x = (pts[:, 0] - g0) / (g1 - g0) * size
            y = size - (pts[:, 1] - c0) / (c1 - c0) * size
            coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(x, y))
            parts.append(f'<polyline id="{name}" fill="none" stroke="{CURVE_COLORS[name]}" stroke-width="2" '
                         f'points="{coords}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def orbit_svg(q1, q2, size: int = 1000, primaries=((-0.5, 0.0), (0.5, 0.0))) -> str:
    """Cartesian projection of a trajectory with the two primaries marked."""
    xs = np.concatenate([np.asarray(q1), [p[0] for p in primaries]])
    ys = np.concatenate([np.asarray(q2), [p[1] for p in primaries]])
    half = 0.55 * max(xs.max() - xs.min(), ys.max() - ys.min(), 1e-9)
    cx, cy = 0.5 * (xs.max() + xs.min()), 0.5 * (ys.max() + ys.min())

    def tx(x):
        return (np.asarray(x) - cx + half) / (2 * half) * size

    def ty(y):
        return size - (np.asarray(y) - cy + half) / (2 * half) * size
    coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(tx(q1), ty(q2)))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<polyline fill="none" stroke="#2050b0" stroke-width="1" points="{coords}"/>']
    for px, py in primaries:
        parts.append(f'<circle cx="{float(tx(px)):.2f}" cy="{float(ty(py)):.2f}" r="5" fill="#000"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
