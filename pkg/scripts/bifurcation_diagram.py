"""Classify a (g, c) grid for several mass ratios and write CSV + SVG per ratio."""
import argparse
from pathlib import Path

from twocenters import make_params
from twocenters.diagram import classify_grid, diagram_svg, grid_axes, write_diagram_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, nargs="+", default=[0.1, 0.25, 0.5])
    ap.add_argument("--resolution", type=int, default=300)
    ap.add_argument("--out", default="out/diagrams")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    gs, cs = grid_axes((-3.0, 3.0), (-3.0, -0.05), args.resolution, args.resolution)
    for mu in args.mu:
        params = make_params(mu)
        labels = classify_grid(params, gs, cs)
        stem = out / f"diagram_mu{mu:g}"
        with open(stem.with_suffix(".csv"), "w", newline="") as fh:
            write_diagram_csv(fh, params, gs, cs, labels)
        stem.with_suffix(".svg").write_text(diagram_svg(params, gs, cs, labels))
        counts = {}
        for row in labels:
            for lab in row:
                counts[lab] = counts.get(lab, 0) + 1
        print(f"mu = {mu:g}: " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))


if __name__ == "__main__":
    main()
