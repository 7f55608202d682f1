"""Range of the rotation number over each torus family, energy by energy.

Below cJ the Earth and Moon families only reach rotation numbers slightly
above 1, which decides which T_{k,l} tori (and torus knots) exist there.
"""
import argparse

import numpy as np

from twocenters import EnergyMomentum, make_params, rotation_number
from twocenters.bifurcation import BandEdge, torus_families


def family_range(params, c, family, lo, hi, n):
    comp = family if family in ("earth", "moon") else None
    gs = lo + (hi - lo) * (np.arange(n) + 0.5) / n
    r = [rotation_number(EnergyMomentum(g, c), params, comp).value for g in gs]
    return min(r), max(r)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.25)
    ap.add_argument("--c", type=float, nargs="+", default=[-6.0, -4.0, -3.0, -2.5, -2.2, -2.0, -1.5, -1.2, -0.8, -0.3])
    ap.add_argument("--samples", type=int, default=200)
    args = ap.parse_args()
    params = make_params(args.mu)
    print(f"mu = {args.mu:g}: cJ = {params.cJ:.6f}, cE = {params.cE:.6f}, cH = {params.cH:.6f}")
    for c in args.c:
        try:
            fams = torus_families(c, params)
        except BandEdge as exc:
            print(f"c = {c:+.4f}: {exc}")
            continue
        for name, lo, hi in fams:
            if name == "P-":
                continue  # same periods as P+
            r_lo, r_hi = family_range(params, c, name, lo, hi, args.samples)
            print(f"c = {c:+.4f}  {name:<5} g in ({lo:+.4f}, {hi:+.4f})  R in ({r_lo:.5f}, {r_hi:.5f})")


if __name__ == "__main__":
    main()
