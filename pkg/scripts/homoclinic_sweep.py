"""Certify homoclinic leaf orbits across the Lyapunov band for a few mass ratios.

Prints one line per (mu, c, component) with the worst final distance to the
Lyapunov locus in each time direction.
"""
import argparse

import numpy as np

from twocenters import collision_homoclinic, make_params, verify_homoclinic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, nargs="+", default=[0.1, 0.25, 0.45])
    ap.add_argument("--energies", type=int, default=5, help="energies per band (interior points)")
    ap.add_argument("--orbits", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    failures = 0
    for mu in args.mu:
        p = make_params(mu)
        for t in np.linspace(0.0, 1.0, args.energies + 2)[1:-1]:
            c = p.cJ + t * (p.cH - p.cJ)
            for comp in ("earth", "moon"):
                rep = verify_homoclinic(c, p, comp, args.orbits, rng)
                fwd = max(o.checkpoints_fwd[-1] for o in rep.orbits)
                bwd = max(o.checkpoints_bwd[-1] for o in rep.orbits)
                failures += not rep.verdict
                print(f"mu={mu:<5g} c={c:+.6f} {comp:<5} fwd={fwd:.2e} bwd={bwd:.2e} "
                      f"{'pass' if rep.verdict else 'FAIL'}")
            for focus in ("E", "M"):
                _, rep = collision_homoclinic(c, p, focus)
                failures += not rep.verdict
                print(f"mu={mu:<5g} c={c:+.6f} collision {focus} {'pass' if rep.verdict else 'FAIL'}")
    print(f"{failures} failing cases")


if __name__ == "__main__":
    main()
