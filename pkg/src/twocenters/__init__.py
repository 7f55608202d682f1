"""Euler's problem of two fixed centers: bifurcation diagram, regularized
dynamics, rotation numbers, homoclinic orbits and torus knots."""

from .bifurcation import EnergyMomentum, classify, critical_orbits_at_energy, molecule, solve_roots
from .coords import PhaseState, evaluate_H_G, to_cartesian, to_doubled, to_elliptic
from .dynamics import initial_state, integrate, vector_field
from .homoclinic import collision_homoclinic, collision_momenta, lyapunov_orbit, verify_homoclinic
from .knots import certify_knot, detect_closure, winding_counts
from .params import SystemParams, hamiltonian_cartesian, make_params
from .quadrature import rotation_number, solve_family, subsystem_cells

__all__ = [
    "EnergyMomentum", "PhaseState", "SystemParams",
    "certify_knot", "classify", "collision_homoclinic", "collision_momenta", "critical_orbits_at_energy",
    "detect_closure", "evaluate_H_G", "hamiltonian_cartesian", "initial_state", "integrate",
    "lyapunov_orbit", "make_params", "molecule", "rotation_number", "solve_family", "solve_roots",
    "subsystem_cells", "to_cartesian", "to_doubled", "to_elliptic", "vector_field", "verify_homoclinic",
    "winding_counts",
]
