import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twocenters import collision_homoclinic, collision_momenta, lyapunov_orbit, make_params, verify_homoclinic
from twocenters import integrator
from twocenters.dynamics import integrate, q_parts
from twocenters.errors import BandError, ExplicitlyDegenerate, VerificationFailure
from twocenters.homoclinic import (critical_integral, equilibrium_nu, hyperbola_vertex, leaf_orbit, leaf_state,
                                   rotation_count)


def test_leaf_constants(params):
    assert critical_integral(-1.2, params) == pytest.approx(-0.2083333333, abs=1e-10)
    assert equilibrium_nu(-1.2, params) == pytest.approx(1.1410209, abs=1e-7)
    assert params.delta + (-1.2) * math.cos(equilibrium_nu(-1.2, params)) == pytest.approx(0.0, abs=1e-16)


def test_vertex_at_saddle_energy(params):
    q1, q2 = hyperbola_vertex(params.cJ, params)
    assert q1 == pytest.approx(params.saddle_q1, abs=1e-12) and q2 == 0.0


def test_lyapunov_orbit_is_periodic_on_its_hyperbola(params):
    orb = lyapunov_orbit(-1.2, params)
    assert orb.nu_deviation < 1e-8
    assert orb.eta_locus == pytest.approx(0.5 / 1.2, abs=1e-12)
    assert orb.period > 0
    assert np.max(np.abs(orb.trajectory.at([0.0, orb.period])[1] - orb.trajectory.y[0])) < 1e-8
    assert max(np.abs(r).max() for r in orb.h_residuals()) < 1e-8


def test_lyapunov_limits(params):
    assert lyapunov_orbit(params.cJ + 1e-3, params).max_distance_from(params.saddle_q1) <= 0.05
    assert abs(lyapunov_orbit(params.cH - 2.5e-4, params).eta_locus - 1.0) <= 1e-3


def test_band_errors(params):
    for c in (params.cJ - 0.1, params.cH + 0.1):
        with pytest.raises(BandError):
            lyapunov_orbit(c, params)
    with pytest.raises(ExplicitlyDegenerate):
        lyapunov_orbit(-1.5, make_params(0.5))


def test_certification_example(params):
    report = verify_homoclinic(-1.2, params, "earth", n_orbits=20)
    assert report.verdict
    report.raise_for_verdict()
    d = json.loads(json.dumps(report.to_dict()))
    assert d["verdict"] == "pass" and len(d["orbits"]) == 20
    assert set(d["orbits"][0]) == {"phase", "sign", "checkpoints_fwd", "checkpoints_bwd", "rotation_count",
                                   "collision_flag", "pass"}


def test_failed_report_raises(params):
    report = verify_homoclinic(-1.2, params, "moon", n_orbits=2, final_tol=1e-30)
    assert not report.verdict
    with pytest.raises(VerificationFailure):
        report.raise_for_verdict()


def test_components_never_mix(params):
    c = -1.2
    nu_star = equilibrium_nu(c, params)
    for comp, inside in (("earth", lambda nu: np.cos(nu) < -params.delta / c),
                         ("moon", lambda nu: np.cos(nu) > -params.delta / c)):
        orbit = leaf_orbit(c, params, comp, 0.3, 0.2, (1, -1), horizon=200.0)
        for traj in (orbit.forward, orbit.backward):
            nu = traj.y[:, 1]
            assert np.all(inside(nu) | (np.abs(np.abs(nu) - nu_star) < 1e-6)
                          | (np.abs(2 * math.pi - np.abs(nu) - nu_star) < 1e-6))
            assert np.min(np.abs(np.cos(nu) + params.delta / c)) > 0.0


def test_leaf_mode_agrees_with_full_field(params):
    # two routes to the same orbit: the first-order nu-equation and the full field
    c = -1.2
    y0 = leaf_state(c, params, "earth", 0.3, 0.1, (1, 1))
    # kept short: near nu* the full field amplifies round-off at the hyperbolic rate
    leaf = integrate(y0, params, c, 2.0, mode=integrator.LEAF)
    full = integrate(y0, params, c, 2.0, mode=integrator.FULL)
    ts = np.linspace(0, 2, 11)
    np.testing.assert_allclose(leaf.at(ts), full.at(ts), atol=1e-8)


def test_rotation_count_is_one(params):
    orbit = leaf_orbit(-1.2, params, "earth", 0.5, 0.0, (1, 1))
    assert rotation_count(orbit) == 1


def test_reversed_orbit_also_passes(params):
    c = -1.2
    a = verify_homoclinic(c, params, "earth", n_orbits=1, rng=np.random.default_rng(1))
    y0 = leaf_state(c, params, "earth", *a.orbits[0].phase, a.orbits[0].sign)
    rev = leaf_state(c, params, "earth", *a.orbits[0].phase, tuple(-s for s in a.orbits[0].sign))
    np.testing.assert_allclose(rev[2:], -y0[2:])
    fwd = leaf_orbit(c, params, "earth", *a.orbits[0].phase, a.orbits[0].sign)
    back = leaf_orbit(c, params, "earth", *a.orbits[0].phase, tuple(-s for s in a.orbits[0].sign))
    assert fwd.forward.y[-1, 1] == pytest.approx(back.backward.y[-1, 1], abs=1e-8)
    assert a.verdict


def test_collision_momenta_example(params):
    m = collision_momenta(-1.2, params)
    assert m.p_lambda_sq == pytest.approx(0.2958333333, abs=1e-10)
    assert m.p_nu_sq_moon == pytest.approx(0.2041666667, abs=1e-10)
    assert m.p_nu_sq_earth == pytest.approx(1.2041666667, abs=1e-10)


def test_collision_momenta_positive_across_band():
    worst = math.inf
    for mu in np.linspace(0.01, 0.49, 50):
        p = make_params(mu)
        eps = 1e-6
        for c in np.linspace(p.cJ + eps, p.cH - eps, 200):
            m = collision_momenta(c, p)
            worst = min(worst, m.p_lambda_sq, m.p_nu_sq_moon, m.p_nu_sq_earth)
    assert worst > 0.0


@pytest.mark.parametrize("focus", ["E", "M"])
def test_collision_homoclinic(params, focus):
    orbit, report = collision_homoclinic(-1.2, params, focus)
    assert report.verdict
    assert report.orbits[0].collision_flag
    ql, qn = q_parts(orbit.forward.y[0], -1.2, params.delta)
    assert abs(ql + qn) < 1e-12


@settings(deadline=None, max_examples=10)
@given(st.floats(0.05, 0.45), st.floats(0.1, 0.9), st.sampled_from(["earth", "moon"]),
       st.floats(-1, 1), st.floats(-0.9, 0.9))
def test_leaf_orbits_converge(mu, t, component, lam_phase, nu_phase):
    p = make_params(mu)
    c = p.cJ + t * (p.cH - p.cJ)
    report = verify_homoclinic(c, p, component, n_orbits=1, rng=np.random.default_rng(int(1e6 * (lam_phase + 2))))
    assert report.verdict, report.orbits[0].reasons
