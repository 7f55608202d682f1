import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from twocenters import evaluate_H_G, make_params, to_cartesian, to_doubled, to_elliptic
from twocenters.coords import (Chart, cartesian, doubled, doubled_positions_to_cartesian, elliptic,
                               wrap_angle)
from twocenters.errors import ChartSingularity

coord = st.floats(-2.0, 2.0)
off_axis = st.floats(0.05, 2.0).flatmap(lambda a: st.sampled_from([a, -a]))
momentum = st.floats(-3.0, 3.0)
mass = st.floats(0.01, 0.99)


def test_elliptic_example(params):
    e = to_elliptic(cartesian(0.0, 1.0, 0.0, 0.0), params)
    np.testing.assert_allclose(e.values, [2.0 * math.sqrt(1.25), 0.0, 0.0, 0.0], atol=1e-15)


def test_doubled_example():
    d = to_doubled(elliptic(2.0, 0.0, 0.3, -0.1))
    lam = math.acosh(2.0)
    np.testing.assert_allclose(d.values, [lam, math.pi / 2, 0.3 * math.sinh(lam), 0.1], rtol=1e-14)
    assert d.values[2] == pytest.approx(0.5196152422706632, rel=1e-12)


def test_H_G_example(params):
    pair = evaluate_H_G(elliptic(2.0, 0.0, 0.0, 0.0), params)
    assert pair.h_value == pytest.approx(-1.0, rel=1e-15)
    assert pair.g_value == pytest.approx(0.0, abs=1e-15)


def test_axis_is_singular_for_elliptic_momenta(params):
    with pytest.raises(ChartSingularity) as info:
        to_elliptic(cartesian(0.2, 0.0, 0.1, 0.1), params)
    assert info.value.positions is not None


def test_primary_is_singular(params):
    with pytest.raises(ChartSingularity):
        to_doubled(cartesian(0.5, 0.0, 0.1, 0.0), params)


def test_states_are_immutable():
    s = doubled(0.1, 0.2, 0.3, 0.4)
    with pytest.raises(ValueError):
        s.values[0] = 1.0
    assert s.chart is Chart.DOUBLED


@given(st.floats(-50, 50))
def test_wrap_angle_range(x):
    w = wrap_angle(x)
    assert -math.pi <= w < math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-12)


@given(mass, coord, off_axis, momentum, momentum)
def test_round_trip_through_all_charts(mu, q1, q2, p1, p2):
    params = make_params(mu)
    start = cartesian(q1, q2, p1, p2)
    dbl = to_doubled(start, params)
    back = to_cartesian(dbl, params)
    np.testing.assert_allclose(back.values, start.values, atol=1e-10)
    ell = to_elliptic(back, params)
    again = to_cartesian(ell, params, upper=q2 > 0)
    np.testing.assert_allclose(again.values, start.values, atol=1e-10)


@given(coord, off_axis, momentum, momentum, st.floats(0, 2 * math.pi))
def test_momenta_preserve_one_form(q1, q2, p1, p2, angle):
    # p.dq must agree in both charts for any displacement
    state = to_doubled(cartesian(q1, q2, p1, p2))
    lam, nu, pl, pn = state.values
    h = 1e-6
    dl, dn = h * math.cos(angle), h * math.sin(angle)
    a = np.array(doubled_positions_to_cartesian(lam + dl, nu + dn))
    b = np.array(doubled_positions_to_cartesian(lam - dl, nu - dn))
    dq = (a - b) / 2.0
    # central differences are exact to O(h^3); rounding dominates at ~1e-16 / h
    assert (p1 * dq[0] + p2 * dq[1]) / h == pytest.approx((pl * dl + pn * dn) / h, abs=1e-8)


@given(mass, coord, off_axis, momentum, momentum)
def test_conserved_pair_agrees_across_charts(mu, q1, q2, p1, p2):
    params = make_params(mu)
    start = cartesian(q1, q2, p1, p2)
    assume(min(math.hypot(q1 + 0.5, q2), math.hypot(q1 - 0.5, q2)) > 0.05)
    values = [evaluate_H_G(s, params) for s in (start, to_elliptic(start, params), to_doubled(start, params))]
    scale = 1.0 + abs(values[0].h_value) + abs(values[0].g_value)
    for v in values[1:]:
        assert v.h_value == pytest.approx(values[0].h_value, abs=1e-10 * scale)
        assert v.g_value == pytest.approx(values[0].g_value, abs=1e-10 * scale)


@given(mass, st.floats(0.0, 2.0), st.floats(-math.pi, math.pi), momentum, momentum)
def test_deck_transformation(mu, lam, nu, pl, pn):
    # (lam, nu) and (-lam, -nu) are the same point with the same velocity
    params = make_params(mu)
    assume(abs(math.cosh(lam) ** 2 - math.cos(nu) ** 2) > 1e-3)
    a = evaluate_H_G(doubled(lam, nu, pl, pn), params)
    b = evaluate_H_G(doubled(-lam, -nu, -pl, -pn), params)
    assert b.h_value == pytest.approx(a.h_value, rel=1e-12, abs=1e-12)
    assert b.g_value == pytest.approx(a.g_value, rel=1e-12, abs=1e-12)
