import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twocenters import hamiltonian_cartesian, make_params
from twocenters.errors import DomainError, SingularityError


def test_constants_quarter(params):
    assert params.cJ == pytest.approx(-1.8660254037844386, abs=1e-12)
    assert params.cE == -1.0
    assert params.cH == pytest.approx(-0.5, abs=1e-15)
    assert params.saddle_q1 == pytest.approx(0.1339745962155614, abs=1e-12)


def test_energy_examples(params):
    assert hamiltonian_cartesian(params, (0.0, 1.0, 0.0, 0.0)) == pytest.approx(-1.0 / math.sqrt(1.25), rel=1e-14)
    assert hamiltonian_cartesian(params, (params.saddle_q1, 0.0, 0.0, 0.0)) == pytest.approx(params.cJ, rel=1e-13)


@pytest.mark.parametrize("mu", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_bad_mass_ratio(mu):
    with pytest.raises(DomainError):
        make_params(mu)


def test_equal_masses():
    p = make_params(0.5)
    assert p.delta == 0.0 and p.saddle_q1 == 0.0 and p.cH == 0.0
    assert p.cJ == pytest.approx(-2.0)


def test_energy_at_primary(params):
    with pytest.raises(SingularityError):
        hamiltonian_cartesian(params, (-0.5, 0.0, 0.0, 0.0))


@given(st.floats(0.01, 0.99), st.floats(-2, 2), st.floats(0.05, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_mirror_symmetry(mu, q1, q2, p1, p2):
    # the mirrored system is the reflection q1 -> -q1 of the original
    a = hamiltonian_cartesian(make_params(mu), (q1, q2, p1, p2))
    b = hamiltonian_cartesian(make_params(1.0 - mu), (-q1, q2, -p1, p2))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@given(st.floats(1e-4, 0.9999))
def test_normalization(mu):
    p = make_params(mu)
    assert 0.0 < p.mu <= 0.5
    assert p.mu_input == pytest.approx(mu, abs=1e-15)
    assert p.mirrored == (mu > 0.5)
    assert p.cJ <= p.cE < p.cH or p.mu == 0.5


@given(st.floats(0.01, 0.49))
def test_saddle_is_stationary(mu):
    p = make_params(mu)
    h = 1e-6
    e = [hamiltonian_cartesian(p, (p.saddle_q1 + s, 0.0, 0.0, 0.0)) for s in (-h, h)]
    force = (e[1] - e[0]) / (2 * h)
    assert abs(force) < 1e-6 * max(1.0, 1.0 / mu)
    # maximum along the axis, minimum across it
    assert e[0] < p.cJ and e[1] < p.cJ
    assert hamiltonian_cartesian(p, (p.saddle_q1, 1e-3, 0.0, 0.0)) > p.cJ
    assert np.isfinite(p.saddle_g)
