import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dispersim.dispersion import LinearDispersion, analytic_dispersion_far
from dispersim.model import (
    OMEGA_Q_DEFAULT,
    PhysicalParams,
    SimulationGrid,
    StateVector,
    build_grid,
    coupling_from_gamma,
)


def test_default_unit_system():
    p = PhysicalParams(d=5.0)
    assert p.gamma == 1.0 and p.v_g == 1.0
    # gamma = pi * 1e-4 * omega_q
    assert p.omega_q == pytest.approx(1e4 / math.pi, rel=1e-15)
    assert p.gamma == pytest.approx(math.pi * 1e-4 * p.omega_q, rel=1e-15)


def test_coupling_from_gamma_roundtrip():
    g = coupling_from_gamma(1.0, 1.0)
    assert math.pi * g**2 / 1.0 == pytest.approx(1.0, rel=1e-15)
    g2 = coupling_from_gamma(2.5, 3.0)
    assert math.pi * g2**2 / 3.0 == pytest.approx(2.5, rel=1e-15)


@pytest.mark.parametrize("field", ["d", "gamma", "v_g", "omega_q"])
def test_params_reject_nonpositive(field):
    kwargs = {"d": 1.0, "gamma": 1.0, "v_g": 1.0, "omega_q": 10.0}
    kwargs[field] = 0.0
    with pytest.raises(ValueError, match=field):
        PhysicalParams(**kwargs)


def test_lambda_q():
    p = PhysicalParams(d=1.0, omega_q=2 * math.pi)
    assert p.lambda_q == pytest.approx(1.0, rel=1e-15)


def test_grid_requires_uniform_positive_k():
    with pytest.raises(ValueError, match="positive"):
        SimulationGrid(k_values=np.array([-1.0, 0.5, 2.0]), x1=0.0, x2=1.0)
    with pytest.raises(ValueError, match="uniform"):
        SimulationGrid(k_values=np.array([1.0, 2.0, 4.0]), x1=0.0, x2=1.0)


def test_grid_properties():
    grid = SimulationGrid(k_values=np.linspace(1.0, 2.0, 11), x1=0.0, x2=0.5)
    assert grid.n_modes == 11
    assert grid.delta_k == pytest.approx(0.1)
    assert grid.x_period == pytest.approx(2 * math.pi / 0.1)


def test_build_grid_covers_window():
    p = PhysicalParams(d=5.0)
    disp = analytic_dispersion_far(p)
    grid = build_grid(p, disp, n_points=101, window=40.0)
    omegas = np.asarray(disp.omega_of_k(grid.k_values))
    assert omegas[0] == pytest.approx(p.omega_q - 40.0, abs=1e-6)
    assert omegas[-1] == pytest.approx(p.omega_q + 40.0, abs=1e-6)
    assert grid.x1 == 0.0 and grid.x2 == p.d


def test_build_grid_default_window_is_40_gamma():
    p = PhysicalParams(d=5.0, gamma=2.0, omega_q=OMEGA_Q_DEFAULT)
    grid = build_grid(p, LinearDispersion(), n_points=11)
    assert grid.k_values[0] == pytest.approx(p.omega_q - 80.0)
    assert grid.k_values[-1] == pytest.approx(p.omega_q + 80.0)


def test_state_vector_roundtrip_and_probabilities():
    vec = np.array([0.6, 0.0, 0.8j, 0.0], dtype=complex)
    s = StateVector.from_vector(vec)
    assert s.p1 == pytest.approx(0.36)
    assert s.photon_probability == pytest.approx(0.64)
    np.testing.assert_allclose(s.to_vector(), vec)
    s.check_normalized()
    with pytest.raises(ValueError, match="norm"):
        StateVector.from_vector(vec * 1.1).check_normalized()


@given(st.integers(min_value=1, max_value=50))
def test_qubit1_excited_is_normalized(n):
    s = StateVector.qubit1_excited(n)
    assert s.p1 == 1.0 and s.p2 == 0.0 and s.photon_probability == 0.0
    assert s.norm == pytest.approx(1.0, rel=1e-15)
