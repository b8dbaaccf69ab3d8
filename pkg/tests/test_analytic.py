import math

import numpy as np
import pytest

from dispersim.analytic import (
    c1_resolvent,
    cascade_c2,
    markov_limit_max,
    markovian_pulse_freq,
    markovian_pulse_time,
    photon_amplitude,
    self_energy,
    target_pulse_freq,
    target_pulse_time,
    ww_field_envelope,
)
from dispersim.dispersion import biexp_rates


def test_markovian_pulse_pair_are_fourier_partners():
    # numerical FT of theta(t) e^{-gamma t} must match 1/(gamma - i omega)
    gamma = 1.3
    t = np.linspace(0, 60, 600001)
    for omega in (-2.0, 0.0, 0.7, 3.1):
        ft = np.trapezoid(markovian_pulse_time(t, gamma) * np.exp(1j * omega * t), t)
        assert ft == pytest.approx(markovian_pulse_freq(omega, gamma), abs=1e-6)


def test_target_pulse_is_time_reversed_markovian():
    gamma, delta_t = 0.8, 4.0
    t = np.linspace(-2, 6, 801)
    np.testing.assert_allclose(
        target_pulse_time(t, gamma, delta_t),
        markovian_pulse_time(delta_t - t, gamma),
        atol=1e-14,
    )


def test_target_pulse_freq_matches_time_domain():
    gamma, delta_t = 1.0, 3.0
    t = np.linspace(-40, delta_t, 800001)
    for omega in (-1.5, 0.0, 2.0):
        ft = np.trapezoid(target_pulse_time(t, gamma, delta_t) * np.exp(1j * omega * t), t)
        assert ft == pytest.approx(target_pulse_freq(omega, gamma, 0.0, delta_t), abs=1e-6)


def test_c1_is_inverse_laplace_of_resolvent():
    # c1(t) = (1/2 pi) int d delta e^{-i delta t} / (delta - Sigma(delta))
    d, gamma = 2.0, 1.0
    deltas = np.linspace(-4000, 4000, 4_000_001)
    resolvent = 1.0 / (deltas - self_energy(deltas, d, gamma))
    for t in (0.3, 1.0, 2.5):
        val = 1j * np.trapezoid(np.exp(-1j * deltas * t) * resolvent, deltas) / (2 * np.pi)
        assert val == pytest.approx(complex(c1_resolvent(t, d, gamma)), abs=5e-4)


def test_c1_initial_conditions_and_rate_identities():
    for d in (0.3, 1.0, 5.0, 50.0):
        bi = biexp_rates(d)
        assert bi.gamma1 * bi.gamma2 == pytest.approx(1.0, abs=1e-12)
        assert bi.w1 - bi.w2 == pytest.approx(1.0, abs=1e-12)
        assert c1_resolvent(0.0, d) == pytest.approx(1.0, rel=1e-13)
        # c1'(0) = -(w1 gamma1 - w2 gamma2) = -(gamma + 2/d)
        eps = 1e-7
        deriv = (c1_resolvent(eps, d) - c1_resolvent(0.0, d)) / eps
        assert deriv == pytest.approx(-(1.0 + 2.0 / d), rel=1e-5)


def test_photon_amplitude_matches_emission_integral():
    # oracle: c(k;t) = -i g int_0^t e^{-i delta (t-s)} c1(s) ds (qubit at x=0)
    from dispersim.model import coupling_from_gamma

    d, gamma = 2.0, 1.0
    g = coupling_from_gamma(gamma, 1.0)
    t = 3.0
    s = np.linspace(0, t, 200001)
    for delta in (0.0, 0.5, -1.3, 4.0):
        direct = -1j * g * np.trapezoid(
            np.exp(-1j * delta * (t - s)) * c1_resolvent(s, d, gamma), s
        )
        assert complex(photon_amplitude(delta, t, d, gamma)) == pytest.approx(
            direct, abs=1e-9
        )


def test_photon_amplitude_vanishes_initially():
    np.testing.assert_allclose(
        photon_amplitude(np.array([0.5, -1.0]), 0.0, 2.0), 0.0, atol=1e-15
    )


def test_markov_limit_value():
    assert markov_limit_max() == pytest.approx(4 / math.e**2, rel=1e-15)


def test_cascade_c2_peak_is_4_over_e2():
    t = np.linspace(0, 20, 200001)
    c2 = cascade_c2(t, gamma=1.0)
    assert np.max(np.abs(c2) ** 2) == pytest.approx(4 / math.e**2, rel=1e-8)
    # peak at tau = 1/gamma
    assert t[np.argmax(np.abs(c2))] == pytest.approx(1.0, abs=1e-3)


def test_cascade_c2_solves_cascade_ode():
    # c2' = -gamma c2 - 2 gamma c1 with c1 = e^{-gamma t}
    gamma = 1.0
    t = np.linspace(0.05, 8, 1601)
    c2 = cascade_c2(t, gamma)
    dc2 = np.gradient(c2, t)
    rhs = -gamma * c2 - 2 * gamma * np.exp(-gamma * t)
    # np.gradient is first-order at the edges; compare the interior only
    np.testing.assert_allclose(dc2[1:-1], rhs[1:-1], atol=5e-5)


def test_ww_field_envelope_support_and_decay():
    x = np.linspace(-1, 5, 601)
    env = ww_field_envelope(x, t=3.0)
    assert np.all(env[x < 0] == 0)
    assert np.all(env[x > 3.0] == 0)
    inside = (x > 0.1) & (x < 2.9)
    np.testing.assert_allclose(env[inside], np.exp(-(3.0 - x[inside])), rtol=1e-12)
