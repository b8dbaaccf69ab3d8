"""Closed-form oracles: Markovian emission, the time-reversed target pulse,
the resolvent self-energy, the exact biexponential c1(t), and the photon
amplitude c(k;t).

All time-domain results are returned in the rotating frame (the carrier
e^{-i omega_q t} is dropped), matching the convention of the dynamics module.
"""

from __future__ import annotations

import math

import numpy as np

from .dispersion import biexp_rates
from .model import coupling_from_gamma


def markovian_pulse_time(t, gamma: float = 1.0):
    """theta(t) e^{-gamma t}: envelope of the emitted field at the first qubit."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0, np.exp(-gamma * np.clip(t, 0, None)), 0.0).astype(complex)


def markovian_pulse_freq(omega, gamma: float = 1.0, omega_q: float = 0.0):
    """Lorentzian spectrum 1/[gamma - i(omega - omega_q)]."""
    omega = np.asarray(omega, dtype=float)
    return 1.0 / (gamma - 1j * (omega - omega_q))


def target_pulse_time(t, gamma: float = 1.0, delta_t: float = 0.0):
    """theta(delta_t - t) e^{gamma (t - delta_t)}: the time-reversed envelope
    required at the second qubit for perfect absorption."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= delta_t, np.exp(gamma * (np.clip(t, None, delta_t) - delta_t)), 0.0).astype(complex)


def target_pulse_freq(omega, gamma: float = 1.0, omega_q: float = 0.0, delta_t: float = 0.0):
    """e^{i omega delta_t} / [gamma + i(omega - omega_q)]."""
    omega = np.asarray(omega, dtype=float)
    return np.exp(1j * omega * delta_t) / (gamma + 1j * (omega - omega_q))


def self_energy(delta, d: float, gamma: float = 1.0, v_g: float = 1.0):
    """Qubit self-energy under the far-separation dispersion:
    Sigma(delta + i0+) = -(i pi g^2 / d) [delta_t + 2/(i delta - gamma)]."""
    delta = np.asarray(delta, dtype=complex)
    g = coupling_from_gamma(gamma, v_g)
    delta_t = d / v_g + 2.0 / gamma
    return (-1j * math.pi * g**2 / d) * (delta_t + 2.0 / (1j * delta - gamma))


def c1_resolvent(t, d: float, gamma: float = 1.0, v_g: float = 1.0):
    """Exact excited-qubit amplitude under the far-separation dispersion
    (rotating frame): w1 e^{-gamma1 t} - w2 e^{-gamma2 t}."""
    t = np.asarray(t, dtype=float)
    bi = biexp_rates(d, gamma, v_g)
    return bi.w1 * np.exp(-bi.gamma1 * t) - bi.w2 * np.exp(-bi.gamma2 * t)


def photon_amplitude(delta_k, t, d: float, gamma: float = 1.0, v_g: float = 1.0):
    """Emitted photon amplitude c(k;t) in the rotating frame, as a function of
    the mode detuning delta(k) = omega(k) - omega_q:

        c(k;t) = -g sum_i w_i [e^{-gamma_i t} - e^{-i delta t}] / (delta + i gamma_i)
    """
    delta_k = np.asarray(delta_k, dtype=complex)
    bi = biexp_rates(d, gamma, v_g)
    g = coupling_from_gamma(gamma, v_g)
    out = np.zeros(np.broadcast(delta_k, np.asarray(t)).shape, dtype=complex)
    # weights follow the biexponential c1 = w1 e^{-gamma1 t} - w2 e^{-gamma2 t}
    for w_i, gamma_i in ((bi.w1, bi.gamma1), (-bi.w2, bi.gamma2)):
        out = out - g * w_i * (np.exp(-gamma_i * t) - np.exp(-1j * delta_k * t)) / (
            delta_k + 1j * gamma_i
        )
    return out


def markov_limit_max() -> float:
    """Maximum transfer probability 4/e^2 on a linear band in the Markovian
    limit (cascade of two identical qubits)."""
    return 4.0 / math.e**2


def cascade_c2(t, gamma: float = 1.0, retardation: float = 0.0):
    """Markovian chiral-cascade amplitude of the second qubit on a linear band,
    c2 = -2 gamma tau e^{-gamma tau} with tau = t - retardation; its maximum
    squared modulus is 4/e^2."""
    tau = np.clip(np.asarray(t, dtype=float) - retardation, 0.0, None)
    return -2.0 * gamma * tau * np.exp(-gamma * tau)


def ww_field_envelope(x, t, gamma: float = 1.0, v_g: float = 1.0):
    """Wigner-Weisskopf spatial envelope of the emitted field,
    theta(v_g t - x) theta(x) e^{-gamma (t - x/v_g)}, unnormalized."""
    x = np.asarray(x, dtype=float)
    arg = t - x / v_g
    env = np.exp(-gamma * np.clip(arg, 0.0, None))
    return np.where((arg >= 0) & (x >= 0), env, 0.0)
