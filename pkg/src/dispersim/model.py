"""Domain types, unit conventions and grid construction.

Internal unit system: gamma = 1 (rates), v_g = 1 (velocities), so lengths are
measured in v_g/gamma and times in 1/gamma.  The qubit frequency defaults to
omega_q = 1e4/pi, i.e. gamma = pi * 1e-4 * omega_q.  All dynamics are carried
out in the rotating frame: mode energies enter as detunings
delta(k) = omega(k) - omega_q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

OMEGA_Q_DEFAULT = 1e4 / math.pi
DEFAULT_N = 2000
DEFAULT_WINDOW_FACTOR = 40.0  # half-width of the frequency window, in units of gamma

NORM_TOL = 1e-10


def coupling_from_gamma(gamma: float, v_g: float) -> float:
    """Qubit-waveguide coupling g with decay rate gamma = pi g^2 / v_g."""
    if gamma <= 0 or v_g <= 0:
        raise ValueError(f"gamma and v_g must be positive, got {gamma}, {v_g}")
    return math.sqrt(gamma * v_g / math.pi)


@dataclass(frozen=True)
class PhysicalParams:
    """Physical parameters of the two-qubit chiral waveguide system."""

    d: float
    gamma: float = 1.0
    v_g: float = 1.0
    omega_q: float = OMEGA_Q_DEFAULT

    def __post_init__(self):
        for name in ("d", "gamma", "v_g", "omega_q"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def g(self) -> float:
        return coupling_from_gamma(self.gamma, self.v_g)

    @property
    def pulse_width(self) -> float:
        """Spatial extent v_g/gamma of the emitted pulse."""
        return self.v_g / self.gamma

    @property
    def lambda_q(self) -> float:
        """Resonant wavelength 2 pi v_g / omega_q."""
        return 2 * math.pi * self.v_g / self.omega_q


@dataclass(frozen=True)
class SimulationGrid:
    """Uniform k-grid plus qubit positions; defines the discretized Hilbert space.

    State vectors over this grid have dimension N + 2 and are ordered
    (qubit 1, qubit 2, mode k_1, ..., mode k_N).
    """

    k_values: np.ndarray
    x1: float
    x2: float

    def __post_init__(self):
        k = np.asarray(self.k_values, dtype=float)
        object.__setattr__(self, "k_values", k)
        if k.ndim != 1 or k.size < 2:
            raise ValueError("k_values must be a 1-D array with at least 2 points")
        dk = np.diff(k)
        if np.any(k <= 0):
            raise ValueError("all k_values must be positive (right-propagating band)")
        spacing_tol = 64 * np.finfo(float).eps * float(np.max(np.abs(k)))
        if np.any(dk <= 0) or not np.allclose(dk, dk[0], rtol=0, atol=spacing_tol):
            raise ValueError("k_values must be strictly increasing and uniform")

    @property
    def n_modes(self) -> int:
        return self.k_values.size

    @property
    def delta_k(self) -> float:
        return float(self.k_values[1] - self.k_values[0])

    @property
    def x_period(self) -> float:
        """Spatial periodicity 2 pi / delta_k of the discretized field."""
        return 2 * math.pi / self.delta_k


def build_grid(
    params: PhysicalParams,
    dispersion,
    n_points: int = DEFAULT_N,
    window: float | None = None,
    x1: float = 0.0,
    x2: float | None = None,
) -> SimulationGrid:
    """Uniform k-grid whose image under `dispersion` covers
    [omega_q - window, omega_q + window].

    `dispersion` must expose k_of_omega(); non-monotone dispersions raise
    NonInvertibleDispersionError during that call.
    """
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if window is None:
        window = DEFAULT_WINDOW_FACTOR * params.gamma
    if window <= 0:
        raise ValueError("window must be positive")
    k_lo = float(dispersion.k_of_omega(params.omega_q - window))
    k_hi = float(dispersion.k_of_omega(params.omega_q + window))
    if not k_lo < k_hi:
        raise ValueError("dispersion must be increasing on the requested window")
    k = np.linspace(k_lo, k_hi, n_points)
    if x2 is None:
        x2 = params.d
    return SimulationGrid(k_values=k, x1=x1, x2=x2)


@dataclass(frozen=True)
class StateVector:
    """Single-excitation amplitudes (c1, c2, photon modes).

    Photon entries are sqrt(delta_k)-rescaled so the full vector is
    euclidean-normalized.
    """

    c1: complex
    c2: complex
    photon: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "photon", np.asarray(self.photon, dtype=complex))

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "StateVector":
        vec = np.asarray(vec, dtype=complex)
        return cls(c1=complex(vec[0]), c2=complex(vec[1]), photon=vec[2:])

    @classmethod
    def qubit1_excited(cls, n_modes: int) -> "StateVector":
        return cls(c1=1.0, c2=0.0, photon=np.zeros(n_modes, dtype=complex))

    def to_vector(self) -> np.ndarray:
        return np.concatenate(([self.c1, self.c2], self.photon))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.to_vector()))

    @property
    def p1(self) -> float:
        return abs(self.c1) ** 2

    @property
    def p2(self) -> float:
        return abs(self.c2) ** 2

    @property
    def photon_probability(self) -> float:
        return float(np.sum(np.abs(self.photon) ** 2))

    def check_normalized(self, tol: float = NORM_TOL) -> None:
        if abs(self.norm**2 - 1.0) > tol:
            raise ValueError(f"state norm^2 deviates from 1 by {self.norm**2 - 1.0:.3e}")
