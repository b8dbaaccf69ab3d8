"""Single-photon quantum state transfer in dispersion-engineered chiral waveguides."""

from .errors import NonInvertibleDispersionError, NumericalError
from .model import PhysicalParams, SimulationGrid, StateVector, build_grid, coupling_from_gamma

__all__ = [
    "NonInvertibleDispersionError",
    "NumericalError",
    "PhysicalParams",
    "SimulationGrid",
    "StateVector",
    "build_grid",
    "coupling_from_gamma",
]

__version__ = "0.1.0"
