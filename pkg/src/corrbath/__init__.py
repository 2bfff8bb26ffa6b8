"""Lindbladian spectra, dynamics and steady states of qubits in a spatially-correlated bath."""

__version__ = "0.1.0"

from .dynamics import BlochState, Trajectory, bloch_observables, bloch_steady_state, evolve_bloch, evolve_full
from .errors import (
    CapacityError,
    ConvergenceError,
    CorrbathError,
    NumericalQualityError,
    ShapeError,
    StructuralError,
    ValidationError,
)
from .liouvillian import LiouvillianBundle, assemble_liouvillian, check_weak_symmetry
from .measures import concurrence, von_neumann_entropy
from .model import ModelSpec, rates_from_spec, uniform_rates
from .spectra import SpectrumReport, analyze

__all__ = [
    "BlochState",
    "CapacityError",
    "ConvergenceError",
    "CorrbathError",
    "LiouvillianBundle",
    "ModelSpec",
    "NumericalQualityError",
    "ShapeError",
    "SpectrumReport",
    "StructuralError",
    "Trajectory",
    "ValidationError",
    "__version__",
    "analyze",
    "assemble_liouvillian",
    "bloch_observables",
    "bloch_steady_state",
    "check_weak_symmetry",
    "concurrence",
    "evolve_bloch",
    "evolve_full",
    "rates_from_spec",
    "uniform_rates",
    "von_neumann_entropy",
]
