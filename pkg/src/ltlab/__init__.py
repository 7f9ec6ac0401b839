"""Numerical laboratory for Lieb-Thirring constants and Schrodinger bound states."""

__version__ = "0.1.0"

from ._validation import AccuracyError, DomainError, ResolutionError, SolverError
from .constants import ConstantValue, Direction, GammaDim, Kind, best_known_bounds, classical_K, classical_L
from .ground_state import GroundStateSolver, RadialProfile, one_particle_L, shoot_ground_state
from .rumin import TrialPair, rumin_functional

__all__ = [
    "AccuracyError", "DomainError", "ResolutionError", "SolverError", "ConstantValue", "Direction", "GammaDim",
    "Kind", "best_known_bounds", "classical_K", "classical_L", "GroundStateSolver", "RadialProfile",
    "one_particle_L", "shoot_ground_state", "TrialPair", "rumin_functional",
]
