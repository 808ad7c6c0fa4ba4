"""Time-optimal control of pure quantum states through a background Hamiltonian."""

from .geometry import TangentData, fubini_study_angle, randers_time
from .oracle import optimality_certificate
from .propagator import Trajectory, propagate_ordered
from .solver import (
    HorizonExceededError,
    NavigationProblem,
    NavigationSolution,
    SingularControlError,
    journey_time,
    solve,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [
    "HorizonExceededError",
    "NavigationProblem",
    "NavigationSolution",
    "SingularControlError",
    "TangentData",
    "Trajectory",
    "fubini_study_angle",
    "journey_time",
    "optimality_certificate",
    "propagate_ordered",
    "randers_time",
    "solve",
    "verify_solution",
]
