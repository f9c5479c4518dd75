"""Equilibrium states of a dense hard-sphere gas in rigid rotation.

Reduced units throughout: lengths in molecular diameters, velocities in
``sqrt(2 R T)``, densities as volume fractions ``eta``.
"""

from .errors import DomainError, PackingLimitError, PreconditionError, ProfileRangeError
from .geometry import Domain
from .model import DensityField, MaxwellianState, RigidMotion
from .profile import CLOSE_PACKING, RadialProfile, mean_volume_fraction
from .quadrature import QuadratureSpec
from .solver import (
    AxisValue,
    MeanFraction,
    NSFOracle,
    SolveResult,
    SolverConfig,
    equation_residual,
    far_field_report,
    solve_boltzmann,
    solve_enskog_cylinder,
    solve_enskog_sphere,
    solve_nsf_oracle,
)
from .specfn import lambert_w0

__version__ = "0.1.0"

__all__ = [
    "AxisValue",
    "CLOSE_PACKING",
    "DensityField",
    "Domain",
    "DomainError",
    "MaxwellianState",
    "MeanFraction",
    "NSFOracle",
    "PackingLimitError",
    "PreconditionError",
    "ProfileRangeError",
    "QuadratureSpec",
    "RadialProfile",
    "RigidMotion",
    "SolveResult",
    "SolverConfig",
    "equation_residual",
    "far_field_report",
    "lambert_w0",
    "mean_volume_fraction",
    "solve_boltzmann",
    "solve_enskog_cylinder",
    "solve_enskog_sphere",
    "solve_nsf_oracle",
]
