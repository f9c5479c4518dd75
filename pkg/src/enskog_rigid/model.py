"""Reduced-unit physical model: rigid motion, local Maxwellian, unit scales.

Every kernel in the package works in reduced units: lengths in molecular
diameters, velocities in ``sqrt(2RT)``, densities as local volume fraction
``eta = (pi/6) sigma^3 rho / m``. Laboratory quantities only appear in
:class:`PhysicalScales`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .geometry import Domain, check_unit

PI_M32 = math.pi**-1.5


@dataclass(frozen=True)
class PhysicalScales:
    """Molecular diameter [m], molecular mass [kg] and ``R*T`` [m^2/s^2]."""

    sigma: float
    mass: float
    RT: float

    def __post_init__(self):
        for name in ("sigma", "mass", "RT"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def speed(self) -> float:
        return math.sqrt(2.0 * self.RT)

    def reduced_length(self, length):
        return np.asarray(length) / self.sigma

    def reduced_omega(self, omega):
        """Angular speed [1/s] -> ``omega * sigma / sqrt(2RT)``."""
        return np.asarray(omega) * self.sigma / self.speed

    def reduced_velocity(self, velocity):
        return np.asarray(velocity) / self.speed

    def volume_fraction(self, rho):
        """Mass density [kg/m^3] -> local volume fraction."""
        return math.pi / 6.0 * self.sigma**3 / self.mass * np.asarray(rho)

    def mass_density(self, eta):
        return 6.0 / math.pi * self.mass / self.sigma**3 * np.asarray(eta)


@dataclass(frozen=True)
class RigidMotion:
    """Uniform axial flow plus rigid rotation about the z axis (reduced units)."""

    u_axial: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.u_axial) and math.isfinite(self.omega)):
            raise ValueError("rigid motion parameters must be finite")
        if self.omega < 0:
            raise ValueError("omega must be non-negative; flip the axis orientation instead")

    @property
    def omega_vector(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.omega])


def flow_velocity(motion: RigidMotion, X) -> np.ndarray:
    """Flow velocity ``u e_z + X x (omega e_z)`` at position(s) ``X``.

    The azimuthal component is ``-P*omega``: with this operand order the
    fluid turns clockwise seen from +z.
    """
    X = np.asarray(X, dtype=float)
    v = np.empty(np.broadcast_shapes(X.shape, (3,)))
    v[..., 0] = X[..., 1] * motion.omega
    v[..., 1] = -X[..., 0] * motion.omega
    v[..., 2] = motion.u_axial
    return v


def delta_v(motion: RigidMotion, alpha) -> np.ndarray:
    """Flow-velocity jump across a contact, ``v(X + alpha) - v(X) = alpha x omega``."""
    alpha = np.asarray(alpha, dtype=float)
    check_unit(alpha)
    return flow_velocity(RigidMotion(0.0, motion.omega), alpha)


@dataclass(frozen=True)
class DensityField:
    """Volume fraction as a function of the radial coordinate of a domain.

    ``eta`` maps radii (array) to volume fractions; ``domain`` decides whether
    the radius is cylindrical or spherical and which positions are admissible.
    """

    eta: Callable[[np.ndarray], np.ndarray]
    domain: Domain

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        inside = self.domain.contains(X)
        if not np.all(inside):
            raise DomainError("position outside the density field's domain")
        return np.asarray(self.eta(self.domain.radial_coordinate(X)), dtype=float)


@dataclass(frozen=True)
class MaxwellianState:
    """Local Maxwellian with a rigid-motion flow field.

    ``temperature`` is a test hook only: a callable of position giving a
    reduced temperature field ``T(X)/T0``. Physical states leave it ``None``
    (uniform temperature).
    """

    motion: RigidMotion
    density: DensityField
    temperature: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def log_f(self, X, xi) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        xi = np.asarray(xi, dtype=float)
        eta = self.density(X)
        c2 = np.sum((xi - flow_velocity(self.motion, X)) ** 2, axis=-1)
        if self.temperature is None:
            return np.log(eta) + math.log(PI_M32) - c2
        T = np.asarray(self.temperature(X), dtype=float)
        return np.log(eta) + math.log(PI_M32) - 1.5 * np.log(T) - c2 / T


def maxwellian_eval(state: MaxwellianState, X, xi) -> np.ndarray:
    """Reduced distribution ``eta(X) pi^-3/2 exp(-|xi - v(X)|^2)``."""
    return np.exp(state.log_f(X, xi))

