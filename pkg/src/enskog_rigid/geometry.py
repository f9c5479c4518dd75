"""Center-accessible domains and the angular masks of contact directions.

A domain ``D`` is the set of admissible molecular *centers*. For a cylinder or
sphere of radius ``R_D`` the physical wall sits half a diameter further out.
A collision partner at ``X + alpha`` contributes only while that point is in
``D``; for radial domains this cuts the sphere of directions along an
analytically known curve, which the functions here return.

Angle conventions
-----------------
Cylinder: ``theta`` is the polar angle of ``alpha`` from ``e_z`` and ``phi``
its azimuth measured from the outward radial direction ``e_P``.
Sphere: the polar axis of ``alpha`` is the outward radial direction ``e_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError

UNIT_TOL = 1e-12
# slack on the radial test; contact points exactly on the boundary belong to D
EDGE_TOL = 1e-12

UNBOUNDED = "unbounded"
CYLINDER = "cylinder"
SPHERE = "sphere"


def check_unit(alpha: np.ndarray) -> None:
    norms = np.linalg.norm(alpha, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise PreconditionError("contact direction alpha must be a unit vector")


@dataclass(frozen=True)
class Domain:
    """Region accessible to molecular centers.

    ``radius`` is the largest radial coordinate a center can reach (``None``
    for the unbounded domain). Use :meth:`from_surface` when the wall radius
    is known instead.
    """

    kind: str = UNBOUNDED
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in (UNBOUNDED, CYLINDER, SPHERE):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == UNBOUNDED:
            if self.radius is not None:
                raise ValueError("the unbounded domain takes no radius")
        elif self.radius is None or not self.radius >= 1.0 or not math.isfinite(self.radius):
            raise ValueError(
                f"center-accessible radius must be finite and >= 1 diameter, got {self.radius!r}"
            )

    @classmethod
    def unbounded(cls) -> "Domain":
        return cls(UNBOUNDED)

    @classmethod
    def cylinder(cls, radius: float) -> "Domain":
        return cls(CYLINDER, float(radius))

    @classmethod
    def sphere(cls, radius: float) -> "Domain":
        return cls(SPHERE, float(radius))

    @classmethod
    def from_surface(cls, kind: str, surface_radius: float) -> "Domain":
        """Domain whose wall surface lies at ``surface_radius``.

        Centers stop half a diameter short of the wall.
        """
        return cls(kind, float(surface_radius) - 0.5)

    @property
    def bounded(self) -> bool:
        return self.kind != UNBOUNDED

    @property
    def spherical(self) -> bool:
        return self.kind == SPHERE

    def radial_coordinate(self, X) -> np.ndarray:
        """Cylindrical radius (unbounded, cylinder) or spherical radius (sphere)."""
        X = np.asarray(X, dtype=float)
        if self.kind == SPHERE:
            return np.sqrt(np.sum(X * X, axis=-1))
        return np.hypot(X[..., 0], X[..., 1])

    def contains(self, X) -> np.ndarray:
        r = self.radial_coordinate(X)
        if not self.bounded:
            return np.ones(np.shape(r), dtype=bool)
        return r <= self.radius * (1.0 + EDGE_TOL)

    def check_radius(self, r) -> None:
        if self.bounded and np.any(np.asarray(r) > self.radius * (1.0 + EDGE_TOL)):
            raise DomainError(f"radius beyond the accessible radius {self.radius}")
        if np.any(np.asarray(r) < 0):
            raise DomainError("radial coordinate must be non-negative")


def contact_point(X, alpha) -> np.ndarray:
    """Center of the collision partner, ``X + alpha`` (diameter = 1)."""
    alpha = np.asarray(alpha, dtype=float)
    check_unit(alpha)
    return np.asarray(X, dtype=float) + alpha


def contact_radius_cylinder(P, theta, phi):
    """Distance of ``X + alpha`` from the axis for a point at radius ``P``."""
    s = np.sin(theta)
    return np.sqrt(np.maximum(P * P + s * s + 2.0 * P * s * np.cos(phi), 0.0))


def phi_cutoff_cylinder(domain: Domain, P: float, theta):
    """Azimuthal cutoff ``phi*`` of the allowed contact directions.

    Allowed azimuths are ``phi in [phi*, 2 pi - phi*]``, so ``phi* = 0`` is
    the full circle and ``phi* = pi`` an empty one. Returns an array shaped
    like ``theta`` (a float for scalar ``theta``).
    """
    domain.check_radius(P)
    theta = np.asarray(theta, dtype=float)
    s = np.abs(np.sin(theta))
    if not domain.bounded:
        out = np.zeros_like(s)
        return float(out) if out.ndim == 0 else out

    R = domain.radius
    out = np.empty_like(s)
    degenerate = (s == 0.0) | (P == 0.0)
    # P' does not depend on phi here; test it directly
    direct = np.sqrt(P * P + s * s) <= R * (1.0 + EDGE_TOL)
    out[degenerate] = np.where(direct[degenerate], 0.0, math.pi)
    ok = ~degenerate
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c = (R * R - P * P - s * s) / (2.0 * P * s)
    out[ok] = np.arccos(np.clip(c[ok], -1.0, 1.0))
    return float(out) if out.ndim == 0 else out


def cylinder_polar_breaks(domain: Domain, P: float) -> tuple[float, float] | None:
    """Polar angles where the cylinder mask switches from full to partial.

    For ``sin(theta) <= R_D - P`` every azimuth is allowed. Returns ``None``
    when the whole sphere of directions is allowed.
    """
    if not domain.bounded:
        return None
    gap = domain.radius - P
    if gap >= 1.0:
        return None
    t1 = math.asin(max(gap, 0.0))
    return t1, math.pi - t1


def cos_theta_cutoff_sphere(domain: Domain, r: float) -> float:
    """Largest allowed ``cos(theta_alpha)`` at radius ``r`` in a sphere.

    Allowed directions satisfy ``cos(theta_alpha) <= cutoff``; the value is
    clamped to ``[-1, 1]``.
    """
    domain.check_radius(r)
    if not domain.bounded:
        return 1.0
    R = domain.radius
    if r == 0.0:
        return 1.0 if R >= 1.0 else -1.0
    c = (R * R - r * r - 1.0) / (2.0 * r)
    return float(min(1.0, max(-1.0, c)))


def direction_vectors_cylinder(P_hat: np.ndarray, theta, phi) -> np.ndarray:
    """Cartesian ``alpha`` for cylinder angles at a point with unit radial ``P_hat``."""
    e_P = np.asarray(P_hat, dtype=float)
    e_z = np.array([0.0, 0.0, 1.0])
    e_phi = np.cross(e_z, e_P)
    s = np.sin(theta)
    return (
        (s * np.cos(phi))[..., None] * e_P
        + (s * np.sin(phi))[..., None] * e_phi
        + np.cos(theta)[..., None] * e_z
    )
