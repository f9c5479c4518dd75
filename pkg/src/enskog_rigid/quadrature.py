"""Masked solid-angle moments of the density over contact directions.

For a point at radius ``P`` the moments are

    I_P   = int alpha_P   eta(P') dOmega
    I_phi = int alpha_phi eta(P') dOmega
    I_z   = int alpha_z   eta(P') dOmega

taken over the directions whose contact point stays in the domain. The mask
boundary is known analytically (see :mod:`.geometry`), so every rule here
integrates over exact intervals rather than multiplying by an indicator.

Polar integration for the cylinder runs in ``theta`` itself: the integrand
depends on ``sin(theta)``, which is not smooth in ``cos(theta)`` at the poles.
On the partially masked band ``[theta1, pi - theta1]`` the cutoff behaves
like a square root at the band edges; the substitution
``theta = pi/2 - (pi/2 - theta1) cos(tau)`` removes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import (
    Domain,
    contact_radius_cylinder,
    cos_theta_cutoff_sphere,
    cylinder_polar_breaks,
    phi_cutoff_cylinder,
)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre node counts for the polar and azimuthal integrals.

    ``n_theta`` is the count per polar segment (the partially masked band and
    each fully open cap get their own rule).
    """

    n_theta: int = 64
    n_phi: int = 64

    def __post_init__(self):
        if self.n_theta < 4 or self.n_phi < 4:
            raise ValueError("quadrature orders must be at least 4")


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gl_on(a, b, n):
    """Nodes and weights mapped onto ``[a, b]`` (arrays broadcast)."""
    x, w = gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def _polar_segments(domain: Domain, P: float, n: int):
    """Polar nodes, weights (``dtheta`` only) and a partial-band flag."""
    breaks = cylinder_polar_breaks(domain, P)
    if breaks is None:
        t, w = _gl_on(0.0, math.pi, n)
        return t, w, np.zeros(n, dtype=bool)
    t1, t2 = breaks
    parts_t, parts_w, parts_flag = [], [], []
    if t1 > 0.0:
        for a, b in ((0.0, t1), (t2, math.pi)):
            t, w = _gl_on(a, b, n)
            parts_t.append(t)
            parts_w.append(w)
            parts_flag.append(np.zeros(n, dtype=bool))
    tau, wt = _gl_on(0.0, math.pi, n)
    half_width = 0.5 * math.pi - t1
    parts_t.append(0.5 * math.pi - half_width * np.cos(tau))
    parts_w.append(half_width * np.sin(tau) * wt)
    parts_flag.append(np.ones(n, dtype=bool))
    return np.concatenate(parts_t), np.concatenate(parts_w), np.concatenate(parts_flag)


def cylinder_directions(domain: Domain, P: float, spec: QuadratureSpec, half: bool = False):
    """Quadrature over allowed contact directions at radius ``P``.

    Returns ``theta, phi, weight`` (2-D arrays, polar x azimuth) with the
    solid-angle element ``sin(theta) dtheta dphi`` folded into ``weight``.
    With ``half`` only ``phi in [phi*, pi]`` is covered and the weights are
    doubled, which is exact for integrands even in ``phi``.
    """
    domain.check_radius(P)
    theta, w_theta, partial = _polar_segments(domain, P, spec.n_theta)
    phi_star = np.where(partial, phi_cutoff_cylinder(domain, P, theta), 0.0)
    upper = np.full_like(phi_star, math.pi) if half else 2.0 * math.pi - phi_star
    phi, w_phi = _gl_on(phi_star, upper, spec.n_phi)
    if half:
        w_phi = 2.0 * w_phi
    weight = (w_theta * np.sin(theta))[:, None] * w_phi
    theta2 = np.broadcast_to(theta[:, None], phi.shape)
    return theta2, phi, weight


_COMPONENTS = {
    "P": lambda t, p: np.sin(t) * np.cos(p),
    "phi": lambda t, p: np.sin(t) * np.sin(p),
    "z": lambda t, p: np.cos(t),
}


def cylinder_stencil(domain: Domain, radii, spec: QuadratureSpec, component: str = "P"):
    """Query radii and weights so that ``I(radii[i]) = sum_k W[i,k] eta(Q[i,k])``.

    The geometry never changes during a solve, so the solver builds this once
    and only re-evaluates the profile. Rows are zero-padded to equal length.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    half = component == "P"
    comp = _COMPONENTS[component]
    rows_q, rows_w = [], []
    for P in radii:
        t, p, w = cylinder_directions(domain, float(P), spec, half=half)
        rows_q.append(contact_radius_cylinder(P, t, p).ravel())
        rows_w.append((w * comp(t, p)).ravel())
    width = max(len(r) for r in rows_q)
    Q = np.zeros((len(radii), width))
    W = np.zeros((len(radii), width))
    for i, (q, w) in enumerate(zip(rows_q, rows_w)):
        Q[i, : len(q)] = q
        W[i, : len(w)] = w
    if domain.bounded:
        # rounding in P' must not leave the profile's range
        np.minimum(Q, domain.radius, out=Q)
    return Q, W


def sphere_stencil(domain: Domain, radii, spec: QuadratureSpec):
    """As :func:`cylinder_stencil` for ``I_r`` in a sphere (``phi`` done analytically)."""
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    cut = np.array([cos_theta_cutoff_sphere(domain, float(r)) for r in radii])
    mu, w = _gl_on(-1.0, cut, spec.n_theta)
    Q = np.sqrt(np.maximum(radii[:, None] ** 2 + 1.0 + 2.0 * radii[:, None] * mu, 0.0))
    if domain.bounded:
        np.minimum(Q, domain.radius, out=Q)
    return Q, 2.0 * math.pi * w * mu


def apply_stencil(eta, stencil) -> np.ndarray:
    Q, W = stencil
    return np.sum(W * eta(Q), axis=1)


def _single(eta, stencil):
    return float(apply_stencil(eta, stencil)[0])


def radial_moment_cylinder(profile, domain: Domain, P: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``I_P`` at radius ``P``; ``profile`` is any vectorized callable of radius."""
    return _single(profile, cylinder_stencil(domain, P, spec, "P"))


def azimuthal_moment_cylinder(profile, domain: Domain, P: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``I_phi`` over the full symmetric azimuth range; vanishes by symmetry."""
    return _single(profile, cylinder_stencil(domain, P, spec, "phi"))


def axial_moment_cylinder(profile, domain: Domain, P: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``I_z``; vanishes because mask and ``P'`` are even in ``cos(theta)``."""
    return _single(profile, cylinder_stencil(domain, P, spec, "z"))


def radial_moment_sphere(profile, domain: Domain, r: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """``I_r = 2 pi int mu eta(r'(mu)) dmu`` over ``mu <= cutoff``."""
    return _single(profile, sphere_stencil(domain, r, spec))


def uniform_infeasibility_indicator(domain: Domain, radius: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Right-hand side ``-(6/pi) I`` of the profile equation for ``eta = 1``.

    Positive wherever the wall hides outward directions, which rules out a
    uniform profile in a bounded container (the left-hand side can only be
    ``-2 omega^2 P <= 0``). Zero where the mask is full.
    """

    def one(q):
        return np.ones_like(q)

    if domain.spherical:
        moment = radial_moment_sphere(one, domain, radius, spec)
    else:
        moment = radial_moment_cylinder(one, domain, radius, spec)
    return -6.0 / math.pi * moment
