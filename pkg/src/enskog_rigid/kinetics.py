"""Collision transform, conservation identities and the collision integral.

Two independent routes to the collision integral of a rigid-motion
Maxwellian are provided:

* :func:`collision_integral_direct` evaluates the gain and loss integrals
  literally, pushing every quadrature node through :func:`collide`.
* :func:`collision_integral_reduced` uses the closed reduction to a single
  masked vector moment of the density.

They share no code beyond the Maxwellian itself, so agreement between them is
a meaningful check of the reduction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import Domain, check_unit
from .model import MaxwellianState, flow_velocity, maxwellian_eval
from .quadrature import (
    QuadratureSpec,
    axial_moment_cylinder,
    azimuthal_moment_cylinder,
    gauss_legendre,
    radial_moment_cylinder,
    radial_moment_sphere,
)
from .threads import thread_count

PREFACTOR = 6.0 / math.pi


@dataclass(frozen=True)
class CollisionPair:
    xi: np.ndarray
    xi_star: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        check_unit(np.asarray(self.alpha, dtype=float))

    @property
    def V_alpha(self) -> np.ndarray:
        return np.sum((np.asarray(self.xi_star) - np.asarray(self.xi)) * self.alpha, axis=-1)


def collide(xi, xi_star, alpha):
    """Post-collision velocities for contact direction ``alpha``.

    ``xi' = xi + V_a alpha`` and ``xi*' = xi* - V_a alpha`` with
    ``V_a = (xi* - xi) . alpha``. Broadcasts over leading axes.
    """
    xi = np.asarray(xi, dtype=float)
    xi_star = np.asarray(xi_star, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    check_unit(alpha)
    v_a = np.sum((xi_star - xi) * alpha, axis=-1, keepdims=True)
    return xi + v_a * alpha, xi_star - v_a * alpha


def conservation_residuals(X, alpha, xi, xi_star):
    """Momentum, energy and angular-momentum defects of one collision.

    The partner sits at ``X - alpha``. Returns ``(dp, dE, dL)`` with
    ``dp, dL`` 3-vectors (or stacked 3-vectors) and ``dE`` scalar(s).
    """
    X = np.asarray(X, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    xi = np.asarray(xi, dtype=float)
    xi_star = np.asarray(xi_star, dtype=float)
    xp, xsp = collide(xi, xi_star, alpha)
    Xm = X - alpha
    dp = (xi + xi_star) - (xp + xsp)
    dE = np.sum(xi * xi + xi_star * xi_star, axis=-1) - np.sum(xp * xp + xsp * xsp, axis=-1)
    dL = (np.cross(X, xi) + np.cross(Xm, xi_star)) - (np.cross(X, xp) + np.cross(Xm, xsp))
    return dp, dE, dL


def summational_invariant_residual(state: MaxwellianState, X, alpha, xi, xi_star):
    """``ln f*'(X-a) + ln f'(X) - ln f*(X-a) - ln f(X)`` for the state's Maxwellian.

    Zero (to rounding) for any positive density field when the temperature
    is uniform; the density terms cancel pairwise and the velocity terms
    cancel because the flow jump across a contact is orthogonal to ``alpha``.
    """
    X = np.asarray(X, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    xp, xsp = collide(xi, xi_star, alpha)
    Xm = X - alpha
    return (state.log_f(Xm, xsp) + state.log_f(X, xp)) - (
        state.log_f(Xm, xi_star) + state.log_f(X, xi)
    )


def density_moment_vector(state: MaxwellianState, X, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """``int alpha eta(X + alpha) chi_D(X + alpha) dOmega`` in Cartesian components."""
    X = np.asarray(X, dtype=float)
    domain = state.density.domain
    eta = state.density.eta
    if domain.spherical:
        r = float(np.linalg.norm(X))
        if r == 0.0:
            return np.zeros(3)
        return radial_moment_sphere(eta, domain, r, spec) * X / r
    P = float(np.hypot(X[0], X[1]))
    e_P = np.array([X[0], X[1], 0.0]) / P if P > 0 else np.array([1.0, 0.0, 0.0])
    e_phi = np.array([-e_P[1], e_P[0], 0.0])
    e_z = np.array([0.0, 0.0, 1.0])
    return (
        radial_moment_cylinder(eta, domain, P, spec) * e_P
        + azimuthal_moment_cylinder(eta, domain, P, spec) * e_phi
        + axial_moment_cylinder(eta, domain, P, spec) * e_z
    )


def collision_integral_reduced(state: MaxwellianState, X, xi, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Reduced collision integral ``-(6/pi) f(X, xi) (xi - v(X)) . M(X)``."""
    X = np.asarray(X, dtype=float)
    xi = np.asarray(xi, dtype=float)
    peculiar = xi - flow_velocity(state.motion, X)
    M = density_moment_vector(state, X, spec)
    return float(-PREFACTOR * maxwellian_eval(state, X, xi) * np.dot(peculiar, M))


@dataclass(frozen=True)
class DirectSpec:
    """Node counts for the direct collision integral.

    ``n_polar`` x ``n_azimuth`` product rule over contact directions (per
    polar segment near a wall);
    ``n_hermite`` Gauss-Hermite nodes on each velocity axis normal to
    ``alpha``; ``n_normal`` Gauss-Legendre nodes on the half line
    ``V_alpha > 0``.
    """

    n_polar: int = 16
    n_azimuth: int = 32
    n_hermite: int = 16
    n_normal: int = 24

    def refined(self, factor: int = 2) -> "DirectSpec":
        return DirectSpec(*(factor * n for n in (self.n_polar, self.n_azimuth, self.n_hermite, self.n_normal)))


@lru_cache(maxsize=None)
def _gauss_hermite(n: int):
    return np.polynomial.hermite.hermgauss(n)


def _sphere_rule(n_polar: int, n_azimuth: int):
    mu, w_mu = gauss_legendre(n_polar)
    phi = 2.0 * math.pi * np.arange(n_azimuth) / n_azimuth
    s = np.sqrt(1.0 - mu * mu)
    alpha = np.stack(
        [
            (s[:, None] * np.cos(phi)).ravel(),
            (s[:, None] * np.sin(phi)).ravel(),
            np.repeat(mu, n_azimuth),
        ],
        axis=-1,
    )
    weight = np.repeat(w_mu, n_azimuth) * (2.0 * math.pi / n_azimuth)
    return alpha, weight


def _bisect(g, lo, hi, iterations: int = 80):
    """Vectorized bisection for ``g = 0`` with ``g(lo) <= 0 < g(hi)``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        inside = g(mid) <= 0.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return lo


def _gl(a, b, n):
    x, w = gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    return 0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w


def _allowed_rule_sphere(X, R, spec: "DirectSpec"):
    """Directions with ``|X + alpha| <= R``; polar axis along ``X``."""
    r = float(np.linalg.norm(X))
    e_r = X / r
    helper = np.array([0.0, 0.0, 1.0]) if abs(e_r[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(e_r, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e_r, e1)

    def excess(mu):
        return np.sqrt(r * r + 1.0 + 2.0 * r * mu) - R

    mu_c = float(_bisect(excess, -1.0, 1.0))
    mu, w_mu = _gl(-1.0, mu_c, spec.n_polar)
    phi = 2.0 * math.pi * np.arange(spec.n_azimuth) / spec.n_azimuth
    s = np.sqrt(1.0 - mu * mu)[:, None]
    alpha = (
        mu[:, None, None] * e_r
        + (s * np.cos(phi))[..., None] * e1
        + (s * np.sin(phi))[..., None] * e2
    ).reshape(-1, 3)
    weight = np.repeat(w_mu, spec.n_azimuth) * (2.0 * math.pi / spec.n_azimuth)
    return alpha, weight


def _allowed_rule_cylinder(X, R, spec: "DirectSpec"):
    """Directions with ``X + alpha`` inside the cylinder; polar axis along ``e_z``.

    The band where the wall cuts the azimuth circle and the cut itself are
    located by bisection on the contact distance, then integrated with
    Gauss-Legendre rules on the exact pieces (the band uses a cosine map to
    absorb the square-root behaviour at its edges).
    """
    P = float(np.hypot(X[0], X[1]))
    e_P = np.array([X[0], X[1], 0.0]) / P
    e_phi = np.array([-e_P[1], e_P[0], 0.0])
    e_z = np.array([0.0, 0.0, 1.0])

    def excess(theta, phi):
        s = np.sin(theta)
        return np.hypot(P + s * np.cos(phi), s * np.sin(phi)) - R

    # outward direction phi = 0 reaches the wall first
    theta1 = float(_bisect(lambda t: excess(t, 0.0), 0.0, 0.5 * math.pi))
    half = 0.5 * math.pi - theta1
    tau, w_tau = _gl(0.0, math.pi, spec.n_polar)
    band_t = 0.5 * math.pi - half * np.cos(tau)
    band_w = half * np.sin(tau) * w_tau
    phi_star = _bisect(lambda ph: -excess(band_t, ph), np.zeros_like(band_t), np.full_like(band_t, math.pi))
    band_phi, band_wphi = _gl(phi_star, 2.0 * math.pi - phi_star, spec.n_azimuth)

    thetas = [band_t]
    phis = [band_phi]
    weights = [(band_w * np.sin(band_t))[:, None] * band_wphi]
    if theta1 > 0.0:
        cap_phi = 2.0 * math.pi * np.arange(spec.n_azimuth) / spec.n_azimuth
        for a, b in ((0.0, theta1), (math.pi - theta1, math.pi)):
            t, w = _gl(a, b, spec.n_polar)
            thetas.append(t)
            phis.append(np.broadcast_to(cap_phi, (spec.n_polar, spec.n_azimuth)))
            weights.append((w * np.sin(t))[:, None] * np.full(spec.n_azimuth, 2.0 * math.pi / spec.n_azimuth))
    alpha, weight = [], []
    for t, ph, w in zip(thetas, phis, weights):
        st = np.sin(t)[:, None]
        a = (
            (st * np.cos(ph))[..., None] * e_P
            + (st * np.sin(ph))[..., None] * e_phi
            + np.broadcast_to(np.cos(t)[:, None], ph.shape)[..., None] * e_z
        )
        alpha.append(a.reshape(-1, 3))
        weight.append(w.ravel())
    return np.concatenate(alpha), np.concatenate(weight)


def _direction_rule(state: MaxwellianState, X, spec: "DirectSpec"):
    """Contact directions whose partner centre ``X + alpha`` lies in the domain."""
    domain: Domain = state.density.domain
    if domain.bounded:
        r = float(domain.radial_coordinate(X))
        if r + 1.0 > domain.radius and r > 0.0:
            if domain.spherical:
                return _allowed_rule_sphere(X, domain.radius, spec)
            return _allowed_rule_cylinder(X, domain.radius, spec)
    return _sphere_rule(spec.n_polar, spec.n_azimuth)


def _orthonormal_frames(alpha: np.ndarray):
    helper = np.where(np.abs(alpha[:, 2:3]) < 0.9, [[0.0, 0.0, 1.0]], [[1.0, 0.0, 0.0]])
    e1 = np.cross(alpha, helper)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(alpha, e1)
    return e1, e2


def _masked_density(state: MaxwellianState, Y: np.ndarray) -> np.ndarray:
    domain: Domain = state.density.domain
    r = domain.radial_coordinate(Y)
    inside = domain.contains(Y)
    out = np.zeros(r.shape)
    if domain.bounded:
        r = np.minimum(r, domain.radius)
    if inside.any():
        out[inside] = state.density.eta(r[inside])
    return out


def _half_space(state, X, xi, alpha, spec: "DirectSpec", gain: bool):
    """Velocity integral over ``(xi* - xi) . alpha > 0`` for each direction.

    ``gain`` selects ``f(X + alpha, xi*') f(X, xi')``; otherwise the loss
    ``f(X - alpha, xi*) f(X, xi)``. Returns one value per direction.
    """
    motion = state.motion
    v0 = flow_velocity(motion, X)
    e1, e2 = _orthonormal_frames(alpha)
    t, w_t = _gauss_hermite(spec.n_hermite)
    s_unit, w_unit = gauss_legendre(spec.n_normal)

    # Gauss-Hermite centre for the normal-plane velocity components: the
    # projection of the local flow velocity (the rule is exact only for this
    # one Gaussian; gain and loss centres differ from it by the flow jump).
    c = v0 - xi
    c1 = np.sum(c * e1, axis=-1)
    c2 = np.sum(c * e2, axis=-1)
    # half line V_alpha = s >= 0 truncated where both Maxwellians are < e^-49
    m = np.sum(c * alpha, axis=-1)
    s_max = np.maximum(m, 0.0) + 7.0 + 2.0 * motion.omega
    s = 0.5 * s_max[:, None] * (s_unit + 1.0)  # (A, ns)
    w_s = 0.5 * s_max[:, None] * w_unit

    T1 = c1[:, None, None] + t[None, :, None]  # (A, nh, 1)
    T2 = c2[:, None, None] + t[None, None, :]  # (A, 1, nh)
    xi_star = (
        xi
        + s[:, :, None, None, None] * alpha[:, None, None, None, :]
        + T1[:, None, :, :, None] * e1[:, None, None, None, :]
        + T2[:, None, :, :, None] * e2[:, None, None, None, :]
    )  # (A, ns, nh, nh, 3)
    xi_b = np.broadcast_to(xi, xi_star.shape)
    v0b = v0[None, None, None, None, :]
    eta0 = float(_masked_density(state, X[None, :])[0])

    def sq(a):
        return np.sum(a * a, axis=-1)

    if gain:
        partner = X + alpha
        xi_p, xi_star_p = collide(xi_b, xi_star, np.broadcast_to(alpha[:, None, None, None, :], xi_star.shape))
        vp = flow_velocity(motion, partner)[:, None, None, None, :]
        expo = -sq(xi_star_p - vp) - sq(xi_p - v0b)
    else:
        partner = X - alpha
        vm = flow_velocity(motion, partner)[:, None, None, None, :]
        expo = -sq(xi_star - vm) - sq(xi_b - v0b)
    eta_partner = _masked_density(state, partner)
    # divide out the Gauss-Hermite weight exp(-t1^2 - t2^2)
    expo = expo + (t[:, None] ** 2 + t[None, :] ** 2)
    integrand = eta_partner[:, None, None, None] * eta0 * math.pi**-3 * np.exp(expo) * s[:, :, None, None]
    return np.einsum("asij,as,i,j->a", integrand, w_s, w_t, w_t)


def _direct_chunk(state, X, xi, alpha, w_alpha, spec: "DirectSpec"):
    """Gain at ``alpha`` minus loss at ``-alpha``, summed over a block of directions.

    Both terms then involve the partner centre ``X + alpha``, so one rule
    over the allowed directions covers them.
    """
    gain = _half_space(state, X, xi, alpha, spec, gain=True)
    loss = _half_space(state, X, xi, -alpha, spec, gain=False)
    return float(np.sum(w_alpha * (gain - loss)))


def collision_integral_direct(state: MaxwellianState, X, xi, spec: DirectSpec = DirectSpec()) -> float:
    """Collision integral by direct quadrature of the gain and loss terms.

    Contact directions use a Gauss-Legendre x trapezoid product rule on the
    sphere, restricted near a wall to the directions whose partner centre
    ``X + alpha`` stays in the domain; the edge of that set is found by
    bisection on the contact distance. The loss term is taken at ``-alpha``
    so it shares the same set. For each direction the velocity integral runs
    over the half-space ``(xi* - xi) . alpha > 0`` only, split as the half
    line along ``alpha`` (Gauss-Legendre) times the normal plane
    (Gauss-Hermite), so the step function never meets a quadrature node.
    """
    X = np.asarray(X, dtype=float)
    xi = np.asarray(xi, dtype=float)
    alpha, w_alpha = _direction_rule(state, X, spec)
    per_chunk = max(1, int(500_000 // (spec.n_normal * spec.n_hermite**2 * 3)))
    chunks = [slice(i, i + per_chunk) for i in range(0, len(alpha), per_chunk)]

    def run(sl):
        return _direct_chunk(state, X, xi, alpha[sl], w_alpha[sl], spec)

    workers = thread_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(sl) for sl in chunks]
    # fixed summation order keeps the result independent of the thread count
    return PREFACTOR * math.fsum(parts)
