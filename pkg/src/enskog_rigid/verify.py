"""Identity suites run by ``enskog-rigid verify``.

Each check returns ``{"name", "max_residual", "tolerance", "passed", ...}``.
All randomness flows from one seed, and no timings are recorded, so a report
is reproducible byte for byte.
"""

from __future__ import annotations

import math

import numpy as np

from . import geometry
from .geometry import Domain
from .kinetics import (
    DirectSpec,
    collision_integral_direct,
    collision_integral_reduced,
    conservation_residuals,
    summational_invariant_residual,
)
from .model import DensityField, MaxwellianState, RigidMotion, delta_v, flow_velocity
from .quadrature import QuadratureSpec, axial_moment_cylinder, azimuthal_moment_cylinder
from .specfn import lambert_w0

OMEGA = 0.05
U_AXIAL = 0.3
R_TEST = 10.0
# per-component spread of the reduced Maxwellian exp(-c^2)
THERMAL_SD = math.sqrt(0.5)


def sample_density(r):
    """Smooth, positive, nonuniform volume fraction used by the suites."""
    r = np.asarray(r, dtype=float)
    return 0.15 * np.exp(0.0025 * r * r) * (1.0 + 0.2 * np.cos(0.7 * r))


def _check(name, residual, tolerance, **extra):
    residual = float(residual)
    return {"name": name, "max_residual": residual, "tolerance": tolerance, "passed": bool(residual <= tolerance), **extra}


def _unit_vectors(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _points_with_partner(rng, n, R):
    """Positions ``X`` in the cylinder of radius ``R`` with ``X - alpha`` inside too."""
    X = np.empty((0, 3))
    A = np.empty((0, 3))
    while len(X) < n:
        m = 2 * (n - len(X)) + 16
        P = R * np.sqrt(rng.random(m))
        ph = 2.0 * math.pi * rng.random(m)
        cand = np.stack([P * np.cos(ph), P * np.sin(ph), 20.0 * rng.random(m) - 10.0], axis=1)
        alpha = _unit_vectors(rng, m)
        ok = np.hypot(*(cand - alpha)[:, :2].T) <= R
        X = np.concatenate([X, cand[ok]])
        A = np.concatenate([A, alpha[ok]])
    return X[:n], A[:n]


def _thermal_pairs(rng, motion, X, alpha):
    """Velocities drawn from the local Maxwellians at ``X`` and ``X - alpha``."""
    n = len(X)
    xi = flow_velocity(motion, X) + THERMAL_SD * rng.standard_normal((n, 3))
    xi_star = flow_velocity(motion, X - alpha) + THERMAL_SD * rng.standard_normal((n, 3))
    return xi, xi_star


def summational_invariant_sweep(rng, n=100_000):
    domain = Domain.cylinder(R_TEST)
    state = MaxwellianState(RigidMotion(U_AXIAL, OMEGA), DensityField(sample_density, domain))
    X, alpha = _points_with_partner(rng, n, R_TEST)
    xi, xi_star = _thermal_pairs(rng, state.motion, X, alpha)
    res = summational_invariant_residual(state, X, alpha, xi, xi_star)
    return _check("summational_invariant", np.max(np.abs(res)), 1e-12, samples=n)


def conservation_sweep(rng, n=100_000):
    X, alpha = _points_with_partner(rng, n, R_TEST)
    xi, xi_star = _thermal_pairs(rng, RigidMotion(U_AXIAL, OMEGA), X, alpha)
    dp, dE, dL = conservation_residuals(X, alpha, xi, xi_star)
    worst = max(np.max(np.abs(dp)), np.max(np.abs(dE)), np.max(np.abs(dL)))
    return _check("conservation", worst, 1e-13, samples=n)


def flow_jump_sweep(rng, n=100_000):
    motion = RigidMotion(U_AXIAL, OMEGA)
    alpha = _unit_vectors(rng, n)
    dot = np.sum(delta_v(motion, alpha) * alpha, axis=-1)
    return _check("flow_jump_orthogonality", np.max(np.abs(dot)), 1e-15, samples=n)


def collision_reduction_check(spec: DirectSpec = DirectSpec(12, 24, 12, 16)):
    """Direct gain-minus-loss quadrature against the reduced moment form."""
    cases = [
        (Domain.unbounded(), (10.0, 0.0, 0.0), (1.0, 0.0, 0.0)),
        (Domain.cylinder(R_TEST), (9.6, 0.0, 0.0), (-0.5, 0.2, -1.2)),
        (Domain.cylinder(R_TEST), (4.0, -3.0, 1.0), (0.3, -0.8, 0.5)),
    ]
    worst = 0.0
    for domain, X, c in cases:
        state = MaxwellianState(RigidMotion(U_AXIAL, OMEGA), DensityField(sample_density, domain))
        X = np.array(X)
        xi = flow_velocity(state.motion, X) + np.array(c)
        reduced = collision_integral_reduced(state, X, xi, QuadratureSpec(64, 64))
        direct = collision_integral_direct(state, X, xi, spec)
        worst = max(worst, abs(direct / reduced - 1.0))
    return _check("collision_reduction", worst, 5e-3, cases=len(cases))


def vanishing_moments_check():
    worst = 0.0
    n = 0
    for domain in (Domain.unbounded(), Domain.cylinder(R_TEST)):
        for P in (0.0, 0.5, 3.0, 7.3, 9.2, 9.95, 10.0):
            if not domain.bounded and P > 9.5:
                P = P + 5.0
            for moment in (azimuthal_moment_cylinder, axial_moment_cylinder):
                worst = max(worst, abs(moment(sample_density, domain, P)))
                n += 1
    return _check("vanishing_moments", worst, 1e-10, pairs=n)


def mask_soundness_check(rng, n_radii=200, n_dirs=500):
    """Analytic azimuthal cutoff against a brute-force containment test.

    Looks up ``geometry.phi_cutoff_cylinder`` at call time, so a deliberately
    broken cutoff is caught.
    """
    R = 3.0
    domain = Domain.cylinder(R)
    mismatches = 0
    checked = 0
    for P in R * np.sqrt(rng.random(n_radii)):
        theta = np.arccos(2.0 * rng.random(n_dirs) - 1.0)
        phi = 2.0 * math.pi * rng.random(n_dirs)
        reach = geometry.contact_radius_cylinder(P, theta, phi)
        margin = np.abs(reach - R) > 1e-9
        brute = reach <= R
        cut = geometry.phi_cutoff_cylinder(domain, float(P), theta)
        analytic = np.minimum(phi, 2.0 * math.pi - phi) >= cut
        mismatches += int(np.sum((brute != analytic) & margin))
        checked += int(np.sum(margin))
    # spheres: cosine cutoff
    domain = Domain.sphere(R)
    for r in R * rng.random(n_radii) ** (1 / 3):
        mu = 2.0 * rng.random(n_dirs) - 1.0
        reach = np.sqrt(r * r + 1.0 + 2.0 * r * mu)
        margin = np.abs(reach - R) > 1e-9
        brute = reach <= R
        analytic = mu <= geometry.cos_theta_cutoff_sphere(domain, float(r))
        mismatches += int(np.sum((brute != analytic) & margin))
        checked += int(np.sum(margin))
    return _check("mask_soundness", mismatches, 0, samples=checked)


def lambert_round_trip_check(n=20_001):
    x = np.logspace(-8, 8, n)
    w = lambert_w0(x)
    defect = np.abs(w * np.exp(w) - x) / x
    return _check("lambert_w_round_trip", np.max(defect), 1e-14, samples=n)


def run_all(seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    checks = [
        summational_invariant_sweep(rng),
        conservation_sweep(rng),
        flow_jump_sweep(rng),
        collision_reduction_check(),
        vanishing_moments_check(),
        mask_soundness_check(rng),
        lambert_round_trip_check(),
    ]
    return {"seed": seed, "passed": all(c["passed"] for c in checks), "checks": checks}
