"""Equilibrium volume-fraction profiles under rigid rotation.

The profile equation (cylinder; the sphere drops the rotation term) is

    d ln eta / dP = 2 omega^2 P - (6/pi) I(P),

with ``I`` the masked radial moment from :mod:`.quadrature`. It is solved by
damped Picard iteration on ``ln eta``: the right-hand side is evaluated with
the current iterate, integrated from the axis by composite Simpson, shifted
to satisfy the normalization and blended into the iterate.

Two closed forms serve as references: the Boltzmann profile (integral term
dropped) and the NSF profile, which solves the local approximation
``d ln eta/dP + 8 d eta/dP = 2 omega^2 P`` through the Lambert W function.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.integrate import simpson

from .errors import PackingLimitError
from .geometry import Domain
from .profile import (
    CLOSE_PACKING,
    EXT_BOUNDED,
    EXT_NSF,
    RadialProfile,
    radial_weight,
    uniform_grid,
)
from .quadrature import QuadratureSpec, apply_stencil, cylinder_stencil, sphere_stencil
from .specfn import lambert_w0

log = logging.getLogger(__name__)

PREFACTOR = 6.0 / math.pi


class PackingWarning(UserWarning):
    """A closed-form reference profile exceeds close packing inside the domain."""


@dataclass(frozen=True)
class AxisValue:
    """Fix the volume fraction on the axis."""

    eta0: float

    def __post_init__(self):
        if not 0.0 < self.eta0 < CLOSE_PACKING:
            raise ValueError(f"axis volume fraction must lie in (0, {CLOSE_PACKING:.4f})")


@dataclass(frozen=True)
class MeanFraction:
    """Fix the cross-section (cylinder) or volume (sphere) average."""

    eta_mean: float

    def __post_init__(self):
        if not 0.0 < self.eta_mean < CLOSE_PACKING:
            raise ValueError(f"mean volume fraction must lie in (0, {CLOSE_PACKING:.4f})")


Normalization = Union[AxisValue, MeanFraction]


@dataclass(frozen=True)
class SolverConfig:
    normalization: Normalization = AxisValue(0.1)
    spacing: float = 0.05
    tol: float = 1e-10
    max_iter: int = 500
    relaxation: float = 0.5
    quadrature: QuadratureSpec = QuadratureSpec()
    r_max: float = 25.0
    extension: str = EXT_NSF
    initial: RadialProfile | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0.0 < self.relaxation <= 1.0:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")


@dataclass
class SolveResult:
    profile: RadialProfile
    converged: bool
    iterations: int
    residual_history: list[float]
    final_equation_residual: float
    domain: Domain
    omega: float
    integral_term: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return float(self.profile.nodes[1] - self.profile.nodes[0])


# ---------------------------------------------------------------- references


def _mean_factor(domain: Domain, nodes: np.ndarray, values: np.ndarray) -> float:
    weight, norm = radial_weight(domain, nodes)
    return float(simpson(values * weight, x=nodes) / norm)


def solve_boltzmann(
    omega: float,
    normalization: Normalization,
    grid=None,
    domain: Domain = Domain.unbounded(),
) -> RadialProfile:
    """Boltzmann profile ``eta0 exp(omega^2 P^2)`` (collision integral dropped).

    With :class:`MeanFraction` the prefactor is chosen so the Simpson mean on
    ``grid`` (default: spacing 0.05 up to ``R_D``) matches. Emits a
    :class:`PackingWarning` if a bounded profile passes close packing; the
    Boltzmann gas itself has no such limit.
    """
    if omega < 0:
        raise ValueError("omega must be non-negative")
    if grid is None:
        if not domain.bounded:
            raise ValueError("a grid is required on the unbounded domain")
        grid = uniform_grid(domain.radius)
    grid = np.asarray(grid, dtype=float)
    shape = np.exp(omega * omega * grid * grid)
    if isinstance(normalization, AxisValue):
        values = normalization.eta0 * shape
    else:
        if not domain.bounded:
            raise ValueError("mean-fraction normalization needs a bounded domain")
        values = normalization.eta_mean / _mean_factor(domain, grid, shape) * shape
    if domain.bounded and np.any(values >= CLOSE_PACKING):
        warnings.warn("Boltzmann profile exceeds close packing inside the domain", PackingWarning)
    extension = EXT_BOUNDED if domain.bounded else EXT_NSF
    return RadialProfile(grid, values, extension, omega, enforce_packing=False)


@dataclass(frozen=True)
class NSFOracle:
    """Closed-form profile ``eta(P) = W0(8 C exp(omega^2 P^2)) / 8``, ``C = eta0 e^{8 eta0}``.

    This is the isothermal rigid-rotation solution of the compressible
    Navier-Stokes-Fourier balance with the Boltzmann-Enskog equation of state
    ``p = rho R T (1 + 4 eta)``.
    """

    omega: float
    eta0: float

    def __post_init__(self):
        if not 0.0 < self.eta0 < CLOSE_PACKING:
            raise ValueError(f"axis volume fraction must lie in (0, {CLOSE_PACKING:.4f})")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")

    @property
    def C(self) -> float:
        return self.eta0 * math.exp(8.0 * self.eta0)

    def _argument(self, P):
        return 8.0 * self.C * np.exp(self.omega**2 * np.asarray(P, dtype=float) ** 2)

    def __call__(self, P):
        return lambert_w0(self._argument(P)) / 8.0

    def exponential_form(self, P):
        """Same profile written as ``C exp(-W0(8 C e^{x}) + x)``, ``x = omega^2 P^2``."""
        x = self.omega**2 * np.asarray(P, dtype=float) ** 2
        return self.C * np.exp(-lambert_w0(self._argument(P)) + x)

    def profile(self, grid) -> RadialProfile:
        grid = np.asarray(grid, dtype=float)
        return RadialProfile(grid, self(grid), EXT_NSF, self.omega, enforce_packing=False)


def solve_nsf_oracle(omega: float, eta0: float) -> NSFOracle:
    return NSFOracle(omega, eta0)


# ------------------------------------------------------------ discretization


def cumulative_simpson(g: np.ndarray, h: float) -> np.ndarray:
    """``L[i] = int_0^{P_i} g`` on a uniform grid by composite Simpson.

    Even nodes chain Simpson panels from the axis; odd nodes chain them from
    node 1, whose value comes from the three-point rule over the first
    interval. Every ``L[i+1] - L[i-1]`` is then exactly one Simpson panel,
    which is what :func:`discrete_residual` inverts.
    """
    n = len(g)
    L = np.zeros(n)
    if n < 2:
        return L
    if n == 2:
        L[1] = 0.5 * h * (g[0] + g[1])
        return L
    L[1] = h / 12.0 * (5.0 * g[0] + 8.0 * g[1] - g[2])
    panels = h / 3.0 * (g[:-2] + 4.0 * g[1:-1] + g[2:])  # panel centred on node i+1
    L[2::2] = np.cumsum(panels[0::2])
    L[3::2] = L[1] + np.cumsum(panels[1::2])
    return L


def discrete_residual(log_eta: np.ndarray, g: np.ndarray, h: float) -> np.ndarray:
    """Centred-difference residual ``D ln eta - S g`` at interior nodes.

    ``D`` is the central difference over ``[P_{i-1}, P_{i+1}]`` and ``S`` the
    Simpson average of the right-hand side over the same panel, the pair the
    solver's integration step satisfies exactly.
    """
    d = (log_eta[2:] - log_eta[:-2]) / (2.0 * h)
    s = (g[:-2] + 4.0 * g[1:-1] + g[2:]) / 6.0
    return d - s


@lru_cache(maxsize=16)
def _stencil_cached(domain: Domain, nodes: tuple, spec: QuadratureSpec):
    radii = np.array(nodes)
    if domain.spherical:
        return sphere_stencil(domain, radii, spec)
    return cylinder_stencil(domain, radii, spec, "P")


def moment_stencil(domain: Domain, nodes: np.ndarray, spec: QuadratureSpec):
    return _stencil_cached(domain, tuple(np.asarray(nodes, dtype=float)), spec)


def right_hand_side(profile: RadialProfile, domain: Domain, omega: float, spec: QuadratureSpec, stencil=None):
    """``2 omega^2 P - (6/pi) I(P)`` at the profile nodes, and the integral term."""
    nodes = profile.nodes
    if stencil is None:
        stencil = moment_stencil(domain, nodes, spec)
    integral = -PREFACTOR * apply_stencil(profile.eval, stencil)
    # axis: I vanishes by symmetry; remove rounding so d ln eta/dP(0) = 0
    integral[nodes == 0.0] = 0.0
    rotation = 0.0 if domain.spherical else 2.0 * omega * omega * nodes
    return rotation + integral, integral


def equation_residual(
    profile: RadialProfile,
    domain: Domain,
    omega: float,
    spec: QuadratureSpec = QuadratureSpec(),
    include_integral: bool = True,
) -> float:
    """Max over interior nodes of ``|d ln eta/dP - 2 omega^2 P + (6/pi) I|``.

    ``include_integral=False`` drops the collision term, i.e. measures the
    residual of the Boltzmann equation.
    """
    nodes = profile.nodes
    h = _uniform_spacing(nodes)
    if include_integral:
        g, _ = right_hand_side(profile, domain, omega, spec)
    else:
        g = (0.0 if domain.spherical else 2.0 * omega * omega) * nodes
    return float(np.max(np.abs(discrete_residual(np.log(profile.values), g, h))))


def _uniform_spacing(nodes: np.ndarray) -> float:
    h = np.diff(nodes)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("the solver needs a uniform grid")
    return float(h[0])


# ------------------------------------------------------------------- solvers


def _normalize(log_eta: np.ndarray, nodes, domain: Domain, normalization: Normalization) -> np.ndarray:
    if isinstance(normalization, AxisValue):
        return log_eta - log_eta[0] + math.log(normalization.eta0)
    shift = log_eta.max()
    mean = _mean_factor(domain, nodes, np.exp(log_eta - shift))
    return log_eta - shift - math.log(mean) + math.log(normalization.eta_mean)


def _check_packing(values: np.ndarray, nodes: np.ndarray) -> None:
    over = values >= CLOSE_PACKING
    if over.any():
        i = int(np.argmax(over))
        raise PackingLimitError(i, float(nodes[i]), float(values[i]))


def _picard(domain: Domain, omega: float, config: SolverConfig) -> SolveResult:
    if isinstance(config.normalization, MeanFraction) and not domain.bounded:
        raise ValueError("mean-fraction normalization needs a bounded domain")
    if domain.bounded:
        nodes = uniform_grid(domain.radius, config.spacing)
        extension = EXT_BOUNDED
    else:
        nodes = uniform_grid(config.r_max, config.spacing)
        extension = config.extension
    h = _uniform_spacing(nodes)
    spec = config.quadrature
    stencil = moment_stencil(domain, nodes, spec)

    def make(values):
        return RadialProfile(nodes, values, extension, omega)

    if config.initial is not None:
        start = config.initial.eval(nodes)
    else:
        rot = 0.0 if domain.spherical else omega
        start = np.exp(rot * rot * nodes * nodes)
    x = _normalize(np.log(start), nodes, domain, config.normalization)
    _check_packing(np.exp(x), nodes)

    history: list[float] = []
    converged = False
    beta = config.relaxation
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        g, _ = right_hand_side(make(np.exp(x)), domain, omega, spec, stencil)
        target = _normalize(cumulative_simpson(g, h), nodes, domain, config.normalization)
        x_next = _normalize((1.0 - beta) * x + beta * target, nodes, domain, config.normalization)
        change = float(np.max(np.abs(x_next - x)))
        history.append(change)
        x = x_next
        _check_packing(np.exp(x), nodes)
        if not math.isfinite(change):
            break
        log.debug("iteration %d: sup |d ln eta| = %.3e", iterations, change)
        if change < config.tol:
            converged = True
            break

    values = np.exp(x)
    if isinstance(config.normalization, AxisValue):
        # exp(log(eta0)) may be one ulp off
        values[0] = config.normalization.eta0
    profile = make(values)
    g, integral = right_hand_side(profile, domain, omega, spec, stencil)
    residual = float(np.max(np.abs(discrete_residual(x, g, h))))
    if not converged:
        log.warning("Picard iteration stopped after %d iterations (last change %.3e)", iterations, history[-1])
    return SolveResult(profile, converged, iterations, history, residual, domain, omega, integral)


def solve_enskog_cylinder(domain: Domain, omega: float, config: SolverConfig = SolverConfig()) -> SolveResult:
    """Axisymmetric, axially uniform profile in an unbounded domain or a cylinder.

    Raises
    ------
    PackingLimitError
        If an iterate reaches close packing at some node.
    """
    if domain.spherical:
        raise ValueError("use solve_enskog_sphere for spherical domains")
    if omega < 0:
        raise ValueError("omega must be non-negative")
    return _picard(domain, omega, config)


def solve_enskog_sphere(domain: Domain, config: SolverConfig = SolverConfig(MeanFraction(0.2))) -> SolveResult:
    """Spherically symmetric resting state in a sphere (no rotation)."""
    if not domain.spherical:
        raise ValueError("solve_enskog_sphere needs a spherical domain")
    return _picard(domain, 0.0, config)


# ---------------------------------------------------------------- far field


def far_field_report(result, omega: float, eta0: float | None = None) -> dict:
    """Growth diagnostics on the outer quarter of an unbounded profile.

    Reports ``8 eta / (omega^2 P^2)``, which tends to 1 from below for the
    NSF growth law, together with the leading-order asymptotic value
    ``(x - ln x + ln 8C) / x`` (``x = omega^2 P^2``) when ``eta0`` is given.
    """
    profile = result.profile if isinstance(result, SolveResult) else result
    domain = result.domain if isinstance(result, SolveResult) else None
    if (domain is not None and domain.bounded) or profile.extension == EXT_BOUNDED:
        raise ValueError("far-field report applies to unbounded runs only")
    if omega <= 0.0:
        return {"applicable": False, "reason": "no rotation: the profile does not grow"}

    nodes = profile.nodes
    outer = (nodes >= 0.75 * nodes[-1]) & (nodes > 0)
    P = nodes[outer]
    x = omega**2 * P**2
    ratio = 8.0 * profile.values[outer] / x
    report = {
        "applicable": True,
        "radii": P.tolist(),
        "ratio": ratio.tolist(),
        "monotone_increasing": bool(np.all(np.diff(ratio) > 0)),
        "below_one": bool(np.all(ratio < 1.0)),
        "last_ratio": float(ratio[-1]),
    }
    if eta0 is not None:
        ln8c = math.log(8.0 * eta0) + 8.0 * eta0
        report["asymptotic_ratio"] = ((x - np.log(x) + ln8c) / x).tolist()
    return report
