"""Radial volume-fraction profiles: interpolation, far-field extension, I/O."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline

from .errors import ProfileRangeError
from .geometry import Domain
from .specfn import lambert_w0

CLOSE_PACKING = math.sqrt(2.0) * math.pi / 6.0

EXT_BOUNDED = "bounded"
EXT_NSF = "nsf"
EXT_FROZEN = "frozen"

_RANGE_TOL = 1e-12


def uniform_grid(radius: float, spacing: float = 0.05) -> np.ndarray:
    """Nodes ``0, h, ..., radius``; ``h`` is shrunk so the grid ends on ``radius``."""
    if radius <= 0 or spacing <= 0:
        raise ValueError("radius and spacing must be positive")
    n = max(2, int(math.ceil(radius / spacing - 1e-9)))
    return np.linspace(0.0, radius, n + 1)


def _five_point_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative of the local quartic interpolant at every node.

    The five-node stencil is centred where possible and shifted inwards at
    the ends, so every estimate is fourth order.
    """
    n = len(x)
    idx = np.arange(n)
    start = np.clip(idx - 2, 0, n - 5)
    stencil = start[:, None] + np.arange(5)
    xs = x[stencil]
    ys = y[stencil]
    xi = x[:, None]
    w = np.empty_like(xs)
    for j in range(5):
        others = [k for k in range(5) if k != j]
        at_node = stencil[:, j] == idx
        # d/dx of the j-th Lagrange basis polynomial, evaluated at x_i
        den = np.prod([xs[:, j] - xs[:, k] for k in others], axis=0)
        total = np.zeros(n)
        for m in others:
            total += np.prod([xi[:, 0] - xs[:, k] for k in others if k != m], axis=0)
        w[:, j] = np.where(at_node, 0.0, total / den)
        self_term = sum(1.0 / np.where(at_node, xs[:, j] - xs[:, k], 1.0) for k in others)
        w[:, j] = np.where(at_node, self_term, w[:, j])
    return np.sum(w * ys, axis=1)


def limited_slopes(x: np.ndarray, y: np.ndarray, even: bool = True) -> np.ndarray:
    """Node slopes for a monotonicity-preserving cubic Hermite interpolant.

    Fourth-order five-point estimates, clipped into the Fritsch-Carlson
    region ``|s| <= 3 min(|d_left|, |d_right|)`` and zeroed at local extrema
    of the data. With ``even`` the slope at ``x[0]`` is set to zero, as
    required of a smooth radial field at the axis.
    """
    h = np.diff(x)
    d = np.diff(y) / h
    if len(x) < 5:
        s = np.gradient(y, x)
    else:
        s = _five_point_slopes(x, y)

    dl, dr = d[:-1], d[1:]
    bound = 3.0 * np.minimum(np.abs(dl), np.abs(dr))
    inner = s[1:-1]
    s[1:-1] = np.where(dl * dr > 0, np.sign(dl) * np.minimum(np.abs(inner) * (np.sign(inner) == np.sign(dl)), bound), 0.0)

    # ends: same sign as the adjacent secant and at most three times it
    for i, dd in ((0, d[0]), (-1, d[-1])):
        if np.sign(s[i]) != np.sign(dd):
            s[i] = 0.0
        elif abs(s[i]) > 3.0 * abs(dd):
            s[i] = 3.0 * dd
    if even:
        s[0] = 0.0
    return s


def nsf_continuation(omega: float, radius: float, value: float) -> Callable[[np.ndarray], np.ndarray]:
    """Far-field growth law matched to ``value`` at ``radius``.

    Solves ``ln eta + 8 eta = omega^2 P^2 + const`` through the point
    ``(radius, value)``.
    """
    log_k = math.log(8.0 * value) + 8.0 * value - omega * omega * radius * radius

    def extend(P: np.ndarray) -> np.ndarray:
        arg = np.exp(log_k + omega * omega * np.asarray(P) ** 2)
        return lambert_w0(arg) / 8.0

    return extend


@dataclass(frozen=True)
class RadialProfile:
    """Volume fraction sampled on radial nodes starting at the axis.

    Parameters
    ----------
    nodes : strictly increasing radii, ``nodes[0] == 0``.
    values : volume fractions at the nodes, positive and below close packing.
    extension : ``"bounded"`` (queries past the last node are a bug),
        ``"nsf"`` (far-field growth law matched at the last node, needs
        ``omega``) or ``"frozen"`` (hold the last value).
    omega : reduced angular speed used by the ``"nsf"`` extension.
    enforce_packing : reject values at or above close packing. Closed-form
        reference profiles (Boltzmann, NSF) have no packing limit and switch
        this off.
    """

    nodes: np.ndarray
    values: np.ndarray
    extension: str = EXT_BOUNDED
    omega: float = 0.0
    enforce_packing: bool = True
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _tail: Callable | None = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
            raise ValueError("nodes and values must be 1-D arrays of equal length >= 2")
        if nodes[0] != 0.0:
            raise ValueError("the first node must sit on the axis (radius 0)")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(values > 0):
            raise ValueError("volume fractions must be strictly positive")
        if self.enforce_packing and np.any(values >= CLOSE_PACKING):
            i = int(np.argmax(values >= CLOSE_PACKING))
            raise ValueError(f"value {values[i]!r} at node {i} is not below close packing")
        if self.extension not in (EXT_BOUNDED, EXT_NSF, EXT_FROZEN):
            raise ValueError(f"unknown extension policy {self.extension!r}")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        slopes = limited_slopes(nodes, values)
        object.__setattr__(self, "_spline", CubicHermiteSpline(nodes, values, slopes, extrapolate=False))
        tail = None
        if self.extension == EXT_NSF:
            tail = nsf_continuation(self.omega, nodes[-1], values[-1])
        object.__setattr__(self, "_tail", tail)

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def with_values(self, values) -> "RadialProfile":
        return RadialProfile(self.nodes, values, self.extension, self.omega, self.enforce_packing)

    def __call__(self, P):
        return self.eval(P)

    def eval(self, P):
        """Volume fraction at radius ``P`` (scalar or array)."""
        P = np.asarray(P, dtype=float)
        scalar = P.ndim == 0
        P = np.atleast_1d(P)
        r_max = self.nodes[-1]
        inside = P <= r_max
        out = np.empty_like(P)
        out[inside] = self._spline(np.maximum(P[inside], 0.0))
        outside = ~inside
        if outside.any():
            beyond = P[outside]
            if self.extension == EXT_BOUNDED:
                if np.any(beyond > r_max * (1.0 + _RANGE_TOL)):
                    raise ProfileRangeError(
                        f"profile queried at {beyond.max()!r} beyond its last node {r_max!r}"
                    )
                out[outside] = self.values[-1]
            elif self.extension == EXT_FROZEN:
                out[outside] = self.values[-1]
            else:
                out[outside] = self._tail(beyond)
        return float(out[0]) if scalar else out

    def log_derivative(self) -> np.ndarray:
        """``d ln eta / dP`` at the nodes by second-order differences."""
        return np.gradient(np.log(self.values), self.nodes, edge_order=2)


def from_function(
    f: Callable,
    grid,
    extension: str = EXT_BOUNDED,
    omega: float = 0.0,
    enforce_packing: bool = True,
) -> RadialProfile:
    """Sample ``f`` on ``grid``; every sample must be positive."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(f(grid), dtype=float) * np.ones_like(grid)
    if not np.all(values > 0):
        i = int(np.argmax(~(values > 0)))
        raise ValueError(f"non-positive sample {values[i]!r} at radius {grid[i]!r}")
    return RadialProfile(grid, values, extension, omega, enforce_packing)


def radial_weight(domain: Domain, nodes: np.ndarray) -> tuple[np.ndarray, float]:
    """Measure ``P`` or ``r^2`` and the normalizing integral over ``[0, R_D]``."""
    R = domain.radius
    if domain.spherical:
        return nodes**2, R**3 / 3.0
    return nodes, R**2 / 2.0


def mean_volume_fraction(profile: RadialProfile, domain: Domain) -> float:
    """Cross-section (cylinder) or volume (sphere) average of the profile.

    Composite Simpson on the profile nodes, which must end at ``R_D``.
    """
    if not domain.bounded:
        raise ValueError("mean volume fraction is undefined on the unbounded domain")
    if not math.isclose(profile.r_max, domain.radius, rel_tol=1e-12):
        raise ValueError("profile nodes must end at the accessible radius of the domain")
    weight, norm = radial_weight(domain, profile.nodes)
    return float(simpson(profile.values * weight, x=profile.nodes) / norm)


def write_csv(profile: RadialProfile, path, extra: dict[str, np.ndarray] | None = None) -> None:
    """Write ``P,eta[,extra...]`` rows at 17 significant digits."""
    extra = extra or {}
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["P", "eta", *extra])
        cols = [profile.nodes, profile.values, *(np.asarray(c) for c in extra.values())]
        for row in zip(*cols):
            writer.writerow([format(float(v), ".17g") for v in row])


def read_csv(path, extension: str = EXT_BOUNDED, omega: float = 0.0) -> RadialProfile:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["P", "eta"]:
            raise ValueError(f"unexpected profile header {header!r}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    nodes, values = map(np.array, zip(*rows))
    return RadialProfile(nodes, values, extension, omega)
