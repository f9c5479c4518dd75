"""Command-line front end: ``solve``, ``verify`` and ``oracle``.

Options come from flags, optionally preloaded from a plain ``key = value``
file given with ``--config`` (flags win). Exit codes: 0 success, 1 invalid
configuration, 2 solver did not converge, 3 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .errors import PackingLimitError
from .geometry import CYLINDER, SPHERE, UNBOUNDED, Domain
from .profile import CLOSE_PACKING, EXT_BOUNDED, EXT_NSF, RadialProfile, mean_volume_fraction, uniform_grid, write_csv
from .quadrature import QuadratureSpec
from .solver import (
    AxisValue,
    MeanFraction,
    NSFOracle,
    PackingWarning,
    SolverConfig,
    far_field_report,
    solve_boltzmann,
    solve_enskog_cylinder,
    solve_enskog_sphere,
)

log = logging.getLogger("enskog_rigid")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_VERIFY_FAILED = 3

DEFAULT_ETA_AXIS = 0.1
DEFAULT_ETA_MEAN = 0.2


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno} is not 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _positive_int(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enskog-rigid", description=__doc__.splitlines()[0])
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="compute an equilibrium profile")
    solve.add_argument("--config", help="key = value file; flags override it")
    solve.add_argument("--model", default="enskog-be", choices=["enskog-be", "boltzmann", "nsf-oracle"])
    solve.add_argument("--geometry", default=UNBOUNDED, choices=[UNBOUNDED, CYLINDER, SPHERE])
    solve.add_argument("--radius", type=float, help="container radius in diameters")
    solve.add_argument(
        "--radius-convention",
        default="surface",
        choices=["surface", "centers"],
        help="surface: wall radius (centres reach radius - 1/2); centers: accessible radius",
    )
    solve.add_argument("--omega", type=float, default=0.0, help="reduced angular speed")
    solve.add_argument("--eta-axis", type=float, help="volume fraction on the axis")
    solve.add_argument("--eta-mean", type=float, help="mean volume fraction (bounded only)")
    solve.add_argument("--pmax", type=float, default=25.0, help="truncation radius when unbounded")
    solve.add_argument("--spacing", type=float, default=0.05)
    solve.add_argument("--n-theta", type=_positive_int, default=64)
    solve.add_argument("--n-phi", type=_positive_int, default=64)
    solve.add_argument("--tol", type=float, default=1e-10)
    solve.add_argument("--max-iter", type=_positive_int, default=500)
    solve.add_argument("--relaxation", type=float, default=0.5)
    solve.add_argument("--out", default="profile.csv")
    solve.add_argument("--diagnostics", help="JSON path (default: next to --out)")

    verify = sub.add_parser("verify", help="run the identity suites")
    verify.add_argument("--config", help="key = value file; flags override it")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out", help="JSON report path (default: stdout)")

    oracle = sub.add_parser("oracle", help="write the closed-form NSF profile")
    oracle.add_argument("--config", help="key = value file; flags override it")
    oracle.add_argument("--omega", type=float, default=0.0)
    oracle.add_argument("--eta0", type=float, required=False, default=DEFAULT_ETA_AXIS)
    oracle.add_argument("--pmax", type=float, default=25.0)
    oracle.add_argument("--spacing", type=float, default=0.05)
    oracle.add_argument("--out", default="oracle.csv")
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        values = read_config_file(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions} - {"help", "config"}
        for key in values:
            if key not in known:
                raise ConfigError(f"config: unknown key {key!r}")
        # string defaults go through each option's type conversion
        subparser.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


# ----------------------------------------------------------------- solve


def _domain(args) -> Domain:
    if args.geometry == UNBOUNDED:
        if args.radius is not None:
            raise ConfigError("radius: not allowed for the unbounded geometry")
        if not args.pmax > 0:
            raise ConfigError("pmax: must be positive")
        return Domain.unbounded()
    if args.radius is None:
        raise ConfigError(f"radius: required for the {args.geometry} geometry")
    accessible = args.radius - 0.5 if args.radius_convention == "surface" else args.radius
    if not accessible >= 1.0:
        raise ConfigError("radius: the accessible radius of molecular centres must be at least one diameter")
    return Domain(args.geometry, accessible)


def _normalization(args, domain: Domain):
    if args.eta_axis is not None and args.eta_mean is not None:
        raise ConfigError("eta_mean: give either eta_axis or eta_mean, not both")
    try:
        if args.eta_mean is not None:
            if not domain.bounded:
                raise ConfigError("eta_mean: mean-fraction normalization needs a bounded geometry")
            return MeanFraction(args.eta_mean)
        if args.eta_axis is not None:
            return AxisValue(args.eta_axis)
    except ValueError as exc:
        key = "eta_mean" if args.eta_mean is not None else "eta_axis"
        raise ConfigError(f"{key}: {exc}") from None
    return MeanFraction(DEFAULT_ETA_MEAN) if domain.bounded else AxisValue(DEFAULT_ETA_AXIS)


def _solver_config(args, normalization) -> SolverConfig:
    checks = [
        ("spacing", args.spacing > 0, "must be positive"),
        ("tol", args.tol > 0, "must be positive"),
        ("relaxation", 0 < args.relaxation <= 1, "must lie in (0, 1]"),
        ("n_theta", args.n_theta >= 4, "must be at least 4"),
        ("n_phi", args.n_phi >= 4, "must be at least 4"),
    ]
    for key, ok, message in checks:
        if not ok:
            raise ConfigError(f"{key}: {message}")
    return SolverConfig(
        normalization=normalization,
        spacing=args.spacing,
        tol=args.tol,
        max_iter=args.max_iter,
        relaxation=args.relaxation,
        quadrature=QuadratureSpec(args.n_theta, args.n_phi),
        r_max=args.pmax,
    )


def _normalization_record(normalization) -> dict:
    if isinstance(normalization, AxisValue):
        return {"kind": "axis_value", "eta0": normalization.eta0}
    return {"kind": "mean_fraction", "eta_mean": normalization.eta_mean}


def _profile_record(profile: RadialProfile, domain: Domain) -> dict:
    eta_max = float(profile.values.max())
    record = {
        "nodes": int(profile.nodes.size),
        "spacing": float(profile.nodes[1] - profile.nodes[0]),
        "eta_axis": float(profile.values[0]),
        "eta_max": eta_max,
        "packing_margin": CLOSE_PACKING - eta_max,
    }
    if domain.bounded:
        record["mean_fraction"] = mean_volume_fraction(profile, domain)
    return record


def _write_json(path, document) -> None:
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")


def cmd_solve(args) -> int:
    if not args.omega >= 0 or not math.isfinite(args.omega):
        raise ConfigError("omega: must be a non-negative number")
    domain = _domain(args)
    if domain.spherical and args.omega != 0.0:
        raise ConfigError("omega: the sphere supports only the resting state (omega = 0)")
    normalization = _normalization(args, domain)
    config = _solver_config(args, normalization)
    diagnostics_path = args.diagnostics or str(Path(args.out).with_suffix(".json"))

    doc = {
        "model": args.model,
        "geometry": domain.kind,
        "accessible_radius": domain.radius,
        "omega": args.omega,
        "normalization": _normalization_record(normalization),
    }
    grid_end = domain.radius if domain.bounded else args.pmax
    grid = uniform_grid(grid_end, args.spacing)
    status = EXIT_OK

    if args.model == "boltzmann":
        import warnings

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PackingWarning)
            profile = solve_boltzmann(args.omega if not domain.spherical else 0.0, normalization, grid, domain)
        doc["packing_warning"] = any(issubclass(w.category, PackingWarning) for w in caught)
        doc.update(converged=True, iterations=0, final_residual=0.0)
        integral = np.zeros_like(grid)
    elif args.model == "nsf-oracle":
        if domain.bounded or not isinstance(normalization, AxisValue):
            raise ConfigError("model: the NSF oracle is defined on the unbounded geometry with an axis value")
        profile = NSFOracle(args.omega, normalization.eta0).profile(grid)
        doc.update(converged=True, iterations=0, final_residual=0.0)
        # the local approximation replaces the collision term by -8 d eta/dP
        integral = -8.0 * np.gradient(profile.values, grid, edge_order=2)
    else:
        try:
            if domain.spherical:
                result = solve_enskog_sphere(domain, config)
            else:
                result = solve_enskog_cylinder(domain, args.omega, config)
        except PackingLimitError as exc:
            doc.update(converged=False, error=str(exc), packing_node=exc.index, packing_radius=exc.radius)
            _write_json(diagnostics_path, doc)
            log.error("%s", exc)
            return EXIT_NOT_CONVERGED
        profile = result.profile
        integral = result.integral_term
        doc.update(
            converged=result.converged,
            iterations=result.iterations,
            final_residual=result.final_equation_residual,
            last_change=result.residual_history[-1],
            tolerance=args.tol,
        )
        if not result.converged:
            status = EXIT_NOT_CONVERGED

    doc.update(_profile_record(profile, domain))
    if not domain.bounded:
        eta0 = normalization.eta0 if isinstance(normalization, AxisValue) else None
        doc["far_field"] = far_field_report(profile, args.omega, eta0)
    write_csv(profile, args.out, {"dln_eta_dP": profile.log_derivative(), "integral_term": integral})
    _write_json(diagnostics_path, doc)
    return status


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    from .verify import run_all

    report = run_all(args.seed)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------- oracle


def cmd_oracle(args) -> int:
    if not 0.0 < args.eta0 < CLOSE_PACKING:
        raise ConfigError(f"eta0: must lie in (0, {CLOSE_PACKING:.4f})")
    if not args.omega >= 0:
        raise ConfigError("omega: must be non-negative")
    if not args.pmax > 0:
        raise ConfigError("pmax: must be positive")
    if not args.spacing > 0:
        raise ConfigError("spacing: must be positive")
    grid = uniform_grid(args.pmax, args.spacing)
    oracle = NSFOracle(args.omega, args.eta0)
    profile = RadialProfile(grid, oracle(grid), EXT_NSF, args.omega, enforce_packing=False)
    write_csv(profile, args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "oracle": cmd_oracle}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"enskog-rigid: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
