import time

import pytest

from enskog_rigid import AxisValue, Domain, MeanFraction, SolverConfig, solve_enskog_cylinder, solve_enskog_sphere

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record_acceptance(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])


def _timed(fn, *args):
    start = time.perf_counter()
    result = fn(*args)
    result.elapsed = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def cylinder_rest():
    """Cylinder of accessible radius 10, no rotation, mean fraction 0.2."""
    return _timed(solve_enskog_cylinder, Domain.cylinder(10.0), 0.0, SolverConfig(MeanFraction(0.2)))


@pytest.fixture(scope="session")
def cylinder_spin():
    """Same cylinder rotating at omega = 0.05."""
    return _timed(solve_enskog_cylinder, Domain.cylinder(10.0), 0.05, SolverConfig(MeanFraction(0.2)))


@pytest.fixture(scope="session")
def unbounded_spin():
    """Unbounded gas, omega = 0.05, axis value 0.1, truncated at 20."""
    return _timed(solve_enskog_cylinder, Domain.unbounded(), 0.05, SolverConfig(AxisValue(0.1), r_max=20.0))


@pytest.fixture(scope="session")
def sphere_rest():
    return _timed(solve_enskog_sphere, Domain.sphere(10.0), SolverConfig(MeanFraction(0.2)))


@pytest.fixture(scope="session")
def converged_runs(cylinder_rest, cylinder_spin, unbounded_spin, sphere_rest):
    return {
        "cylinder_rest": cylinder_rest,
        "cylinder_spin": cylinder_spin,
        "unbounded_spin": unbounded_spin,
        "sphere_rest": sphere_rest,
    }
