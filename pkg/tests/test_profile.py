import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enskog_rigid.errors import ProfileRangeError
from enskog_rigid.geometry import Domain
from enskog_rigid.profile import (
    EXT_FROZEN,
    EXT_NSF,
    RadialProfile,
    from_function,
    mean_volume_fraction,
    read_csv,
    uniform_grid,
    write_csv,
)
from enskog_rigid.solver import NSFOracle


def test_constant_profile():
    prof = from_function(lambda P: 0.3, uniform_grid(5.0))
    q = np.linspace(0, 5, 333)
    np.testing.assert_allclose(prof(q), 0.3, rtol=0, atol=1e-15)


def test_interpolation_accuracy():
    grid = uniform_grid(25.0, 0.05)
    prof = from_function(lambda P: np.exp(0.0025 * P * P), grid, enforce_packing=False)
    mid = 0.5 * (grid[1:] + grid[:-1])
    assert np.max(np.abs(prof(mid) - np.exp(0.0025 * mid * mid))) < 1e-8


def test_exact_at_nodes():
    grid = uniform_grid(3.0, 0.1)
    values = 0.2 + 0.05 * np.sin(3 * grid)
    prof = RadialProfile(grid, values)
    np.testing.assert_array_equal(prof(grid), values)


def test_nsf_junction_is_continuous():
    oracle = NSFOracle(0.05, 0.1)
    grid = uniform_grid(20.0)
    prof = RadialProfile(grid, oracle(grid) * 1.01, EXT_NSF, 0.05)
    end = prof.r_max
    assert abs(prof(end * (1 + 1e-15)) - prof(end)) < 1e-12
    assert prof(end + 3.0) > prof(end)


def test_frozen_and_bounded_extensions():
    grid = uniform_grid(2.0)
    frozen = RadialProfile(grid, 0.1 + 0.01 * grid, EXT_FROZEN)
    assert frozen(7.0) == pytest.approx(0.12)
    bounded = RadialProfile(grid, 0.1 + 0.01 * grid)
    assert bounded(2.0 * (1 + 1e-13)) == pytest.approx(0.12)
    with pytest.raises(ProfileRangeError):
        bounded(2.1)


def test_validation():
    grid = uniform_grid(1.0)
    with pytest.raises(ValueError):
        RadialProfile(grid + 0.1, np.ones_like(grid) * 0.1)
    with pytest.raises(ValueError):
        RadialProfile(grid, np.full_like(grid, 0.75))
    with pytest.raises(ValueError):
        from_function(lambda P: P - 0.5, grid)
    with pytest.raises(ValueError):
        RadialProfile(grid, np.full_like(grid, 0.1), extension="linear")


def test_from_nsf_oracle_matches_nodes():
    oracle = NSFOracle(0.05, 0.1)
    grid = uniform_grid(10.0)
    prof = from_function(oracle, grid, EXT_NSF, 0.05)
    np.testing.assert_array_equal(prof.values, oracle(grid))


def test_mean_volume_fraction_examples():
    C = Domain.cylinder(10.0)
    S = Domain.sphere(10.0)
    grid = uniform_grid(10.0)
    assert abs(mean_volume_fraction(from_function(lambda P: 0.2, grid), C) - 0.2) < 1e-13
    assert abs(mean_volume_fraction(from_function(lambda P: 0.2, grid), S) - 0.2) < 1e-13
    lin = RadialProfile(grid, np.maximum(grid / 10.0, 1e-3) * 0.7)
    # the axis node carries zero weight, so lifting it to stay positive is harmless
    assert mean_volume_fraction(lin, C) == pytest.approx(0.7 * 2 / 3, abs=1e-12)
    assert mean_volume_fraction(lin, S) == pytest.approx(0.7 * 3 / 4, abs=1e-12)
    with pytest.raises(ValueError):
        mean_volume_fraction(lin, Domain.unbounded())
    with pytest.raises(ValueError):
        mean_volume_fraction(lin, Domain.cylinder(12.0))


def test_csv_round_trip(tmp_path):
    grid = uniform_grid(4.0, 0.1)
    values = 0.1 + 0.05 * np.exp(-grid) * np.cos(5 * grid) ** 2
    prof = RadialProfile(grid, values)
    path = tmp_path / "p.csv"
    write_csv(prof, path, {"extra": grid * 2})
    back = read_csv(path)
    np.testing.assert_array_equal(back.nodes, prof.nodes)
    np.testing.assert_array_equal(back.values, prof.values)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(1e-4, 0.7), min_size=6, max_size=30))
def test_no_overshoot_and_positive(values):
    values = np.array(values)
    grid = np.arange(len(values)) * 0.05
    prof = RadialProfile(grid, values)
    for i in range(len(grid) - 1):
        q = np.linspace(grid[i], grid[i + 1], 21)
        y = prof(q)
        lo, hi = sorted(values[i : i + 2])
        assert np.all(y > 0)
        assert np.all(y >= lo - 1e-12) and np.all(y <= hi + 1e-12)
