from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from swiptcap import CapacityProblem, DiscreteDistribution, EhConstraint, RealAwgnChannel, lp_max_harvest
from swiptcap._types import FloatArray

unit = RealAwgnChannel(h_i=1.0, sigma_n2=1.0)


def cubic(amplitude: FloatArray) -> FloatArray:
    return amplitude**3


def test_lp_on_a_convex_power_curve() -> None:
    grid = np.linspace(-2.0, 2.0, 41)
    dist, value = lp_max_harvest(grid, cubic(np.abs(grid)), 1.0)
    # Mass 1/4 at one peak and the rest at zero.
    assert value == pytest.approx(8.0 / 4.0, rel=1e-12)
    assert len(dist) == 2
    assert dist.mean_square() == pytest.approx(1.0, rel=1e-12)


def test_lp_with_budget_above_every_point() -> None:
    grid = np.linspace(-1.0, 1.0, 11)
    dist, value = lp_max_harvest(grid, cubic(np.abs(grid)), 5.0)
    assert value == pytest.approx(1.0)
    assert dist == DiscreteDistribution.point_mass(-1.0)


@pytest.mark.parametrize("seed", range(10))
def test_grid_maximum_matches_vertex_enumeration(seed: int) -> None:
    rng = np.random.default_rng(seed)
    peak = rng.uniform(0.5, 5.0)
    sigma2 = rng.uniform(0.05, 1.2) * peak**2
    grid = np.linspace(-peak, peak, 401)
    # Increasing up to a random knee, flat past it.
    knee = rng.uniform(0.2, 1.2) * peak
    scale = rng.uniform(1e-6, 1e-3)
    exponent = rng.uniform(1.5, 4.0)

    def power(amplitude: FloatArray) -> FloatArray:
        return scale * np.minimum(amplitude, knee) ** exponent

    problem = CapacityProblem(grid, unit, sigma2, (EhConstraint(1, power, 0.0),))
    _, expected = lp_max_harvest(grid, power(np.abs(grid)), sigma2)
    assert problem.max_harvest()[0] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_two_point_vertices_match_a_full_lp(seed: int) -> None:
    rng = np.random.default_rng(seed)
    grid = np.sort(np.append(rng.uniform(-3.0, 3.0, 59), 0.0))
    # Arbitrary nonnegative power, neither monotone nor convex.
    power = rng.uniform(0.0, 1.0, grid.size)
    sigma2 = rng.uniform(0.2, 4.0)
    dist, value = lp_max_harvest(grid, power, sigma2)
    full = linprog(
        -power,
        A_ub=(grid**2)[None, :],
        b_ub=[sigma2],
        A_eq=np.ones((1, grid.size)),
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    assert full.success
    assert value == pytest.approx(-full.fun, rel=1e-9)
    assert len(dist) <= 2
    assert dist.mean_square() <= sigma2 * (1 + 1e-12)


def test_lp_rejects_bad_input() -> None:
    with pytest.raises(ValueError):
        lp_max_harvest(np.linspace(-1, 1, 5), np.ones(4), 1.0)
    with pytest.raises(ValueError):
        lp_max_harvest(np.linspace(-1, 1, 1001), np.ones(1001), 1.0)
    with pytest.raises(ValueError):
        lp_max_harvest(np.array([1.0, 2.0]), np.ones(2), 0.5)
