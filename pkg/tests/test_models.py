from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from swiptcap import (
    CapacitySolution,
    DiscreteDistribution,
    EffectivePeak,
    OptimalityReport,
    QuadratureSpec,
    RETrace,
    RETracePoint,
    SolverOptions,
    SolveStatus,
)


def test_distribution_validation() -> None:
    with pytest.raises(ValidationError):
        DiscreteDistribution(support=(0.0, 1.0), probs=(0.5, 0.6))
    with pytest.raises(ValidationError):
        DiscreteDistribution(support=(1.0, 0.0), probs=(0.5, 0.5))
    with pytest.raises(ValidationError):
        DiscreteDistribution(support=(0.0,), probs=(0.5, 0.5))
    with pytest.raises(ValidationError):
        DiscreteDistribution(support=(0.0, 1.0), probs=(1.5, -0.5))
    with pytest.raises(ValidationError):
        DiscreteDistribution(support=(), probs=())


def test_distribution_helpers() -> None:
    dist = DiscreteDistribution.from_arrays([-2.0, 0.0, 2.0], [1.0, 2.0, 1.0], normalize=True)
    assert dist.probs == (0.25, 0.5, 0.25)
    assert dist.mean_square() == pytest.approx(2.0)
    assert dist.expect([1.0, 0.0, 1.0]) == pytest.approx(0.5)
    assert len(dist) == 3
    np.testing.assert_array_equal(dist.mass_points(0.3), [0.0])
    assert DiscreteDistribution.point_mass(1.5).support == (1.5,)


def test_distribution_is_frozen_and_comparable() -> None:
    a = DiscreteDistribution(support=(0.0, 1.0), probs=(0.5, 0.5))
    b = DiscreteDistribution.from_arrays([0.0, 1.0], [0.5, 0.5])
    assert a == b
    with pytest.raises(ValidationError):
        a.support = (2.0, 3.0)  # type: ignore[misc]


def test_quadrature_spec_interval() -> None:
    with pytest.raises(ValidationError):
        QuadratureSpec(lower=1.0, upper=1.0)
    with pytest.raises(ValidationError):
        QuadratureSpec(lower=0.0, upper=1.0, node_count=8)


def test_solver_options() -> None:
    opts = SolverOptions()
    assert opts.grid_size(amplitude=False) == 201
    assert opts.grid_size(amplitude=True) == 101
    assert SolverOptions(grid_points=55).grid_size(amplitude=True) == 55
    assert opts.tolerance_for(2.0) == pytest.approx(2e-3)
    assert opts.tolerance_for(0.0) == pytest.approx(1e-5)
    assert SolverOptions(kkt_tol=1e-4).tolerance_for(2.0) == 1e-4
    with pytest.raises(ValidationError):
        SolverOptions(unknown_key=1)  # type: ignore[call-arg]


def test_solution_verified() -> None:
    dist = DiscreteDistribution.point_mass(0.0)
    assert not CapacitySolution(dist=dist, rate=0.0).verified
    report = OptimalityReport(
        grid=(0.0,), s_values=(0.0,), min_s=0.0, max_abs_s_at_mass=0.0, tolerance=1e-5, passed=True
    )
    assert report
    assert CapacitySolution(dist=dist, rate=0.0, report=report).verified


def test_trace_monotone_skips_unsolved_points() -> None:
    def point(rate: float, harvested: float) -> RETracePoint:
        return RETracePoint(
            p_req={1: harvested},
            rate=rate,
            harvested={1: harvested},
            dist=None,
            verified=False,
            status=SolveStatus.OPTIMAL if math.isfinite(rate) else SolveStatus.INFEASIBLE,
        )

    trace = RETrace(receiver=1, points=(point(2.0, 1e-6), point(math.nan, math.nan), point(1.5, 2e-6)))
    assert trace.is_monotone()
    np.testing.assert_array_equal(trace.powers[[0, 2]], [1e-6, 2e-6])
    rising = RETrace(receiver=1, points=(point(1.0, 1e-6), point(1.1, 2e-6)))
    assert not rising.is_monotone()


def test_effective_peak_saturates() -> None:
    assert EffectivePeak(a=13.4, a_t_sat={1: 18.0, 2: 21.8}, a_sat=13.4).saturates is False
    assert EffectivePeak(a=20.0, a_t_sat={1: 18.0, 2: 21.8}, a_sat=18.0).saturates is True
