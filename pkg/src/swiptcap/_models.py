from __future__ import annotations

from typing import Annotated, Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self

from swiptcap._enums import SolveStatus
from swiptcap._types import FloatArray, InitialGuess

PositiveFloat = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class QuadratureSpec(BaseModel):
    """Fixed-node quadrature over a finite interval."""

    model_config = ConfigDict(frozen=True)

    node_count: Annotated[int, Field(ge=16)] = 2048
    """Total number of nodes. Rounded down to a multiple of the 16-point panel rule."""

    lower: float
    """Lower limit of integration."""

    upper: float
    """Upper limit of integration."""

    @model_validator(mode="after")
    def _check_interval(self) -> Self:
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be smaller than upper ({self.upper})")
        return self


class RootSolveSpec(BaseModel):
    """Settings for a scalar Newton solve."""

    model_config = ConfigDict(frozen=True)

    initial_guess: float
    """Starting point of the iteration."""

    abs_tolerance: PositiveFloat = 1e-12
    """Absolute tolerance on the root, in the units of the root."""

    max_iterations: Annotated[int, Field(ge=1)] = 100
    """Iteration budget."""


class DiscreteDistribution(BaseModel):
    """
    A probability mass function on a finite, strictly increasing support.
    This is immutable and supports equality checking.
    """

    model_config = ConfigDict(frozen=True)

    support: tuple[float, ...]
    """Support points (V). Amplitudes for the complex case, symbols for the real case."""

    probs: tuple[float, ...]
    """Probability of each support point."""

    @field_validator("probs")
    @classmethod
    def _check_probs(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        p = np.asarray(v, dtype=np.float64)
        if p.size == 0:
            raise ValueError("a distribution needs at least one support point")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
        return v

    @model_validator(mode="after")
    def _check_support(self) -> Self:
        x = np.asarray(self.support, dtype=np.float64)
        if x.size != len(self.probs):
            raise ValueError("support and probs must have equal lengths")
        if not np.all(np.isfinite(x)):
            raise ValueError("support points must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("support must be strictly increasing")
        return self

    @classmethod
    def from_arrays(cls, support: Any, probs: Any, *, normalize: bool = False) -> DiscreteDistribution:
        """
        Build a distribution from array-likes.

        Parameters
        ----------
        support : array_like
            Strictly increasing support points.
        probs : array_like
            Probabilities (or non-negative weights if `normalize` is set).
        normalize : bool, optional
            Divide the weights by their sum first.

        Returns
        -------
        DiscreteDistribution
        """
        p = np.asarray(probs, dtype=np.float64)
        if normalize:
            p = p / p.sum()
        return cls(support=tuple(np.asarray(support, dtype=np.float64).tolist()), probs=tuple(p.tolist()))

    @classmethod
    def point_mass(cls, x: float) -> DiscreteDistribution:
        """A single mass point at `x`."""
        return cls(support=(float(x),), probs=(1.0,))

    @property
    def x(self) -> FloatArray:
        """Support as a numpy array."""
        return np.asarray(self.support, dtype=np.float64)

    @property
    def p(self) -> FloatArray:
        """Probabilities as a numpy array."""
        return np.asarray(self.probs, dtype=np.float64)

    def expect(self, values: Any) -> float:
        """Expectation of per-point `values` under this distribution."""
        return float(self.p @ np.asarray(values, dtype=np.float64))

    def mean_square(self) -> float:
        """Second moment E[x^2], the average transmit power on a 1 Ohm load."""
        return self.expect(self.x**2)

    def mass_points(self, mass_floor: float = 1e-7) -> FloatArray:
        """Support points carrying more than `mass_floor` probability."""
        return self.x[self.p > mass_floor]

    def __len__(self) -> int:
        return len(self.support)


class OptimalityReport(BaseModel):
    """Result of checking the necessary and sufficient optimality conditions."""

    model_config = ConfigDict(frozen=True)

    grid: tuple[float, ...]
    """Verification grid."""

    s_values: tuple[float, ...]
    """The slack function sampled on `grid` (bits)."""

    min_s: float
    """Smallest sampled value of the slack function."""

    max_abs_s_at_mass: float
    """Largest |s| over the mass points of the distribution."""

    tolerance: float
    """Tolerance the check was performed with (bits)."""

    passed: bool
    """True iff `min_s >= -tolerance` and `max_abs_s_at_mass <= tolerance`."""

    def __bool__(self) -> bool:
        return self.passed


class CapacitySolution(BaseModel):
    """An optimal (or best found) input distribution with its certificate."""

    model_config = ConfigDict(frozen=True)

    dist: DiscreteDistribution
    """Input distribution on the solve grid."""

    rate: float
    """Mutual information (bits/channel use)."""

    lambda0: float = 0.0
    """Multiplier of the average power constraint (bits/W)."""

    lambdas: dict[int, float] = {}
    """Multiplier of each harvesting constraint, keyed by receiver id (bits/W)."""

    harvested: dict[int, float] = {}
    """Average harvested DC power at each receiver (W)."""

    status: SolveStatus = SolveStatus.OPTIMAL
    """Outcome of the solve."""

    report: OptimalityReport | None = None
    """Optimality verification, if it was run."""

    iterations: int = 0
    """Fixed-point iterations spent."""

    gap: float = 0.0
    """Final upper-minus-lower bound on the capacity (bits)."""

    @property
    def verified(self) -> bool:
        """True if an optimality report exists and passed."""
        return self.report is not None and self.report.passed


class McSpec(BaseModel):
    """Monte-Carlo settings for the oracle."""

    model_config = ConfigDict(frozen=True)

    sample_count: Annotated[int, Field(ge=1)] = 1_000_000
    """Number of channel uses to simulate."""

    seed: Annotated[int, Field(ge=0, lt=2**64)] = 20240101
    """Seed of the counter-based generator."""

    chunk_size: Annotated[int, Field(ge=1)] = 1 << 16
    """Samples per independently seeded chunk."""

    workers: Annotated[int, Field(ge=1)] = 1
    """Threads evaluating chunks."""


class SolverOptions(BaseModel):
    """Tolerances and budgets of the capacity solver."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid_points: Annotated[int, Field(ge=2)] | None = None
    """Uniform grid size. Defaults to 201 on [-A, A] and 101 on [0, A]."""

    quad_nodes: Annotated[int, Field(ge=16)] = 2048
    """Quadrature nodes over the channel output."""

    kkt_tol: PositiveFloat | None = None
    """Verification tolerance (bits). Defaults to 1e-3 * max(C, 0.01)."""

    gap_tol: PositiveFloat = 1e-6
    """Stop when the capacity upper and lower bounds are this close (bits)."""

    max_iterations: Annotated[int, Field(ge=1)] = 50_000
    """Budget of fixed-point iterations."""

    check_every: Annotated[int, Field(ge=1)] = 500
    """Iterations between optimality checks once the gap has closed."""

    mass_floor: PositiveFloat = 1e-7
    """Probabilities at or below this are not mass points."""

    verify_refinement: Annotated[int, Field(ge=1)] = 4
    """The verification grid is this many times finer than the solve grid."""

    initial: InitialGuess = "uniform"
    """Starting distribution of the fixed-point iteration."""

    def grid_size(self, *, amplitude: bool) -> int:
        """Resolved number of grid points."""
        if self.grid_points is not None:
            return self.grid_points
        return 101 if amplitude else 201

    def tolerance_for(self, rate: float) -> float:
        """Resolved verification tolerance for a solution of the given rate."""
        return self.kkt_tol if self.kkt_tol is not None else 1e-3 * max(rate, 0.01)


class TxConstraints(BaseModel):
    """Transmitter constraints."""

    model_config = ConfigDict(frozen=True)

    sigma2: PositiveFloat
    """Average power budget (W on 1 Ohm)."""

    a_t: PositiveFloat
    """Peak transmit amplitude (V)."""


class RETracePoint(BaseModel):
    """One point of a rate-energy curve."""

    model_config = ConfigDict(frozen=True)

    p_req: dict[int, float]
    """Required powers per receiver (W)."""

    rate: float
    """Achieved rate (bits/channel use)."""

    harvested: dict[int, float]
    """Achieved average harvested powers per receiver (W)."""

    dist: DiscreteDistribution | None
    """Generating input distribution, None if the point could not be solved."""

    verified: bool
    """Whether the solution passed optimality verification."""

    status: SolveStatus = SolveStatus.OPTIMAL
    """Solve status of the point."""


class RETrace(BaseModel):
    """A rate-energy curve traced by sweeping one receiver's demand."""

    model_config = ConfigDict(frozen=True)

    receiver: int
    """Receiver whose demand was swept."""

    points: tuple[RETracePoint, ...]
    """Points in order of increasing demand."""

    @property
    def rates(self) -> FloatArray:
        return np.array([pt.rate for pt in self.points])

    @property
    def powers(self) -> FloatArray:
        """Harvested power of the swept receiver at each point."""
        return np.array([pt.harvested[self.receiver] for pt in self.points])

    def is_monotone(self, tol: float = 1e-6) -> bool:
        """True if the rate never increases by more than `tol` along the solved points of the trace."""
        rates = self.rates
        return bool(np.all(np.diff(rates[np.isfinite(rates)]) <= tol))


class EffectivePeak(BaseModel):
    """Peak amplitude seen by the solver and the saturation amplitudes behind it."""

    model_config = ConfigDict(frozen=True)

    a: PositiveFloat
    """Effective peak amplitude A (V)."""

    a_t_sat: dict[int, float]
    """Transmit amplitude driving each receiver into saturation, A_T,sat_l (V)."""

    a_sat: PositiveFloat
    """min(A_T, min_l A_T,sat_l) (V)."""

    @property
    def saturates(self) -> bool:
        """True if some receiver reaches its plateau at the effective peak."""
        return any(self.a >= v for v in self.a_t_sat.values())


class ActiveConstraint(BaseModel):
    """Outcome of the single-active-constraint reduction."""

    model_config = ConfigDict(frozen=True)

    receiver: int | None
    """The binding receiver, None if every demand is met by the capacity-achieving input."""

    rate: float
    """Rate of the selected problem (bits/channel use)."""

    single_rates: dict[int, float]
    """Rate with only that receiver's constraint kept, per receiver."""

    solution: CapacitySolution
    """Solution of the selected single-constraint problem."""

    full_rate: float | None = None
    """Rate of the joint problem with every constraint, if it was cross-checked."""
