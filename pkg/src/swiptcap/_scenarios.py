from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import optimize
from typing_extensions import Self

from swiptcap._channels import AmplitudeChannel, BaseChannel, RealAwgnChannel
from swiptcap._enums import Signalling, SolveStatus
from swiptcap._exceptions import InfeasibleDemandError, ParameterError, SaturatedRegimeError, SwiptError
from swiptcap._models import (
    ActiveConstraint,
    CapacitySolution,
    DiscreteDistribution,
    EffectivePeak,
    RETrace,
    RETracePoint,
    SolverOptions,
    TxConstraints,
)
from swiptcap._rectenna import Rectenna
from swiptcap._solver import CapacityProblem, EhConstraint, smith_capacity, solve
from swiptcap._types import ArrayLike, FloatArray, GridSpacing

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0
"""m/s"""

# Rates closer than this are treated as a tie when picking the binding receiver.
_TIE_BITS = 1e-6
_CROSS_CHECK_BITS = 1e-3

Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class Receiver(BaseModel):
    """An energy-harvesting receiver."""

    model_config = ConfigDict(frozen=True)

    id: int
    """Receiver identifier, unique within a deployment."""

    d_e: Positive
    """Distance from the transmitter (m)."""

    rectenna: Rectenna = Rectenna()
    """Rectenna at the receiver."""

    a_r: Positive | None = None
    """Cap on the received RF amplitude A_R,l (V), if any."""


class Deployment(BaseModel):
    """
    Transmitter, information receiver and energy receivers with path-loss gains
    ``|h|^2 = (c / (4 pi d f_c)) ** alpha``.

    Examples
    --------
    ```py
    from swiptcap import Deployment, Receiver

    deployment = Deployment(receivers=(Receiver(id=1, d_e=5.0),))
    print(deployment.receiver_gain(1))  # about 4.091e-4
    ```
    """

    model_config = ConfigDict(frozen=True)

    f_c: Positive = 2.45e9
    """Carrier frequency (Hz)."""

    alpha: Annotated[float, Field(ge=2, allow_inf_nan=False)] = 2.5
    """Path-loss exponent."""

    d_i: Positive = 25.0
    """Distance of the information receiver (m)."""

    sigma_n2: Positive = 1e-8
    """Noise power per real dimension at the information receiver (W)."""

    receivers: tuple[Receiver, ...] = ()
    """Energy receivers."""

    @model_validator(mode="after")
    def _unique_ids(self) -> Self:
        ids = [r.id for r in self.receivers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"receiver ids must be unique, got {ids}")
        return self

    def channel_gain(self, distance: float) -> float:
        """Amplitude gain |h| at `distance` metres."""
        return channel_gain(self, distance)

    @property
    def h_i(self) -> float:
        """Gain of the information link."""
        return self.channel_gain(self.d_i)

    def receiver(self, receiver_id: int) -> Receiver:
        for r in self.receivers:
            if r.id == receiver_id:
                return r
        raise KeyError(f"no receiver with id {receiver_id}; have {[r.id for r in self.receivers]}")

    def receiver_gain(self, receiver_id: int) -> float:
        """Gain |h_E| of the link to an energy receiver."""
        return self.channel_gain(self.receiver(receiver_id).d_e)

    def information_channel(self, signalling: Signalling = Signalling.REAL) -> BaseChannel:
        """The real AWGN channel, or the amplitude channel of complex signalling, to the information receiver."""
        if signalling is Signalling.COMPLEX:
            return AmplitudeChannel(h_i_mag=self.h_i, sigma_n2=self.sigma_n2)
        return RealAwgnChannel(h_i=self.h_i, sigma_n2=self.sigma_n2)

    def harvester(self, receiver_id: int) -> Harvester:
        r = self.receiver(receiver_id)
        return Harvester(r.id, r.rectenna, self.channel_gain(r.d_e))

    def harvesters(self) -> tuple[Harvester, ...]:
        return tuple(self.harvester(r.id) for r in self.receivers)


@dataclass(frozen=True)
class Harvester:
    """
    Harvested DC power P_l of one receiver as a function of the transmit amplitude.

    Instances are callable on arrays of non-negative amplitudes and serve as the
    harvesting function of an `EhConstraint`.
    """

    receiver: int
    rectenna: Rectenna
    h_e: float

    def __call__(self, amplitude: FloatArray) -> FloatArray:
        return np.asarray(self.rectenna.harvested_power(amplitude, self.h_e), dtype=np.float64)

    @property
    def a_t_sat(self) -> float:
        """Transmit amplitude at which this receiver saturates (V)."""
        return self.rectenna.a_t_sat(self.h_e)

    def constraint(self, required: float = 0.0) -> EhConstraint:
        return EhConstraint(self.receiver, self, required)


def channel_gain(deployment: Deployment, distance: float) -> float:
    """
    Free-space style amplitude gain.

    Parameters
    ----------
    deployment : Deployment
        Supplies the carrier frequency and path-loss exponent.
    distance : float
        Link distance (m), positive.

    Returns
    -------
    float
        ``(c / (4 pi d f_c)) ** (alpha / 2)``.
    """
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance!r}")
    return (SPEED_OF_LIGHT / (4.0 * math.pi * distance * deployment.f_c)) ** (deployment.alpha / 2.0)


def effective_peak(tx: TxConstraints, deployment: Deployment) -> EffectivePeak:
    """
    Peak amplitude after the receivers' amplitude caps.

    ``A = min(A_T, min_l A_R,l / (sqrt(2) |h_E,l|))`` over receivers that carry a cap.
    The saturation amplitudes ``A_T,sat_l`` and ``A_sat = min(A_T, min_l A_T,sat_l)``
    are reported alongside.
    """
    a = tx.a_t
    sat: dict[int, float] = {}
    for r in deployment.receivers:
        h_e = deployment.channel_gain(r.d_e)
        if r.a_r is not None:
            a = min(a, r.a_r / (math.sqrt(2.0) * h_e))
        sat[r.id] = r.rectenna.a_t_sat(h_e)
    a_sat = min([tx.a_t, *sat.values()])
    return EffectivePeak(a=a, a_t_sat=sat, a_sat=a_sat)


def max_wpt(
    harvester: Harvester,
    a: float,
    sigma2: float,
    split: float | None = None,
    *,
    signalling: Signalling = Signalling.REAL,
) -> tuple[DiscreteDistribution, float]:
    """
    Distribution maximizing the average harvested power of one receiver.

    With ``A' = min(A, A_T,sat)`` the optimum puts total mass ``min(sigma2 / A'^2, 1)``
    on the peaks and the rest at zero.

    Parameters
    ----------
    harvester : Harvester
        The receiver's harvesting function.
    a : float
        Peak amplitude A (V).
    sigma2 : float
        Average power budget (W).
    split : float, optional
        Share of the peak mass placed at ``-A'`` for real signalling. Defaults to 1/2,
        which maximizes the rate among the power-optimal distributions.
    signalling : Signalling, optional
        For complex signalling the distribution is over the amplitude, with the peak mass at ``A'``.

    Returns
    -------
    tuple[DiscreteDistribution, float]
        The distribution and P_max (W).
    """
    if not (a > 0 and sigma2 > 0):
        raise ValueError("peak amplitude and power budget must be positive")
    split = 0.5 if split is None else split
    if not 0 <= split <= 1:
        raise ValueError(f"split must lie in [0, 1], got {split!r}")

    a_prime = min(a, harvester.a_t_sat)
    on = min(sigma2 / a_prime**2, 1.0)
    p_max = on * float(harvester(np.array([a_prime]))[0])

    if signalling is Signalling.COMPLEX:
        support, probs = ([a_prime], [1.0]) if on >= 1 else ([0.0, a_prime], [1.0 - on, on])
    elif on >= 1:
        support, probs = [-a_prime, a_prime], [split, 1.0 - split]
    else:
        support, probs = [-a_prime, 0.0, a_prime], [split * on, 1.0 - on, (1.0 - split) * on]
    return DiscreteDistribution.from_arrays(support, probs), p_max


def _gaussian_second_moment(a_prime: float, d: float) -> float:
    # E[x^2] of exp(-d x^2) truncated to [-A', A'].
    root = math.sqrt(d) * a_prime
    return 1.0 / (2.0 * d) - a_prime * math.exp(-root * root) / (math.sqrt(math.pi * d) * math.erf(root))


class SuboptimalDistribution(BaseModel):
    """
    Truncated Gaussian on ``[-A', A']`` plus equal atoms at both peaks,
    ``f(x) = b exp(-d x^2) + c (delta(x + A') + delta(x - A'))``.
    """

    model_config = ConfigDict(frozen=True)

    a_prime: Positive
    """Peak amplitude A' (V)."""

    sigma2: Positive
    """Average power budget (W)."""

    d: Positive
    """Gaussian width parameter (1/V^2). Larger values narrow the Gaussian."""

    c: Annotated[float, Field(ge=0, le=0.5)]
    """Mass of each peak atom."""

    @staticmethod
    def bound(a_prime: float, sigma2: float, d: float) -> float:
        """Largest peak mass c that keeps E[x^2] <= sigma2."""
        v = _gaussian_second_moment(a_prime, d)
        return (sigma2 - v) / (2.0 * a_prime**2 - 2.0 * v)

    @property
    def c_bound(self) -> float:
        return self.bound(self.a_prime, self.sigma2, self.d)

    @property
    def b(self) -> float:
        """Height of the Gaussian part, ``(1 - 2c) / (sqrt(pi / d) erf(sqrt(d) A'))``."""
        return (1.0 - 2.0 * self.c) / (math.sqrt(math.pi / self.d) * math.erf(math.sqrt(self.d) * self.a_prime))

    def pdf(self, x: ArrayLike) -> FloatArray:
        """Density of the continuous part; the atoms are not included."""
        xx = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(xx) <= self.a_prime, self.b * np.exp(-self.d * xx * xx), 0.0)

    def second_moment(self) -> float:
        return 2.0 * self.c * self.a_prime**2 + (1.0 - 2.0 * self.c) * _gaussian_second_moment(self.a_prime, self.d)

    def discretize(self, grid_points: int = 201) -> DiscreteDistribution:
        """
        Distribution on a uniform grid of `grid_points` over ``[-A', A']``.

        Interior points receive ``b exp(-d x^2) dx``, rescaled so the interior
        carries exactly ``1 - 2c``; each end point receives c.
        """
        if grid_points < 3:
            raise ValueError("at least three grid points are needed")
        x = np.linspace(-self.a_prime, self.a_prime, grid_points)
        dx = x[1] - x[0]
        p = np.empty_like(x)
        interior = self.b * np.exp(-self.d * x[1:-1] ** 2) * dx
        total = interior.sum()
        # Narrow Gaussians underflow everywhere but the centre point.
        p[1:-1] = interior * ((1.0 - 2.0 * self.c) / total) if total > 0 else 0.0
        if total <= 0:
            p[grid_points // 2] = 1.0 - 2.0 * self.c
        p[0] = p[-1] = self.c
        return DiscreteDistribution.from_arrays(x, p, normalize=True)


def suboptimal_distribution(a_prime: float, sigma2: float, d: float, c: float) -> SuboptimalDistribution:
    """
    Validated superposition distribution.

    Raises
    ------
    ParameterError
        If `c` is negative or exceeds the largest mass compatible with the power budget.
    """
    if not d > 0:
        raise ValueError(f"d must be positive, got {d!r}")
    limit = SuboptimalDistribution.bound(a_prime, sigma2, d)
    if c < 0 or c > limit * (1 + 1e-12):
        raise ParameterError(f"peak mass {c!r} exceeds the bound {limit:.9g} for d = {d:.6g}", bound=limit)
    return SuboptimalDistribution(a_prime=a_prime, sigma2=sigma2, d=d, c=min(c, max(limit, 0.0)))


def suboptimal_for_power(
    harvester: Harvester,
    a_prime: float,
    sigma2: float,
    target: float,
    grid_points: int = 201,
) -> tuple[SuboptimalDistribution, DiscreteDistribution]:
    """
    Member of the superposition family harvesting `target` watts.

    The peak mass is set as large as the power budget allows, on both the continuous
    density and its discretization, and d is found by bracketed root search.

    Returns
    -------
    tuple[SuboptimalDistribution, DiscreteDistribution]
        The continuous description and its discretization.

    Raises
    ------
    ParameterError
        If `target` lies outside the range the family covers; `bound` holds the violated end.
    """
    x = np.linspace(-a_prime, a_prime, grid_points)
    inner2 = x[1:-1] ** 2
    power = harvester(np.abs(x))
    dx = x[1] - x[0]

    def c_of(d: float) -> float:
        g = np.exp(-d * inner2)
        v = float(g @ inner2 / g.sum()) if g.sum() > 0 else 0.0
        c_disc = (sigma2 - v) / (2.0 * a_prime**2 - 2.0 * v)
        return min(c_disc, SuboptimalDistribution.bound(a_prime, sigma2, d), 0.5)

    def member(log_d: float) -> SuboptimalDistribution:
        d = math.exp(log_d)
        return SuboptimalDistribution(a_prime=a_prime, sigma2=sigma2, d=d, c=max(c_of(d), 0.0))

    def excess(log_d: float) -> float:
        return float(member(log_d).discretize(grid_points).p @ power) - target

    lo = math.log(1e-6 / a_prime**2)
    hi = math.log(50.0 / dx**2)
    if c_of(math.exp(lo)) < 0:
        lo = optimize.brentq(lambda t: c_of(math.exp(t)), lo, hi, xtol=1e-12)
    lo_val, hi_val = excess(lo), excess(hi)
    if lo_val > 0:
        raise ParameterError(f"{target:.6g} W is below the family's minimum", bound=lo_val + target)
    if hi_val < 0:
        raise ParameterError(f"{target:.6g} W is above the family's maximum", bound=hi_val + target)
    log_d = optimize.brentq(excess, lo, hi, xtol=1e-10)
    best = member(log_d)
    return best, best.discretize(grid_points)


def capacity_problem(
    deployment: Deployment,
    tx: TxConstraints,
    p_req: Mapping[int, float] | None = None,
    *,
    signalling: Signalling = Signalling.REAL,
    options: SolverOptions = SolverOptions(),
    receivers: Sequence[int] | None = None,
) -> CapacityProblem:
    """
    Conditional capacity problem of a deployment.

    Every receiver in `receivers` (all by default) contributes a harvesting
    constraint with demand ``p_req.get(id, 0)``. The grid covers the effective peak
    and includes the saturation amplitudes inside it.
    """
    p_req = dict(p_req or {})
    unknown = set(p_req) - {r.id for r in deployment.receivers}
    if unknown:
        raise KeyError(f"unknown receiver ids {sorted(unknown)}")
    ids = [r.id for r in deployment.receivers] if receivers is None else list(receivers)
    harvesters = [deployment.harvester(rid) for rid in ids]
    peak = effective_peak(tx, deployment)
    return CapacityProblem.on_uniform_grid(
        deployment.information_channel(signalling),
        peak.a,
        tx.sigma2,
        [h.constraint(p_req.get(h.receiver, 0.0)) for h in harvesters],
        options,
        anchors=[h.a_t_sat for h in harvesters],
    )


def active_constraint(
    deployment: Deployment,
    tx: TxConstraints,
    p_req: Mapping[int, float],
    *,
    signalling: Signalling = Signalling.REAL,
    options: SolverOptions = SolverOptions(),
    cross_check: bool = False,
) -> ActiveConstraint:
    """
    Find the single binding harvesting constraint.

    When no receiver can saturate, at most one harvesting constraint is active at
    the optimum: the one whose problem, with every other harvesting constraint
    removed, has the smallest capacity.

    Parameters
    ----------
    deployment : Deployment
        Receivers and gains.
    tx : TxConstraints
        Power budget and peak amplitude.
    p_req : Mapping[int, float]
        Required harvested power per receiver id (W). Missing receivers require nothing.
    signalling : Signalling, optional
        Real or complex signalling.
    options : SolverOptions, optional
        Solver settings.
    cross_check : bool, optional
        Also solve the joint problem and require its rate to match within 1e-3 bits.

    Returns
    -------
    ActiveConstraint

    Raises
    ------
    SaturatedRegimeError
        If the effective peak reaches some receiver's saturation amplitude.
    InfeasibleDemandError
        If a single demand cannot be met.
    SwiptError
        If the cross-check fails.
    """
    peak = effective_peak(tx, deployment)
    if peak.saturates:
        raise SaturatedRegimeError(
            f"peak amplitude {peak.a:.6g} V saturates a receiver (A_T,sat = {peak.a_t_sat}); solve the joint problem"
        )

    channel = deployment.information_channel(signalling)
    harvesters = deployment.harvesters()
    smith = smith_capacity(channel, peak.a, tx.sigma2, [(h.receiver, h) for h in harvesters], options)

    single_rates: dict[int, float] = {}
    solutions: dict[int, CapacitySolution] = {}
    for h in harvesters:
        req = p_req.get(h.receiver, 0.0)
        if req <= smith.harvested[h.receiver]:
            single_rates[h.receiver] = smith.rate
            continue
        problem = CapacityProblem.on_uniform_grid(channel, peak.a, tx.sigma2, [h.constraint(req)], options)
        solution = solve(problem, options)
        single_rates[h.receiver] = solution.rate
        solutions[h.receiver] = solution

    if not solutions:
        logger.info("Every demand is met at the capacity-achieving input")
        selected: int | None = None
        rate, chosen = smith.rate, smith
    else:
        ranked = sorted(solutions, key=lambda rid: (single_rates[rid], rid))
        selected = ranked[0]
        tied = [rid for rid in ranked if single_rates[rid] - single_rates[selected] < _TIE_BITS]
        if len(tied) > 1:
            selected = min(tied)
            logger.warning("Receivers %s tie within %.0e bits; picking receiver %d", tied, _TIE_BITS, selected)
        rate, chosen = single_rates[selected], solutions[selected]

    full_rate = None
    if cross_check:
        full = solve(capacity_problem(deployment, tx, p_req, signalling=signalling, options=options), options)
        full_rate = full.rate
        if abs(full_rate - rate) > _CROSS_CHECK_BITS:
            raise SwiptError(
                f"joint solve gives {full_rate:.9g} bits but the single-constraint reduction gives {rate:.9g} bits"
            )

    return ActiveConstraint(
        receiver=selected, rate=rate, single_rates=single_rates, solution=chosen, full_rate=full_rate
    )


def preq_grid(p_min: float, p_max: float, count: int, spacing: GridSpacing = "linear") -> FloatArray:
    """
    Demands from `p_min` to `p_max` inclusive.

    ``"log"`` spacing places the points geometrically closer to `p_max`,
    where the rate-energy curve falls steepest.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if p_max < p_min:
        raise ValueError(f"p_max {p_max!r} is below p_min {p_min!r}")
    if count == 1:
        return np.array([p_min])
    match spacing:
        case "linear":
            out = np.linspace(p_min, p_max, count)
        case "log":
            out = p_max - (p_max - p_min) * np.concatenate([np.geomspace(1.0, 1e-3, count - 1), [0.0]])
        case _:
            raise ValueError(f"Unknown grid spacing: {spacing!r}")
    out[0], out[-1] = p_min, p_max
    return out


def re_sweep(
    deployment: Deployment,
    tx: TxConstraints,
    receiver: int,
    p_req: ArrayLike | None = None,
    *,
    points: int = 10,
    spacing: GridSpacing = "linear",
    signalling: Signalling = Signalling.REAL,
    options: SolverOptions = SolverOptions(),
    workers: int = 1,
) -> RETrace:
    """
    Trace the rate-energy curve of one receiver.

    Parameters
    ----------
    deployment : Deployment
        Must contain `receiver`.
    tx : TxConstraints
        Power budget and peak amplitude.
    receiver : int
        Receiver whose demand is swept. Only its constraint is imposed.
    p_req : array_like, optional
        Demands (W). Defaults to `points` values from P_min, the power harvested at
        the capacity-achieving input, to P_max, the largest achievable power.
    points : int, optional
        Number of default demands.
    spacing : {"linear", "log"}, optional
        Spacing of the default demands.
    signalling : Signalling, optional
        Real or complex signalling.
    options : SolverOptions, optional
        Solver settings.
    workers : int, optional
        Threads solving points concurrently. Points come back in input order.

    Returns
    -------
    RETrace
        Points whose demand cannot be met carry `SolveStatus.INFEASIBLE` and a NaN rate.
    """
    base = capacity_problem(deployment, tx, signalling=signalling, options=options, receivers=[receiver])
    if p_req is None:
        smith = solve(base, options)
        p_min = smith.harvested[receiver]
        p_max = float(base.max_harvest()[0])
        grid = preq_grid(p_min, p_max, points, spacing)
    else:
        grid = np.atleast_1d(np.asarray(p_req, dtype=np.float64))

    harvester = deployment.harvester(receiver)

    def run(req: float) -> RETracePoint:
        problem = CapacityProblem(base.grid, base.channel, base.ap_budget, (harvester.constraint(req),), base.peak)
        try:
            solution = solve(problem, options)
        except InfeasibleDemandError as err:
            logger.warning("Skipping %.6g W: %s", req, err)
            return RETracePoint(
                p_req={receiver: float(req)},
                rate=math.nan,
                harvested={receiver: math.nan},
                dist=None,
                verified=False,
                status=SolveStatus.INFEASIBLE,
            )
        return RETracePoint(
            p_req={receiver: float(req)},
            rate=solution.rate,
            harvested=solution.harvested,
            dist=solution.dist,
            verified=solution.verified,
            status=solution.status,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, grid.tolist()))
    else:
        results = [run(req) for req in grid.tolist()]
    return RETrace(receiver=receiver, points=tuple(results))


def gaussian_capacity(channel: BaseChannel, sigma2: float) -> float:
    """Capacity of the channel under the average power constraint alone (bits)."""
    return channel.gaussian_capacity(sigma2)

