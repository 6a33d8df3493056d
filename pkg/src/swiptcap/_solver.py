from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog, nnls
from scipy.special import logsumexp

from swiptcap._channels import BaseChannel, DiscreteKernel
from swiptcap._enums import Signalling, SolveStatus
from swiptcap._exceptions import InfeasibleDemandError
from swiptcap._models import CapacitySolution, DiscreteDistribution, OptimalityReport, SolverOptions
from swiptcap._types import FloatArray, PowerFunction

logger = logging.getLogger(__name__)

_LOG2 = math.log(2.0)
# Demands this close below the grid maximum are solved at the maximum minus this margin.
_ENDPOINT_MARGIN = 1e-10
# Demands up to this far above the maximum are rounding of the maximum itself.
_INFEASIBLE_MARGIN = 1e-12
_TILT_TOL = 1e-12
_TIGHT = 1e-6
_FEASIBLE_SLOP = 1e-9


@dataclass(frozen=True)
class EhConstraint:
    """Minimum average harvested power at one energy receiver."""

    receiver: int
    """Receiver identifier."""

    power: PowerFunction
    """Harvested power (W) as a function of non-negative transmit amplitude."""

    required: float
    """Required average harvested power (W). Zero makes the constraint vacuous."""

    def __post_init__(self) -> None:
        if not self.required >= 0:
            raise ValueError(f"required power must be non-negative, got {self.required!r}")


@dataclass(frozen=True)
class CapacityProblem:
    """
    Conditional capacity over a finite input grid.

    Maximize I(F) over distributions on `grid` subject to E[x^2] <= `ap_budget`
    and E[P_l(|x|)] >= P_l,req for every harvesting constraint.
    """

    grid: FloatArray
    channel: BaseChannel
    ap_budget: float
    eh_constraints: tuple[EhConstraint, ...] = ()
    peak: float = field(default=0.0)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "eh_constraints", tuple(self.eh_constraints))
        if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be a strictly increasing one dimensional array")
        if not self.ap_budget > 0:
            raise ValueError(f"ap_budget must be positive, got {self.ap_budget!r}")
        if self.channel.signalling is Signalling.COMPLEX and grid[0] < 0:
            raise ValueError("amplitude grids must be non-negative")
        ids = [c.receiver for c in self.eh_constraints]
        if len(set(ids)) != len(ids):
            raise ValueError(f"receiver ids must be unique, got {ids}")
        if self.peak <= 0:
            object.__setattr__(self, "peak", float(np.max(np.abs(grid))))
        elif np.max(np.abs(grid)) > self.peak * (1 + 1e-12):
            raise ValueError("grid exceeds the peak amplitude")

    @classmethod
    def on_uniform_grid(
        cls,
        channel: BaseChannel,
        peak: float,
        sigma2: float,
        eh_constraints: Sequence[EhConstraint] = (),
        options: SolverOptions | None = None,
        anchors: Sequence[float] = (),
    ) -> CapacityProblem:
        """
        Problem on the default uniform grid, [-A, A] for real and [0, A] for amplitude signalling.

        Amplitudes in `anchors` that lie strictly inside the peak are added to the grid,
        mirrored for real signalling. Saturation amplitudes are the usual anchors.
        """
        options = options or SolverOptions()
        amplitude = channel.signalling is Signalling.COMPLEX
        grid = channel.support_grid(peak, options.grid_size(amplitude=amplitude))
        extra = [a for a in anchors if 0 < a < peak and np.min(np.abs(np.abs(grid) - a)) > 1e-9 * peak]
        if extra:
            mirrored = extra if amplitude else [*extra, *(-a for a in extra)]
            grid = np.unique(np.concatenate([grid, mirrored]))
        return cls(grid, channel, sigma2, tuple(eh_constraints), peak)

    @cached_property
    def harvest_table(self) -> FloatArray:
        """P_l(|x_i|), shape ``(len(eh_constraints), len(grid))``."""
        amp = np.abs(self.grid)
        rows = [np.asarray(c.power(amp), dtype=np.float64).reshape(amp.shape) for c in self.eh_constraints]
        return np.array(rows).reshape(len(rows), amp.size)

    def harvest_at(self, x: FloatArray) -> FloatArray:
        """P_l(|x|) at arbitrary points, shape ``(len(eh_constraints), len(x))``."""
        amp = np.abs(np.asarray(x, dtype=np.float64))
        rows = [np.asarray(c.power(amp), dtype=np.float64).reshape(amp.shape) for c in self.eh_constraints]
        return np.array(rows).reshape(len(rows), amp.size)

    def max_harvest(self) -> FloatArray:
        """Largest achievable average harvested power of each receiver on the grid (W)."""
        return np.array([_grid_max_harvest(self.grid, row, self.ap_budget) for row in self.harvest_table])


def _grid_max_harvest(grid: FloatArray, power: FloatArray, sigma2: float) -> float:
    # Upper concave envelope of (x^2, P) evaluated at the power budget.
    u, inverse = np.unique(grid * grid, return_inverse=True)
    top = np.full(u.size, -np.inf)
    np.maximum.at(top, inverse, power)
    hull: list[int] = []
    for k in range(u.size):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (top[j] - top[i]) * (u[k] - u[i]) <= (top[k] - top[i]) * (u[j] - u[i]):
                hull.pop()
            else:
                break
        hull.append(k)
    hx, hy = u[hull], top[hull]
    peak = int(np.argmax(hy))
    return float(np.interp(min(sigma2, float(hx[peak])), hx, hy))


def _jointly_feasible(problem: CapacityProblem, required: FloatArray) -> bool:
    res = linprog(
        np.zeros(problem.grid.size),
        A_ub=np.vstack([(problem.grid**2)[None, :], -problem.harvest_table]),
        b_ub=np.concatenate([[problem.ap_budget], -required]),
        A_eq=np.ones((1, problem.grid.size)),
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    return bool(res.status == 0)


def _effective_demands(problem: CapacityProblem) -> FloatArray:
    required = np.array([c.required for c in problem.eh_constraints], dtype=np.float64)
    if required.size == 0 or not np.any(required > 0):
        return required

    p_max = problem.max_harvest()
    for c, req, top in zip(problem.eh_constraints, required, p_max):
        if req > top * (1 + _INFEASIBLE_MARGIN):
            raise InfeasibleDemandError(c.receiver, p_max=float(top), p_req=float(req))

    effective = np.minimum(required, p_max * (1 - _ENDPOINT_MARGIN))
    for c, req, eff in zip(problem.eh_constraints, required, effective):
        if eff < req:
            logger.info("Receiver %d demands its maximum harvest; solving %.3g W below it", c.receiver, req - eff)

    if np.count_nonzero(required > 0) > 1 and not _jointly_feasible(problem, effective):
        worst = int(np.argmax(required / np.where(p_max > 0, p_max, np.inf)))
        c = problem.eh_constraints[worst]
        raise InfeasibleDemandError(c.receiver, p_max=float(p_max[worst]), p_req=float(required[worst]))
    return effective


def _constraint_rows(problem: CapacityProblem, demands: FloatArray) -> tuple[FloatArray, FloatArray, list[int]]:
    # Rows a_k with E[a_k] <= 0 meaning "constraint k holds", scaled to be dimensionless.
    rows = [problem.grid**2 / problem.ap_budget - 1.0]
    scale = [problem.ap_budget]
    active: list[int] = []
    for idx, req in enumerate(demands):
        if req > 0:
            rows.append(1.0 - problem.harvest_table[idx] / req)
            scale.append(float(req))
            active.append(idx)
    return np.array(rows), np.array(scale), active


def _tilt(w: FloatArray, rows: FloatArray, mu: FloatArray) -> tuple[FloatArray, FloatArray]:
    """
    Solve max_q sum q (w - ln q) over the simplex subject to rows @ q <= 0.

    The solution is q proportional to exp(w - mu @ rows) with mu >= 0 minimizing
    the log-partition function, found by projected Newton from the given `mu`.
    Returns the new multipliers and ln q.
    """
    mu = np.maximum(mu, 0.0)
    z = w - mu @ rows
    lse = float(logsumexp(z))
    for _ in range(100):
        q = np.exp(z - lse)
        mean = rows @ q
        free = (mu > 0) | (mean > 0)
        if not np.any(free) or np.max(np.abs(mean[free])) <= _TILT_TOL:
            break

        sub = rows[free]
        centred = sub - mean[free][:, None]
        hess = (centred * q) @ centred.T
        hess += np.eye(hess.shape[0]) * (1e-14 * max(float(np.trace(hess)), 1e-300))
        step = np.linalg.lstsq(hess, mean[free], rcond=None)[0]

        t = 1.0
        improved = False
        for _ in range(60):
            cand = mu.copy()
            cand[free] = np.maximum(mu[free] + t * step, 0.0)
            z_c = w - cand @ rows
            lse_c = float(logsumexp(z_c))
            if lse_c <= lse + 1e-15 * abs(lse):
                mu, z, lse, improved = cand, z_c, lse_c, True
                break
            t *= 0.5
        if not improved:
            break
    return mu, z - lse


def _initial_log_probs(problem: CapacityProblem, options: SolverOptions) -> FloatArray:
    n = problem.grid.size
    weights = np.ones(n)
    if options.initial == "peaks":
        weights[np.argmax(np.abs(problem.grid))] += n
        weights[np.argmin(problem.grid)] += n
        weights[np.argmin(np.abs(problem.grid))] += n
    return np.log(weights / weights.sum())


def _solution_from(
    problem: CapacityProblem,
    kernel: DiscreteKernel,
    log_p: FloatArray,
    mu: FloatArray,
    scale: FloatArray,
    active: list[int],
    status: SolveStatus,
    iterations: int,
    gap: float,
    report: OptimalityReport | None,
) -> CapacitySolution:
    p = np.exp(log_p)
    p /= p.sum()
    info = kernel.info_density(np.log(np.maximum(p, 1e-320)))
    harvested = {c.receiver: float(row @ p) for c, row in zip(problem.eh_constraints, problem.harvest_table)}
    lambdas = {c.receiver: 0.0 for c in problem.eh_constraints}
    for pos, idx in enumerate(active, start=1):
        c = problem.eh_constraints[idx]
        # A strictly slack constraint carries no multiplier.
        if harvested[c.receiver] > scale[pos] * (1 + _FEASIBLE_SLOP):
            continue
        lambdas[c.receiver] = float(mu[pos] / (_LOG2 * scale[pos]))
    return CapacitySolution(
        dist=DiscreteDistribution.from_arrays(problem.grid, p),
        rate=float(p @ info),
        lambda0=float(mu[0] / (_LOG2 * scale[0])),
        lambdas=lambdas,
        harvested=harvested,
        status=status,
        report=report,
        iterations=iterations,
        gap=gap,
    )


def solve(problem: CapacityProblem, options: SolverOptions = SolverOptions()) -> CapacitySolution:
    """
    Maximize the mutual information over the problem grid under all constraints.

    The fixed point alternates between the output distribution induced by the
    current input and a constrained re-weighting of the input by its information
    density. Each re-weighting is solved exactly, so every iterate is feasible and
    carries its own Lagrange multipliers. Iteration stops once the gap between the
    capacity upper bound ``max_i (i_i - c_i)`` and the achieved rate is below
    `options.gap_tol` and the optimality conditions hold.

    Parameters
    ----------
    problem : CapacityProblem
        The problem to solve.
    options : SolverOptions, optional
        Tolerances and budgets.

    Returns
    -------
    CapacitySolution
        Status is `SolveStatus.OPTIMAL` if the returned solution passed
        `verify_optimality`, otherwise `SolveStatus.MAX_ITERATIONS` with the last iterate.

    Raises
    ------
    InfeasibleDemandError
        If a harvesting demand exceeds what any distribution on the grid can deliver.
    """
    demands = _effective_demands(problem)
    rows, scale, active = _constraint_rows(problem, demands)
    kernel = problem.channel.discretize(problem.grid, peak=problem.peak, nodes=options.quad_nodes)

    mu = np.zeros(rows.shape[0])
    mu, log_p = _tilt(_initial_log_probs(problem, options), rows, mu)

    gap = math.inf
    last_check = -options.check_every
    iteration = 0
    for iteration in range(1, options.max_iterations + 1):
        log_q = kernel.log_output(log_p)
        info = kernel.info_density(log_p, log_q)
        p = np.exp(log_p)
        rate = float(p @ info)
        cost = (mu @ rows) / _LOG2
        gap = float(np.max(info - cost)) - rate

        if gap <= options.gap_tol and iteration - last_check >= options.check_every:
            last_check = iteration
            candidate, report = _certify(problem, kernel, rows, scale, active, mu, log_p, iteration, gap, options)
            logger.debug("iteration %d: rate %.9g bits, gap %.3g, verified %s", iteration, rate, gap, report.passed)
            if report.passed:
                logger.info("Solved in %d iterations: %.9g bits (gap %.3g)", iteration, candidate.rate, gap)
                return candidate.model_copy(update={"report": report})

        mu, log_p = _tilt(log_p + _LOG2 * info, rows, mu)

    solution, report = _certify(problem, kernel, rows, scale, active, mu, log_p, iteration, gap, options)
    if report.passed:
        logger.warning("Iteration budget spent with gap %.3g bits; optimality conditions hold", gap)
        return solution.model_copy(update={"report": report})
    logger.warning(
        "No optimal distribution after %d iterations (gap %.3g bits, min s %.3g)", iteration, gap, report.min_s
    )
    return solution.model_copy(update={"report": report, "status": SolveStatus.MAX_ITERATIONS})


def _certify(
    problem: CapacityProblem,
    kernel: DiscreteKernel,
    rows: FloatArray,
    scale: FloatArray,
    active: list[int],
    mu: FloatArray,
    log_p: FloatArray,
    iteration: int,
    gap: float,
    options: SolverOptions,
) -> tuple[CapacitySolution, OptimalityReport]:
    candidate = _solution_from(problem, kernel, log_p, mu, scale, active, SolveStatus.OPTIMAL, iteration, gap, None)
    report = verify_optimality(candidate, problem, options)
    if report.passed or report.min_s < -report.tolerance:
        return candidate, report

    # Only the mass-point condition failed: residual mass sits where the slack is clearly positive.
    slack = (mu @ rows) / _LOG2 + candidate.rate - kernel.info_density(log_p)
    keep = slack <= 0.5 * report.tolerance
    if np.all(keep) or not np.any(keep):
        return candidate, report
    mu_kept, log_p_kept = _tilt(np.where(keep, log_p, -np.inf), rows, mu)
    if np.max(rows @ np.exp(log_p_kept)) > _FEASIBLE_SLOP:
        return candidate, report
    pruned = _solution_from(
        problem, kernel, log_p_kept, mu_kept, scale, active, SolveStatus.OPTIMAL, iteration, gap, None
    )
    pruned_report = verify_optimality(pruned, problem, options)
    if not pruned_report.passed:
        return candidate, report
    logger.debug("Dropped %d grid points carrying stray mass", int(np.count_nonzero(~keep)))
    return pruned, pruned_report


def _constraint_part(
    solution: CapacitySolution, problem: CapacityProblem, points: FloatArray, rate: float
) -> FloatArray:
    # Everything in s(x) except the information density.
    s = solution.lambda0 * (points**2 - problem.ap_budget) + rate
    if problem.eh_constraints:
        harvest = problem.harvest_at(points)
        for c, row in zip(problem.eh_constraints, harvest):
            s -= solution.lambdas.get(c.receiver, 0.0) * (row - c.required)
    return s


def verify_optimality(
    solution: CapacitySolution, problem: CapacityProblem, options: SolverOptions = SolverOptions()
) -> OptimalityReport:
    """
    Check the necessary and sufficient optimality conditions of a solution.

    The slack function
    ``s(x) = lambda0 (x^2 - sigma^2) - sum_l lambda_l (P_l(x) - P_l,req) + C - i(x; F)``
    must be non-negative on the whole admissible interval and vanish at every
    mass point. It is sampled on a grid `options.verify_refinement` times finer
    than the problem grid and at the mass points themselves.

    Parameters
    ----------
    solution : CapacitySolution
        Distribution and multipliers to check.
    problem : CapacityProblem
        The problem the solution claims to solve.
    options : SolverOptions, optional
        Supplies `verify_refinement`, `mass_floor`, `quad_nodes` and `kkt_tol`.

    Returns
    -------
    OptimalityReport
    """
    dist = solution.dist
    src = problem.channel.discretize(dist.x, peak=problem.peak, nodes=options.quad_nodes)
    with np.errstate(divide="ignore"):
        log_p = np.log(dist.p)
    log_q = src.log_output(log_p)
    rate = float(dist.p @ src.info_density(log_p, log_q))

    count = options.verify_refinement * (problem.grid.size - 1) + 1
    fine = np.linspace(problem.grid[0], problem.grid[-1], count)
    mass = dist.mass_points(options.mass_floor)

    def slack(points: FloatArray) -> FloatArray:
        if points.size == 0:
            return np.zeros(0)
        dst = problem.channel.discretize(points, peak=problem.peak, nodes=options.quad_nodes)
        return _constraint_part(solution, problem, points, rate) - dst.info_density(np.zeros(1), log_q)

    s_fine = slack(fine)
    s_mass = slack(mass)
    tol = options.tolerance_for(rate)
    min_s = float(min(np.min(s_fine), np.min(s_mass) if s_mass.size else np.inf))
    max_abs = float(np.max(np.abs(s_mass))) if s_mass.size else 0.0
    return OptimalityReport(
        grid=tuple(fine.tolist()),
        s_values=tuple(s_fine.tolist()),
        min_s=min_s,
        max_abs_s_at_mass=max_abs,
        tolerance=tol,
        passed=bool(min_s >= -tol and max_abs <= tol),
    )


def recover_multipliers(
    dist: DiscreteDistribution, problem: CapacityProblem, options: SolverOptions = SolverOptions()
) -> tuple[float, dict[int, float]]:
    """
    Estimate the Lagrange multipliers of a distribution from the optimality conditions.

    The slack function must vanish at every mass point. Restricted to the
    constraints that are tight under `dist`, this is a linear system in the
    multipliers, solved by non-negative least squares.

    Returns
    -------
    tuple[float, dict[int, float]]
        ``(lambda0, {receiver: lambda_l})`` in bits/W.
    """
    src = problem.channel.discretize(dist.x, peak=problem.peak, nodes=options.quad_nodes)
    with np.errstate(divide="ignore"):
        log_p = np.log(dist.p)
    log_q = src.log_output(log_p)
    info_all = src.info_density(log_p, log_q)
    rate = float(dist.p @ info_all)

    keep = dist.p > options.mass_floor
    x = dist.x[keep]
    info = info_all[keep]

    columns: list[FloatArray] = []
    scales: list[float] = []
    owners: list[int | None] = []
    if dist.mean_square() >= problem.ap_budget * (1 - _TIGHT):
        columns.append(x**2 / problem.ap_budget - 1.0)
        scales.append(problem.ap_budget)
        owners.append(None)
    harvest = problem.harvest_at(x)
    for c, row, full in zip(problem.eh_constraints, harvest, problem.harvest_at(dist.x)):
        if c.required > 0 and dist.expect(full) <= c.required * (1 + _TIGHT):
            columns.append(1.0 - row / c.required)
            scales.append(c.required)
            owners.append(c.receiver)

    lambda0 = 0.0
    lambdas = {c.receiver: 0.0 for c in problem.eh_constraints}
    if columns:
        coef, _ = nnls(np.array(columns).T, info - rate)
        for value, sc, owner in zip(coef, scales, owners):
            if owner is None:
                lambda0 = float(value / sc)
            else:
                lambdas[owner] = float(value / sc)
    return lambda0, lambdas


def smith_capacity(
    channel: BaseChannel,
    peak: float,
    sigma2: float,
    harvesters: Sequence[tuple[int, PowerFunction]] = (),
    options: SolverOptions = SolverOptions(),
) -> CapacitySolution:
    """
    Capacity under average and peak power constraints only.

    Parameters
    ----------
    channel : BaseChannel
        The information channel.
    peak : float
        Peak amplitude A (V).
    sigma2 : float
        Average power budget (W).
    harvesters : Sequence[tuple[int, PowerFunction]], optional
        ``(receiver, P_l)`` pairs whose average harvested power under the
        capacity-achieving distribution, P_l,min, is reported in `harvested`.
    options : SolverOptions, optional
        Solver settings.

    Returns
    -------
    CapacitySolution
    """
    constraints = tuple(EhConstraint(rid, power, 0.0) for rid, power in harvesters)
    return solve(CapacityProblem.on_uniform_grid(channel, peak, sigma2, constraints, options), options)


def mass_point_clustering(
    dist: DiscreteDistribution, merge_radius: float, mass_floor: float = 1e-7
) -> tuple[DiscreteDistribution, int]:
    """
    Merge runs of neighbouring mass points into single points.

    Points carrying at most `mass_floor` are dropped. Consecutive remaining points
    closer than `merge_radius` form one cluster, replaced by its probability-weighted
    centroid carrying the cluster's total mass. `merge_radius` should be at least the grid step.

    Returns
    -------
    tuple[DiscreteDistribution, int]
        The clustered distribution and its number of mass points.
    """
    keep = dist.p > mass_floor
    x, p = dist.x[keep], dist.p[keep]
    if x.size == 0:
        return dist, 0
    breaks = np.flatnonzero(np.diff(x) > merge_radius) + 1
    starts = np.concatenate([[0], breaks])
    mass = np.add.reduceat(p, starts)
    centroid = np.add.reduceat(p * x, starts) / mass
    clustered = DiscreteDistribution.from_arrays(centroid, mass, normalize=True)
    return clustered, len(clustered)


def ask_constellation_rate(
    channel: BaseChannel,
    m: int,
    peak: float,
    sigma2: float,
    eh_constraints: Sequence[EhConstraint] = (),
    options: SolverOptions = SolverOptions(),
) -> CapacitySolution:
    """
    Best rate of an M-point equispaced constellation with optimized probabilities.

    Real signalling uses ``x_k = 2 A k / (M - 1) - A``; amplitude signalling uses
    ``r_k = A k / (M - 1)``. Optimality is checked on the constellation itself.
    """
    if m < 2:
        raise ValueError(f"an ASK constellation needs at least two points, got {m}")
    grid = channel.support_grid(peak, m)
    problem = CapacityProblem(grid, channel, sigma2, tuple(eh_constraints), peak)
    return solve(problem, options.model_copy(update={"verify_refinement": 1}))
