"""
Brute-force references for the quantities the library computes.

Nothing here calls the channel kernels, the quadrature rules or the solver of the
main modules: each reference recomputes its quantity from the model definition
with different numerical machinery, so agreement between the two is evidence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from itertools import starmap

import numpy as np
from scipy import integrate
from scipy.special import i0e, logsumexp

from swiptcap._channels import AmplitudeChannel, BaseChannel, RealAwgnChannel
from swiptcap._models import DiscreteDistribution, McSpec
from swiptcap._types import ArrayLike, FloatArray

_LOG2 = math.log(2.0)
_MAX_LP_GRID = 1000


def _normalized_means(channel: BaseChannel, x: FloatArray) -> tuple[FloatArray, bool]:
    # Output means in units of the noise standard deviation.
    sigma = math.sqrt(channel.noise_power)
    match channel:
        case RealAwgnChannel():
            return channel.h_i * x / sigma, False
        case AmplitudeChannel():
            return channel.h_i_mag * x / sigma, True
        case _:
            raise TypeError(f"no reference model for {type(channel).__name__}")


def _mc_chunk(
    seed: np.random.SeedSequence, size: int, means: FloatArray, probs: FloatArray, amplitude: bool
) -> tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(seed))
    idx = rng.choice(means.size, size=size, p=probs)
    m = means[idx]
    with np.errstate(divide="ignore"):
        log_p = np.log(probs)
    if amplitude:
        # Uniform phase: rotate the mean, add circular noise, compare against the phase-averaged mixture.
        theta = rng.uniform(0.0, 2.0 * math.pi, size)
        yr = m * np.cos(theta) + rng.standard_normal(size)
        yi = m * np.sin(theta) + rng.standard_normal(size)
        mag = np.hypot(yr, yi)
        own = -((yr - m * np.cos(theta)) ** 2 + (yi - m * np.sin(theta)) ** 2) / 2.0
        arg = mag[:, None] * means[None, :]
        comp = -(mag[:, None] ** 2 + means[None, :] ** 2) / 2.0 + np.log(i0e(arg)) + arg
    else:
        y = m + rng.standard_normal(size)
        own = -((y - m) ** 2) / 2.0
        comp = -((y[:, None] - means[None, :]) ** 2) / 2.0
    sample = (own - logsumexp(comp + log_p[None, :], axis=1)) / _LOG2
    return float(sample.sum()), float((sample * sample).sum())


def mc_mutual_information(
    channel: BaseChannel, dist: DiscreteDistribution, spec: McSpec = McSpec()
) -> tuple[float, float]:
    """
    Monte-Carlo estimate of the mutual information.

    Samples are drawn in chunks of `spec.chunk_size`, each from its own Philox
    stream spawned from `spec.seed`, and summed in chunk order, so the result is
    bit-identical for a given seed whatever the number of workers.

    Parameters
    ----------
    channel : BaseChannel
        A `RealAwgnChannel` or an `AmplitudeChannel`. Amplitude inputs are sent
        with a uniform random phase over the complex channel.
    dist : DiscreteDistribution
        Input distribution.
    spec : McSpec, optional
        Sample count, seed, chunk size and workers.

    Returns
    -------
    tuple[float, float]
        The estimate and its standard error (bits).
    """
    means, amplitude = _normalized_means(channel, dist.x)
    probs = dist.p / dist.p.sum()
    chunks = -(-spec.sample_count // spec.chunk_size)
    sizes = [spec.chunk_size] * (chunks - 1) + [spec.sample_count - spec.chunk_size * (chunks - 1)]
    seeds = np.random.SeedSequence(spec.seed).spawn(chunks)
    jobs = [(s, n, means, probs, amplitude) for s, n in zip(seeds, sizes)]

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            parts = list(pool.map(lambda job: _mc_chunk(*job), jobs))
    else:
        parts = list(starmap(_mc_chunk, jobs))

    total = math.fsum(p[0] for p in parts)
    total_sq = math.fsum(p[1] for p in parts)
    n = spec.sample_count
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def quad_mutual_information(channel: BaseChannel, dist: DiscreteDistribution) -> float:
    """
    Mutual information by adaptive quadrature of the output entropy.

    Uses ``I = h(Y) - h(N)`` with the output density written out in closed form.
    """
    means, amplitude = _normalized_means(channel, dist.x)
    with np.errstate(divide="ignore"):
        log_p = np.log(dist.p)

    if amplitude:

        def integrand(v: float) -> float:
            if v <= 0:
                return 0.0
            arg = v * means
            log_f = float(logsumexp(log_p + math.log(v) - (v * v + means * means) / 2.0 + np.log(i0e(arg)) + arg))
            return -math.exp(log_f) * (log_f - math.log(v)) / _LOG2

        top = float(np.max(means)) + 12.0
        breaks = sorted({float(m) for m in means if 0 < m < top})[:50]
        value, _ = integrate.quad(integrand, 0.0, top, points=breaks or None, epsabs=1e-13, epsrel=1e-12, limit=1000)
        return value - math.log2(math.e)

    def integrand(u: float) -> float:
        log_q = float(logsumexp(log_p - (u - means) ** 2 / 2.0)) - 0.5 * math.log(2.0 * math.pi)
        return -math.exp(log_q) * log_q / _LOG2

    lo, hi = float(np.min(means)) - 12.0, float(np.max(means)) + 12.0
    breaks = sorted({float(m) for m in means})[:50]
    value, _ = integrate.quad(integrand, lo, hi, points=breaks, epsabs=1e-13, epsrel=1e-12, limit=1000)
    return value - 0.5 * math.log2(2.0 * math.pi * math.e)


def lp_max_harvest(grid: ArrayLike, power: ArrayLike, sigma2: float) -> tuple[DiscreteDistribution, float]:
    """
    Largest average harvested power over distributions on a grid.

    Maximizes ``sum p_i P_i`` subject to ``sum p_i = 1``, ``sum p_i x_i^2 <= sigma2``
    and ``p >= 0`` by enumerating the basic solutions: single points inside the
    power budget and pairs straddling it with the budget met exactly. With the
    probability sum and a tight budget as the only equality rows, no basic
    solution has more than two support points, so this covers every vertex.

    Parameters
    ----------
    grid : array_like
        Support points, at most 1000.
    power : array_like
        Harvested power at each point (W).
    sigma2 : float
        Average power budget (W).

    Returns
    -------
    tuple[DiscreteDistribution, float]
        An optimal distribution on at most two points and the optimal value.
    """
    x = np.asarray(grid, dtype=np.float64)
    pw = np.asarray(power, dtype=np.float64)
    if x.shape != pw.shape or x.ndim != 1:
        raise ValueError("grid and power must be aligned one dimensional arrays")
    if x.size > _MAX_LP_GRID:
        raise ValueError(f"vertex enumeration is limited to {_MAX_LP_GRID} points, got {x.size}")

    x2 = x * x
    inside = x2 <= sigma2
    if not np.any(inside):
        raise ValueError("no grid point satisfies the power budget")

    best_single = int(np.flatnonzero(inside)[np.argmax(pw[inside])])
    best_value = float(pw[best_single])
    best_pair: tuple[int, int, float] | None = None

    lo_idx = np.flatnonzero(x2 < sigma2)
    hi_idx = np.flatnonzero(x2 > sigma2)
    if lo_idx.size and hi_idx.size:
        t = (sigma2 - x2[lo_idx][:, None]) / (x2[hi_idx][None, :] - x2[lo_idx][:, None])
        value = (1.0 - t) * pw[lo_idx][:, None] + t * pw[hi_idx][None, :]
        i, j = np.unravel_index(int(np.argmax(value)), value.shape)
        if value[i, j] > best_value:
            best_value = float(value[i, j])
            best_pair = (int(lo_idx[i]), int(hi_idx[j]), float(t[i, j]))

    if best_pair is None:
        return DiscreteDistribution.point_mass(float(x[best_single])), best_value
    a, b, t = best_pair
    support, probs = (x[a], x[b]), (1.0 - t, t)
    if support[0] > support[1]:
        support, probs = support[::-1], probs[::-1]
    return DiscreteDistribution.from_arrays(support, probs), best_value


def finite_difference_gradient(
    channel: BaseChannel, dist: DiscreteDistribution, index: int, step: float = 1e-5, ref: int = 0
) -> float:
    """
    Directional derivative of the mutual information when mass moves from `ref` to `index`.

    Central difference of `quad_mutual_information` along ``e_index - e_ref``.
    At an interior point it equals ``i(x_index; F) - i(x_ref; F)``.

    Parameters
    ----------
    channel : BaseChannel
        The channel.
    dist : DiscreteDistribution
        Base distribution; both points must carry at least `step` mass.
    index, ref : int
        Support indices.
    step : float, optional
        Mass moved, in [1e-8, 1e-4].

    Returns
    -------
    float
        Bits per unit probability.
    """
    if not 1e-8 <= step <= 1e-4:
        raise ValueError(f"step must lie in [1e-8, 1e-4], got {step!r}")
    if index == ref:
        return 0.0
    p = dist.p
    if min(p[index], p[ref]) < step:
        raise ValueError("both points must carry at least `step` probability")

    def shifted(delta: float) -> DiscreteDistribution:
        q = p.copy()
        q[index] += delta
        q[ref] -= delta
        return DiscreteDistribution.from_arrays(dist.x, q)

    up = quad_mutual_information(channel, shifted(step))
    down = quad_mutual_information(channel, shifted(-step))
    return (up - down) / (2.0 * step)
