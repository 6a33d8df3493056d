from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar, Protocol

import numpy as np
from scipy.special import logsumexp

from swiptcap._models import QuadratureSpec
from swiptcap._numerics import gauss_legendre_nodes

if TYPE_CHECKING:
    from swiptcap._enums import Signalling
    from swiptcap._models import DiscreteDistribution
    from swiptcap._types import ArrayLike, FloatArray

_LOG2 = math.log(2.0)
# Output range reaches this many noise standard deviations past the largest mean.
TAIL_SIGMAS = 10.0
DEFAULT_NODES = 2048


@dataclass(frozen=True)
class DiscreteKernel:
    """
    A channel restricted to a finite input grid and a fixed set of output quadrature nodes.

    ``weighted[i, m]`` is the quadrature weight of node m times the transition density
    from grid point i to node m. ``scaled`` holds the same densities divided by the
    column maximum, whose logarithm is ``col_log_max``; mixtures are formed from it so
    that tiny densities never underflow.
    """

    grid: FloatArray
    nodes: FloatArray
    weighted: FloatArray
    scaled: FloatArray
    col_log_max: FloatArray
    log_reference: FloatArray
    offset_bits: float

    def log_output(self, log_p: FloatArray) -> FloatArray:
        """Natural log of the output density at every node for input log-probabilities `log_p`."""
        top = float(np.max(log_p))
        mix = np.exp(log_p - top) @ self.scaled
        return self.col_log_max + top + np.log(np.maximum(mix, 1e-300))

    def info_density(self, log_p: FloatArray, log_output: FloatArray | None = None) -> FloatArray:
        """Marginal information density (bits) at every grid point."""
        if log_output is None:
            log_output = self.log_output(log_p)
        return -(self.weighted @ (log_output - self.log_reference)) / _LOG2 - self.offset_bits


class BaseChannel(Protocol):
    """
    A base protocol for memoryless channels with a one-dimensional input.
    Implementations supply the transition kernel; quadrature, mixture densities,
    information densities and mutual information are shared.
    """

    signalling: ClassVar[Signalling]

    @property
    def gain(self) -> float:
        """Magnitude of the channel amplitude gain."""
        ...

    @property
    def noise_power(self) -> float:
        """Noise power per real dimension (W)."""
        ...

    @property
    def offset_bits(self) -> float:
        """Entropy term of the noise that closes the information density (bits)."""
        ...

    def log_kernel(self, x: FloatArray, y: FloatArray) -> FloatArray:
        """Natural log of the transition density, shape ``(len(x), len(y))``."""
        ...

    def log_reference(self, y: FloatArray) -> FloatArray:
        """Natural log of the reference measure the output density is compared against."""
        ...

    def output_interval(self, peak: float) -> tuple[float, float]:
        """Output range holding all but a negligible tail for inputs bounded by `peak`."""
        ...

    def support_grid(self, peak: float, count: int) -> FloatArray:
        """Uniform admissible input grid with `count` points for peak amplitude `peak`."""
        ...

    def gaussian_capacity(self, sigma2: float) -> float:
        """Capacity without a peak constraint at average power `sigma2` (bits)."""
        ...

    def quadrature(self, peak: float, nodes: int = DEFAULT_NODES) -> tuple[FloatArray, FloatArray]:
        lower, upper = self.output_interval(peak)
        return gauss_legendre_nodes(QuadratureSpec(node_count=nodes, lower=lower, upper=upper))

    def discretize(self, grid: ArrayLike, *, peak: float | None = None, nodes: int = DEFAULT_NODES) -> DiscreteKernel:
        """
        Tabulate the channel on an input grid.

        Parameters
        ----------
        grid : array_like
            Input points.
        peak : float, optional
            Largest input magnitude the output range must cover. Defaults to ``max(|grid|)``.
        nodes : int, optional
            Number of output quadrature nodes.

        Returns
        -------
        DiscreteKernel
        """
        x = np.asarray(grid, dtype=np.float64)
        if peak is None:
            peak = float(np.max(np.abs(x)))
        y, w = self.quadrature(peak, nodes)
        log_k = self.log_kernel(x, y)
        col_max = np.max(log_k, axis=0)
        kernel = np.exp(log_k)
        return DiscreteKernel(
            grid=x,
            nodes=y,
            weighted=kernel * w[None, :],
            scaled=np.exp(log_k - col_max[None, :]),
            col_log_max=col_max,
            log_reference=self.log_reference(y),
            offset_bits=self.offset_bits,
        )

    def output_pdf(self, dist: DiscreteDistribution, y: ArrayLike) -> FloatArray | float:
        """Density of the channel output under input distribution `dist`."""
        yy = np.asarray(y, dtype=np.float64)
        with np.errstate(divide="ignore"):
            log_p = np.log(dist.p)
        dens = np.exp(logsumexp(log_p[:, None] + self.log_kernel(dist.x, np.atleast_1d(yy)), axis=0))
        return float(dens[0]) if yy.ndim == 0 else dens

    def marginal_info_density(
        self, dist: DiscreteDistribution, x: ArrayLike, *, nodes: int = DEFAULT_NODES
    ) -> FloatArray | float:
        """
        Marginal information density i(x; F) in bits.

        Parameters
        ----------
        dist : DiscreteDistribution
            Input distribution F.
        x : float or array_like
            Points to evaluate at.
        nodes : int, optional
            Output quadrature nodes.

        Returns
        -------
        float or ndarray
            i(x; F), one value per point.
        """
        xx = np.asarray(x, dtype=np.float64)
        peak = max(float(np.max(np.abs(dist.x))), float(np.max(np.abs(xx))))
        src = self.discretize(dist.x, peak=peak, nodes=nodes)
        dst = self.discretize(np.atleast_1d(xx), peak=peak, nodes=nodes)
        with np.errstate(divide="ignore"):
            log_output = src.log_output(np.log(dist.p))
        out = dst.info_density(np.zeros(1), log_output)
        return float(out[0]) if xx.ndim == 0 else out

    def mutual_information(self, dist: DiscreteDistribution, *, nodes: int = DEFAULT_NODES) -> float:
        """Mutual information I(F) = sum_i p_i i(x_i; F) in bits."""
        kernel = self.discretize(dist.x, nodes=nodes)
        with np.errstate(divide="ignore"):
            info = kernel.info_density(np.log(dist.p))
        return float(dist.p @ info)
