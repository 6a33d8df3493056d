from __future__ import annotations

import math
from typing import TYPE_CHECKING, Annotated, ClassVar

import numpy as np
from pydantic import Field
from pydantic.dataclasses import dataclass

from swiptcap._channels._base import DEFAULT_NODES, TAIL_SIGMAS, BaseChannel
from swiptcap._enums import Signalling
from swiptcap._numerics import log_bessel_i0

if TYPE_CHECKING:
    from swiptcap._models import DiscreteDistribution
    from swiptcap._types import ArrayLike, FloatArray


@dataclass(frozen=True)
class AmplitudeChannel(BaseChannel):
    """
    Complex AWGN channel reduced to its amplitude.

    The transmit phase is uniform and independent of the amplitude, so the output
    phase carries no information beyond what the output amplitude R tells. The
    transition density of R given the input amplitude r is Rician, and every
    information quantity is expressed through it. The deterministic channel phase
    drops out and only ``|h_I|`` is kept.
    """

    signalling: ClassVar[Signalling] = Signalling.COMPLEX

    h_i_mag: Annotated[float, Field(gt=0, allow_inf_nan=False)]
    """Magnitude of the complex channel gain."""

    sigma_n2: Annotated[float, Field(gt=0, allow_inf_nan=False)]
    """Noise power per real dimension (W); the complex noise has variance 2 * sigma_n2."""

    @property
    def gain(self) -> float:
        return self.h_i_mag

    @property
    def noise_power(self) -> float:
        return self.sigma_n2

    @property
    def offset_bits(self) -> float:
        return math.log2(math.e * self.sigma_n2)

    def _log_rician(self, r: FloatArray, big_r: FloatArray) -> FloatArray:
        # ln K(r, R); I0 enters through its logarithm so large R*r never overflows.
        r = self.h_i_mag * r
        with np.errstate(divide="ignore"):
            log_r = np.log(big_r)
        return (
            log_r
            - math.log(self.sigma_n2)
            - (big_r * big_r + r * r) / (2.0 * self.sigma_n2)
            + log_bessel_i0(big_r * r / self.sigma_n2)
        )

    def log_kernel(self, x: FloatArray, y: FloatArray) -> FloatArray:
        return self._log_rician(np.asarray(x, dtype=np.float64)[:, None], np.asarray(y, dtype=np.float64)[None, :])

    def log_reference(self, y: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(y, dtype=np.float64))

    def output_interval(self, peak: float) -> tuple[float, float]:
        return 0.0, peak * self.gain + TAIL_SIGMAS * math.sqrt(self.sigma_n2)

    def support_grid(self, peak: float, count: int) -> FloatArray:
        return np.linspace(0.0, peak, count)

    def gaussian_capacity(self, sigma2: float) -> float:
        """log2(1 + sigma2 |h|^2 / (2 sigma_n2))."""
        return math.log2(1.0 + sigma2 * self.h_i_mag**2 / (2.0 * self.sigma_n2))

    def rician_kernel(self, r: ArrayLike, big_r: ArrayLike) -> FloatArray | float:
        """
        Rician transition density K(r, R) of the output amplitude `big_r` given input amplitude `r`.

        Broadcasts `r` against `big_r`.
        """
        rr, bb = np.broadcast_arrays(np.asarray(r, dtype=np.float64), np.asarray(big_r, dtype=np.float64))
        out = np.exp(self._log_rician(rr, bb))
        return float(out) if out.ndim == 0 else out

    def amplitude_output_pdf(self, dist: DiscreteDistribution, big_r: ArrayLike) -> FloatArray | float:
        """Density f_R(R; F) of the output amplitude."""
        return self.output_pdf(dist, big_r)

    def complex_mutual_information(self, dist: DiscreteDistribution, *, nodes: int = DEFAULT_NODES) -> float:
        """Mutual information of the complex channel for a uniform-phase input with amplitude law `dist` (bits)."""
        return self.mutual_information(dist, nodes=nodes)

    def complex_marginal_info_density(
        self, dist: DiscreteDistribution, r: ArrayLike, *, nodes: int = DEFAULT_NODES
    ) -> FloatArray | float:
        """Marginal information density i(r; F) of the complex channel (bits)."""
        return self.marginal_info_density(dist, r, nodes=nodes)
