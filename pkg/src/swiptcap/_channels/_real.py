from __future__ import annotations

import math
from typing import Annotated, ClassVar

import numpy as np
from pydantic import Field, field_validator
from pydantic.dataclasses import dataclass

from swiptcap._channels._base import TAIL_SIGMAS, BaseChannel
from swiptcap._enums import Signalling
from swiptcap._types import FloatArray


@dataclass(frozen=True)
class RealAwgnChannel(BaseChannel):
    """
    Real scalar AWGN channel ``y = h_i * x + n`` with ``n ~ N(0, sigma_n2)``.

    Examples
    --------
    ```py
    from swiptcap import DiscreteDistribution, RealAwgnChannel

    channel = RealAwgnChannel(h_i=1.0, sigma_n2=1.0)
    bpsk = DiscreteDistribution(support=(-1.0, 1.0), probs=(0.5, 0.5))
    print(channel.mutual_information(bpsk))
    ```
    """

    signalling: ClassVar[Signalling] = Signalling.REAL

    h_i: float
    """Real channel amplitude gain."""

    sigma_n2: Annotated[float, Field(gt=0, allow_inf_nan=False)]
    """Noise power (W on 1 Ohm)."""

    @field_validator("h_i")
    @classmethod
    def _nonzero_gain(cls, v: float) -> float:
        if v == 0 or not math.isfinite(v):
            raise ValueError("h_i must be finite and non-zero")
        return v

    @property
    def gain(self) -> float:
        return abs(self.h_i)

    @property
    def noise_power(self) -> float:
        return self.sigma_n2

    @property
    def offset_bits(self) -> float:
        return 0.5 * math.log2(2.0 * math.pi * math.e * self.sigma_n2)

    def log_kernel(self, x: FloatArray, y: FloatArray) -> FloatArray:
        diff = np.asarray(y)[None, :] - self.h_i * np.asarray(x)[:, None]
        return -(diff * diff) / (2.0 * self.sigma_n2) - 0.5 * math.log(2.0 * math.pi * self.sigma_n2)

    def log_reference(self, y: FloatArray) -> FloatArray:
        return np.zeros_like(y)

    def output_interval(self, peak: float) -> tuple[float, float]:
        half = peak * self.gain + TAIL_SIGMAS * math.sqrt(self.sigma_n2)
        return -half, half

    def support_grid(self, peak: float, count: int) -> FloatArray:
        return np.linspace(-peak, peak, count)

    def gaussian_capacity(self, sigma2: float) -> float:
        """0.5 * log2(1 + sigma2 h^2 / sigma_n2)."""
        return 0.5 * math.log2(1.0 + sigma2 * self.h_i**2 / self.sigma_n2)
