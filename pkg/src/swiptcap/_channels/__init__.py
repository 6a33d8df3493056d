from __future__ import annotations

from swiptcap._channels._amplitude import AmplitudeChannel
from swiptcap._channels._base import BaseChannel, DiscreteKernel
from swiptcap._channels._real import RealAwgnChannel

__all__ = ["AmplitudeChannel", "BaseChannel", "DiscreteKernel", "RealAwgnChannel"]
