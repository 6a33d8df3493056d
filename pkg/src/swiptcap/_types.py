from __future__ import annotations

from pathlib import Path
from typing import Callable, Literal, TypeAlias, Union

import numpy as np
import numpy.typing as npt

StrPath: TypeAlias = Union[str, Path]

FloatArray: TypeAlias = npt.NDArray[np.float64]
"""One dimensional array of float64 values."""

ArrayLike: TypeAlias = Union[float, "npt.ArrayLike"]

PowerFunction: TypeAlias = Callable[[FloatArray], FloatArray]
"""Maps non-negative amplitudes (V) to harvested DC power (W), elementwise."""

PoutModel: TypeAlias = Literal["exact", "approx", "lowpower"]

InitialGuess: TypeAlias = Literal["uniform", "peaks"]

GridSpacing: TypeAlias = Literal["linear", "log"]

TableStyle: TypeAlias = Literal[
    "ascii",
    "ascii2",
    "ascii_double_head",
    "square",
    "square_double_head",
    "minimal",
    "minimal_heavy_head",
    "minimal_double_head",
    "simple",
    "simple_head",
    "simple_heavy",
    "horizontals",
    "rounded",
    "heavy",
    "heavy_edge",
    "heavy_head",
    "double",
    "double_edge",
    "markdown",
]
