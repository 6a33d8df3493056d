from __future__ import annotations

import hashlib
import math
from pathlib import Path

import numpy as np

from swiptcap._types import ArrayLike, FloatArray, StrPath


def realpath(path: StrPath) -> Path:
    """
    Get the real path of a given file or directory.

    Parameters
    ----------
    path : str or Path
        A string representing a path or a Path object.

    Returns
    -------
    Path
        The path after expanding the user's home directory and resolving any symbolic links.
    """
    return path.expanduser().resolve() if isinstance(path, Path) else Path(path).expanduser().resolve()


def dbm_to_watt(dbm: ArrayLike) -> float | FloatArray:
    """
    Convert a power level from dBm to watts.

    Parameters
    ----------
    dbm : float or array_like
        Power in dBm.

    Returns
    -------
    float or ndarray
        ``10 ** ((dbm - 30) / 10)`` W.

    Examples
    --------
    >>> dbm_to_watt(0.0)
    0.001
    """
    out = np.power(10.0, (np.asarray(dbm, dtype=np.float64) - 30.0) / 10.0)
    return float(out) if out.ndim == 0 else out


def watt_to_dbm(watt: ArrayLike) -> float | FloatArray:
    """Convert a positive power level from watts to dBm."""
    w = np.asarray(watt, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(w) + 30.0
    return float(out) if out.ndim == 0 else out


def sha256sum(file: StrPath) -> str:
    """Hex SHA-256 digest of a file's bytes."""
    return hashlib.sha256(realpath(file).read_bytes()).hexdigest()


def fmt(value: float) -> str:
    """Format a float with 9 significant digits, the precision of every CSV column."""
    if math.isnan(value):
        return "nan"
    return f"{value:.9g}"
