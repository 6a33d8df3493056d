from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, overload

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize, special

from swiptcap._exceptions import ConvergenceError, DomainError, NumericalError
from swiptcap._models import QuadratureSpec, RootSolveSpec
from swiptcap._types import ArrayLike, FloatArray

logger = logging.getLogger(__name__)

_PANEL_ORDER = 16
# Below this the power series of ln I0 is used; above it the scaled Bessel function.
_I0_SERIES_CUTOFF = 0.5
# exp() of anything above this is still comfortably representable.
_W_DIRECT_LOG_LIMIT = 500.0


def _as_float_array(x: ArrayLike, *, name: str) -> FloatArray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _log_i0_series(beta: FloatArray) -> FloatArray:
    # ln(1 + sum_{m>=1} t^m/(m!)^2) with t = beta^2/4; eight terms give full precision for beta < 0.5.
    t = 0.25 * beta * beta
    term = np.ones_like(t)
    acc = np.zeros_like(t)
    for m in range(1, 9):
        term = term * t / (m * m)
        acc = acc + term
    return np.log1p(acc)


@overload
def log_bessel_i0(beta: float) -> float: ...
@overload
def log_bessel_i0(beta: FloatArray) -> FloatArray: ...


def log_bessel_i0(beta: ArrayLike) -> float | FloatArray:
    """
    Natural logarithm of the modified Bessel function of the first kind and order zero.

    Parameters
    ----------
    beta : float or array_like
        Non-negative argument.

    Returns
    -------
    float or ndarray
        ln I0(beta). Never overflows, the large-argument branch uses the
        exponentially scaled function `scipy.special.i0e`.

    Raises
    ------
    DomainError
        If any argument is negative or not finite.

    Examples
    --------
    >>> log_bessel_i0(0.0)
    0.0
    """
    b = _as_float_array(beta, name="beta")
    if np.any(b < 0):
        raise DomainError("beta must be non-negative")

    small = b < _I0_SERIES_CUTOFF
    out = np.empty_like(b)
    out[small] = _log_i0_series(b[small])
    big = b[~small]
    out[~small] = np.log(special.i0e(big)) + big
    return float(out) if out.ndim == 0 else out


def lambert_w0(y: float) -> float:
    """
    Principal branch of the Lambert W function on the non-negative real axis.

    Parameters
    ----------
    y : float
        Argument, y >= 0.

    Returns
    -------
    float
        w with w * exp(w) = y.

    Raises
    ------
    DomainError
        If `y` is negative or not finite.
    """
    if not np.isfinite(y):
        raise DomainError("y must be finite")
    if y < 0:
        raise DomainError(f"lambert_w0 is only defined here for y >= 0, got {y!r}")
    return float(special.lambertw(y, 0).real)


@overload
def lambert_w0_from_log(log_y: float) -> float: ...
@overload
def lambert_w0_from_log(log_y: FloatArray) -> FloatArray: ...


def lambert_w0_from_log(log_y: ArrayLike) -> float | FloatArray:
    """
    Principal Lambert W of `exp(log_y)` without forming the exponential.

    For large arguments this solves ``w + ln(w) = log_y`` with Halley's method
    started from ``log_y - ln(log_y)``; elsewhere it defers to `scipy.special.lambertw`.

    Parameters
    ----------
    log_y : float or array_like
        Natural logarithm of the Lambert W argument.

    Returns
    -------
    float or ndarray
        W0(exp(log_y)).

    Raises
    ------
    DomainError
        If any input is not finite.
    """
    ly = _as_float_array(log_y, name="log_y")
    out = np.empty_like(ly)
    direct = ly <= _W_DIRECT_LOG_LIMIT
    out[direct] = special.lambertw(np.exp(ly[direct]), 0).real

    if np.any(~direct):
        big = ly[~direct]
        out[~direct] = optimize.newton(
            lambda w: w + np.log(w) - big,
            big - np.log(big),
            fprime=lambda w: 1.0 + 1.0 / w,
            fprime2=lambda w: -1.0 / (w * w),
            tol=1e-15,
            maxiter=50,
        )
    return float(out) if out.ndim == 0 else out


def erf(x: ArrayLike) -> float | FloatArray:
    """The error function, `scipy.special.erf`."""
    out = special.erf(np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def newton_root(
    f: Callable[[float], float],
    df: Callable[[float], float],
    spec: RootSolveSpec,
    *,
    bracket: tuple[float, float] | None = None,
) -> float:
    """
    Scalar root by Newton's method, guarded by an optional bracket.

    Parameters
    ----------
    f : Callable[[float], float]
        Function whose root is sought.
    df : Callable[[float], float]
        Derivative of `f`.
    spec : RootSolveSpec
        Initial guess, tolerance and iteration budget.
    bracket : tuple[float, float], optional
        Interval with a sign change of `f`. If a Newton iterate leaves it, or
        Newton fails to converge, the root is found by Brent's method inside it.

    Returns
    -------
    float
        The root.

    Raises
    ------
    ConvergenceError
        If the iteration budget is exhausted.
    """
    last = spec.initial_guess
    try:
        sol = optimize.root_scalar(
            f,
            x0=spec.initial_guess,
            fprime=df,
            method="newton",
            xtol=spec.abs_tolerance,
            maxiter=spec.max_iterations,
        )
        last = float(sol.root)
        ok = sol.converged and np.isfinite(last)
    except (RuntimeError, ZeroDivisionError, FloatingPointError):
        ok = False

    if ok and (bracket is None or bracket[0] <= last <= bracket[1]):
        return last

    if bracket is None:
        resid = float(f(last)) if np.isfinite(last) else float("nan")
        raise ConvergenceError(
            f"Newton iteration did not converge within {spec.max_iterations} iterations",
            last_iterate=last,
            residual=resid,
        )

    logger.debug("Newton left bracket %s (last iterate %r); switching to Brent", bracket, last)
    try:
        root = optimize.brentq(f, bracket[0], bracket[1], xtol=spec.abs_tolerance, maxiter=spec.max_iterations)
    except (RuntimeError, ValueError) as err:
        raise ConvergenceError(
            f"Bracketed root search on {bracket} failed: {err}",
            last_iterate=last,
            residual=float(f(last)) if np.isfinite(last) else float("nan"),
            bracket=bracket,
        ) from err
    return float(root)


@lru_cache(maxsize=1)
def _panel_rule() -> tuple[FloatArray, FloatArray]:
    nodes, weights = leggauss(_PANEL_ORDER)
    return nodes, weights


@lru_cache(maxsize=256)
def gauss_legendre_nodes(spec: QuadratureSpec) -> tuple[FloatArray, FloatArray]:
    """
    Nodes and weights of the composite Gauss-Legendre rule described by `spec`.

    The interval is split into ``node_count // 16`` equal panels, each carrying
    a 16-point rule. The returned arrays are read-only.
    """
    panels = spec.node_count // _PANEL_ORDER
    nodes, weights = _panel_rule()
    edges = np.linspace(spec.lower, spec.upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate(f: Callable[[FloatArray], FloatArray], spec: QuadratureSpec) -> float:
    """
    Integrate `f` over ``[spec.lower, spec.upper]`` with a fixed composite Gauss-Legendre rule.

    Parameters
    ----------
    f : Callable[[ndarray], ndarray]
        Integrand, evaluated once on the array of all nodes.
    spec : QuadratureSpec
        Interval and node count.

    Returns
    -------
    float
        The integral.

    Raises
    ------
    NumericalError
        If the integrand is not finite at some node.
    """
    x, w = gauss_legendre_nodes(spec)
    fx = np.broadcast_to(np.asarray(f(x), dtype=np.float64), x.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        where = float(x[np.argmax(bad)])
        raise NumericalError(f"integrand is not finite at x = {where!r}", location=where)
    return float(w @ fx)
