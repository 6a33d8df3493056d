from __future__ import annotations

import math
from typing import Callable

import mpmath
import numpy as np
import pytest

from swiptcap import (
    ConvergenceError,
    DomainError,
    NumericalError,
    QuadratureSpec,
    RootSolveSpec,
    erf,
    gauss_legendre_nodes,
    integrate,
    lambert_w0,
    lambert_w0_from_log,
    log_bessel_i0,
)
from swiptcap._numerics import newton_root
from swiptcap._types import FloatArray

mpmath.mp.dps = 40


@pytest.mark.parametrize("beta", [0.0, 1e-8, 1e-3, 0.1, 0.49, 0.5, 0.51, 1.0, 7.5, 42.98, 700.0, 1e4, 1e6])
def test_log_bessel_i0(beta: float) -> None:
    expected = float(mpmath.log(mpmath.besseli(0, beta)))
    assert log_bessel_i0(beta) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_log_bessel_i0_vectorized() -> None:
    beta = np.array([0.0, 0.25, 3.0, 1e5])
    out = log_bessel_i0(beta)
    assert isinstance(out, np.ndarray)
    assert out.shape == beta.shape
    assert out[0] == 0.0
    assert np.all(np.isfinite(out))


@pytest.mark.parametrize("beta", [-1.0, math.inf, math.nan])
def test_log_bessel_i0_domain(beta: float) -> None:
    with pytest.raises(DomainError):
        log_bessel_i0(beta)


@pytest.mark.parametrize("y", [0.0, 1e-12, 0.5, 1.0, math.e, 10.0, 1e5, 1e100, 1e300])
def test_lambert_w0(y: float) -> None:
    expected = float(mpmath.lambertw(y))
    assert lambert_w0(y) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_lambert_w0_domain() -> None:
    with pytest.raises(DomainError):
        lambert_w0(-0.1)
    with pytest.raises(DomainError):
        lambert_w0(math.inf)


@pytest.mark.parametrize("log_y", [-30.0, 0.0, 10.0, 499.0, 501.0, 2000.0, 1e5])
def test_lambert_w0_from_log(log_y: float) -> None:
    expected = float(mpmath.lambertw(mpmath.exp(log_y)))
    assert lambert_w0_from_log(log_y) == pytest.approx(expected, rel=1e-12)


def test_erf() -> None:
    assert erf(0.0) == 0.0
    assert erf(1.0) == pytest.approx(float(mpmath.erf(1)), rel=1e-14)
    np.testing.assert_allclose(erf(np.array([-2.0, 2.0])), [-float(mpmath.erf(2)), float(mpmath.erf(2))])


def test_newton_root() -> None:
    root = newton_root(lambda x: x * x - 2.0, lambda x: 2.0 * x, RootSolveSpec(initial_guess=1.0))
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_newton_root_bracket_fallback() -> None:
    # Newton on atan diverges from 2.0; the bracket rescues it.
    spec = RootSolveSpec(initial_guess=2.0, max_iterations=50)
    root = newton_root(math.atan, lambda x: 1.0 / (1.0 + x * x), spec, bracket=(-5.0, 3.0))
    assert root == pytest.approx(0.0, abs=1e-12)


def test_newton_root_without_bracket_fails() -> None:
    spec = RootSolveSpec(initial_guess=1.0, max_iterations=20)
    with pytest.raises(ConvergenceError) as info:
        newton_root(lambda x: x * x + 1.0, lambda x: 2.0 * x, spec)
    assert info.value.bracket is None


def test_newton_root_bad_bracket() -> None:
    spec = RootSolveSpec(initial_guess=1.0, max_iterations=20)
    with pytest.raises(ConvergenceError) as info:
        newton_root(lambda x: x * x + 1.0, lambda x: 2.0 * x, spec, bracket=(0.0, 1.0))
    assert info.value.bracket == (0.0, 1.0)


def test_gauss_legendre_nodes() -> None:
    spec = QuadratureSpec(node_count=100, lower=-1.0, upper=3.0)
    x, w = gauss_legendre_nodes(spec)
    assert x.size == w.size == 96
    assert np.all((x > -1.0) & (x < 3.0))
    assert w.sum() == pytest.approx(4.0, rel=1e-14)
    assert not x.flags.writeable
    assert not w.flags.writeable
    with pytest.raises(ValueError):
        x[0] = 0.0


@pytest.mark.parametrize(
    "f,lower,upper,expected",
    [
        (np.exp, 0.0, 1.0, math.e - 1.0),
        (lambda x: np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi), -12.0, 12.0, 1.0),
        (lambda x: x**31, -1.0, 1.0, 0.0),
        (np.cos, 0.0, math.pi / 2.0, 1.0),
    ],
)
def test_integrate(f: Callable[[FloatArray], FloatArray], lower: float, upper: float, expected: float) -> None:
    assert integrate(f, QuadratureSpec(lower=lower, upper=upper)) == pytest.approx(expected, abs=1e-13)


def test_integrate_rejects_non_finite() -> None:
    spec = QuadratureSpec(node_count=32, lower=-1.0, upper=1.0)
    with pytest.raises(NumericalError) as info:
        integrate(lambda x: np.where(x > 0.5, np.nan, x), spec)
    assert info.value.location > 0.5


def test_log_bessel_i0_is_monotone() -> None:
    beta = np.concatenate([np.linspace(0.0, 1e4, 1000), np.linspace(0.45, 0.55, 101)])
    beta.sort()
    assert np.all(np.diff(log_bessel_i0(beta)) >= 0)


@pytest.mark.parametrize("a", np.linspace(0.0, 50.0, 26).tolist())
def test_lambert_w0_inverts_w_exp_w(a: float) -> None:
    assert lambert_w0(a * math.exp(a)) == pytest.approx(a, rel=1e-12, abs=1e-15)


def test_lambert_w0_from_log_inverts_on_a_grid() -> None:
    w = np.geomspace(1e-3, 1e4, 60)
    np.testing.assert_allclose(lambert_w0_from_log(w + np.log(w)), w, rtol=1e-10)


def test_lambert_w0_from_log_at_one_hundred() -> None:
    w = lambert_w0_from_log(100.0)
    assert w + math.log(w) == pytest.approx(100.0, rel=1e-14)
    assert w == pytest.approx(95.4415, abs=1e-3)


@pytest.mark.parametrize("beta", np.geomspace(1e-3, 1e4, 20).tolist())
def test_closed_form_argument_in_log_domain(beta: float) -> None:
    a = 1.85708
    expected = float(mpmath.lambertw(a * mpmath.e**a * mpmath.besseli(0, beta)))
    assert lambert_w0_from_log(log_bessel_i0(beta) + math.log(a) + a) == pytest.approx(expected, rel=1e-9)


def test_integrate_is_linear() -> None:
    spec = QuadratureSpec(node_count=64, lower=-2.0, upper=3.0)
    f = np.polynomial.Polynomial([1.0, -2.0, 0.5, 3.0])
    g = np.polynomial.Polynomial([0.0, 4.0, 0.0, -1.0, 0.25])
    alpha, beta = 2.5, -0.75
    combined = integrate(lambda x: alpha * f(x) + beta * g(x), spec)
    separate = alpha * integrate(f, spec) + beta * integrate(g, spec)
    assert combined == pytest.approx(separate, rel=1e-12)
    exact = alpha * (f.integ()(3.0) - f.integ()(-2.0)) + beta * (g.integ()(3.0) - g.integ()(-2.0))
    assert combined == pytest.approx(exact, rel=1e-12)
