from __future__ import annotations

import pytest

from swiptcap import (
    ConvergenceError,
    DomainError,
    InfeasibleDemandError,
    NumericalError,
    ParameterError,
    SaturatedRegimeError,
    SwiptError,
)


@pytest.mark.parametrize(
    "error",
    [
        DomainError("x"),
        ParameterError("x", bound=1.0),
        ConvergenceError("x", last_iterate=0.0, residual=1.0),
        NumericalError("x", location=0.0),
        InfeasibleDemandError(1, p_max=1.0, p_req=2.0),
        SaturatedRegimeError("x"),
    ],
    ids=lambda e: type(e).__name__,
)
def test_every_error_is_a_swipt_error(error: Exception) -> None:
    assert isinstance(error, SwiptError)


def test_value_errors() -> None:
    assert isinstance(DomainError("x"), ValueError)
    assert isinstance(ParameterError("x", bound=0.1), ValueError)
    assert isinstance(ConvergenceError("x", last_iterate=0.0, residual=0.0), ArithmeticError)


def test_error_payloads() -> None:
    err = InfeasibleDemandError(3, p_max=2.5e-5, p_req=4e-5)
    assert (err.receiver, err.p_max, err.p_req) == (3, 2.5e-5, 4e-5)
    assert "Receiver 3" in str(err)

    conv = ConvergenceError("stuck", last_iterate=1.5, residual=1e-3, bracket=(0.0, 2.0))
    assert conv.bracket == (0.0, 2.0)
    assert conv.last_iterate == 1.5
    assert conv.residual == 1e-3
    assert ConvergenceError("stuck", last_iterate=1.5, residual=1e-3).bracket is None

    assert ParameterError("too big", bound=0.25).bound == 0.25
    assert NumericalError("nan", location=-3.0).location == -3.0
