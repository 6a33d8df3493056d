from __future__ import annotations


class SwiptError(Exception):
    """Base class for every error raised by swiptcap."""


class DomainError(SwiptError, ValueError):
    """An argument lies outside the mathematical domain of the function."""


class ParameterError(SwiptError, ValueError):
    """
    A model parameter violates a bound derived from the other parameters.

    Parameters
    ----------
    message : str
        Human readable description.
    bound : float
        The bound that was violated.
    """

    def __init__(self, message: str, *, bound: float) -> None:
        super().__init__(message)
        self.bound = bound


class ConvergenceError(SwiptError, ArithmeticError):
    """
    An iterative method stopped without meeting its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    last_iterate : float
        The last iterate produced.
    residual : float
        Residual at the last iterate.
    bracket : tuple[float, float], optional
        Bracket the search was confined to, if any.
    """

    def __init__(
        self,
        message: str,
        *,
        last_iterate: float,
        residual: float,
        bracket: tuple[float, float] | None = None,
    ) -> None:
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
        self.bracket = bracket


class NumericalError(SwiptError, ArithmeticError):
    """A non-finite value showed up where a finite one is required."""

    def __init__(self, message: str, *, location: float) -> None:
        super().__init__(message)
        self.location = location


class InfeasibleDemandError(SwiptError):
    """
    A harvested-power demand exceeds what any admissible input distribution delivers.

    Parameters
    ----------
    receiver : int
        Identifier of the receiver whose demand cannot be met.
    p_max : float
        Largest achievable average harvested power for that receiver (W).
    p_req : float
        The requested power (W).
    """

    def __init__(self, receiver: int, *, p_max: float, p_req: float) -> None:
        super().__init__(f"Receiver {receiver} requires {p_req:.9g} W but at most {p_max:.9g} W can be harvested")
        self.receiver = receiver
        self.p_max = p_max
        self.p_req = p_req


class SaturatedRegimeError(SwiptError):
    """The single-active-constraint reduction was requested while some receiver can saturate."""
