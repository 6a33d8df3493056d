from __future__ import annotations

import logging
import math
from functools import cached_property
from typing import Annotated, Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import i0e, i1e
from typing_extensions import Self

from swiptcap._exceptions import ConvergenceError, DomainError
from swiptcap._models import RootSolveSpec
from swiptcap._numerics import lambert_w0_from_log, log_bessel_i0, newton_root
from swiptcap._types import ArrayLike, FloatArray, PoutModel

logger = logging.getLogger(__name__)

Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class DiodeParams(BaseModel):
    """
    Schottky diode parameters. The defaults describe an SMS7630.
    This is immutable and hashable.
    """

    model_config = ConfigDict(frozen=True)

    i_s: Positive = 5e-6
    """Saturation current (A)."""

    eta: Annotated[float, Field(ge=1, le=2)] = 1.05
    """Ideality factor."""

    i_bv: Positive = 1e-4
    """Breakdown saturation current (A)."""

    b_v: Positive = 2.0
    """Reverse breakdown voltage (V)."""

    r_s: Positive = 20.0
    """Series resistance (Ohm)."""

    c_j0: Positive = 0.14e-12
    """Zero-bias junction capacitance (F)."""

    v_t: Positive = 25.693e-3
    """Thermal voltage (V). 25.693 mV corresponds to 298.15 K."""


class RectifierParams(BaseModel):
    """Load and antenna side of the rectifier. The defaults are the 2.45 GHz reference circuit."""

    model_config = ConfigDict(frozen=True)

    r_l: Positive = 10e3
    """Load resistance (Ohm)."""

    c_l: Positive = 1e-9
    """Load capacitance (F)."""

    r_ant: Positive = 50.0
    """Antenna impedance (Ohm)."""

    f_c: Positive = 2.45e9
    """Carrier frequency (Hz)."""

    @property
    def omega_c(self) -> float:
        """Angular carrier frequency (rad/s)."""
        return 2.0 * math.pi * self.f_c


class Rectenna(BaseModel):
    """
    Nonlinear single-diode rectenna with reverse breakdown.

    The harvested DC power is written as a function of the Bessel argument
    ``beta = B * sqrt(2 * p_in)``. All computations that involve I0(beta) are
    carried out on ln I0(beta), so arguments far beyond saturation are safe.

    Examples
    --------
    ```py
    from swiptcap import Rectenna

    rectenna = Rectenna()
    beta_sat, p_in_sat = rectenna.pin_sat()
    print(rectenna.pout_approx(3 * beta_sat))  # the 1e-4 W plateau
    ```
    """

    model_config = ConfigDict(frozen=True)

    diode: DiodeParams = DiodeParams()
    """Diode parameters."""

    rectifier: RectifierParams = RectifierParams()
    """Rectifier parameters."""

    @model_validator(mode="after")
    def _warn_on_short_time_constant(self) -> Self:
        tau = self.rectifier.r_l * self.rectifier.c_l
        if tau < 100.0 / self.rectifier.f_c:
            logger.warning(
                "R_L*C_L = %.3g s is not much longer than the carrier period %.3g s; "
                "the DC output will carry ripple the model ignores",
                tau,
                1.0 / self.rectifier.f_c,
            )
        return self

    @property
    def eta_vt(self) -> float:
        """eta * V_T (V)."""
        return self.diode.eta * self.diode.v_t

    @property
    def a(self) -> float:
        """I_s (R_L + R_s) / (eta V_T)."""
        return self.diode.i_s * (self.rectifier.r_l + self.diode.r_s) / self.eta_vt

    @property
    def r_j0(self) -> float:
        """Zero-bias junction resistance eta V_T / I_s (Ohm)."""
        return self.eta_vt / self.diode.i_s

    @property
    def z_a_low(self) -> complex:
        """Low-power input impedance Z_a(R_j0) (Ohm)."""
        return self.input_impedance(self.r_j0)

    @property
    def b_coef(self) -> float:
        """B = 1 / (eta V_T sqrt(Re{1/Z_a*})) evaluated at the low-power impedance (1/V)."""
        return 1.0 / (self.eta_vt * math.sqrt((1.0 / self.z_a_low.conjugate()).real))

    @property
    def plateau(self) -> float:
        """Saturated output power B_v^2 / (4 R_L) (W)."""
        return self.diode.b_v**2 / (4.0 * self.rectifier.r_l)

    @property
    def vout_limit(self) -> float:
        """
        Limit of `vout_exact` as beta grows without bound (V).

        Once I0(beta) dominates, the balance equation reduces to forward conduction
        against breakdown conduction, which meet at
        ``[B_v / (eta V_T) + ln(I_s / I_bv)] / (2 (1 + R_s / R_L) / (eta V_T))``.
        This sits somewhat below B_v / 2 whenever I_bv > I_s.
        """
        d = self.diode
        k = (1.0 + d.r_s / self.rectifier.r_l) / self.eta_vt
        return (d.b_v / self.eta_vt + math.log(d.i_s / d.i_bv)) / (2.0 * k)

    def input_impedance(self, r_d: float) -> complex:
        """
        Rectifier input impedance for a junction resistance `r_d`.

        Parameters
        ----------
        r_d : float
            Junction resistance (Ohm), strictly positive.

        Returns
        -------
        complex
            R_s + (1/R_d + j w C_j0)^-1 + (1/R_L + j w C_L)^-1.
        """
        if not r_d > 0:
            raise DomainError(f"r_d must be positive, got {r_d!r}")
        w = self.rectifier.omega_c
        junction = 1.0 / (1.0 / r_d + 1j * w * self.diode.c_j0)
        load = 1.0 / (1.0 / self.rectifier.r_l + 1j * w * self.rectifier.c_l)
        return self.diode.r_s + junction + load

    def high_power_impedance(self) -> complex:
        """Z_a(R_L/2), the input impedance once the junction resistance has dropped. Diagnostic only."""
        return self.input_impedance(self.rectifier.r_l / 2.0)

    def beta_from_pin(self, p_in: ArrayLike) -> float | FloatArray:
        """Bessel argument for a received RF power `p_in` (W)."""
        p = np.asarray(p_in, dtype=np.float64)
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError("received power must be finite and non-negative")
        beta = self.b_coef * np.sqrt(2.0 * p)
        return float(beta) if beta.ndim == 0 else beta

    def beta_to_pin(self, beta: ArrayLike) -> float | FloatArray:
        """Received RF power (W) that produces the Bessel argument `beta`."""
        b = np.asarray(beta, dtype=np.float64)
        if np.any(b < 0) or not np.all(np.isfinite(b)):
            raise DomainError("beta must be finite and non-negative")
        p = 0.5 * (b / self.b_coef) ** 2
        return float(p) if p.ndim == 0 else p

    def _balance(self, log_i0: float) -> tuple[Callable[[float], float], Callable[[float], float]]:
        # Balance equation divided by I_s * I0(beta); every exponent stays bounded on [0, B_v].
        d, r = self.diode, self.rectifier
        k = (1.0 + d.r_s / r.r_l) / self.eta_vt
        inv_i0 = math.exp(-log_i0)
        log_bd = math.log(d.i_bv / d.i_s) - d.b_v / self.eta_vt
        load = inv_i0 / (r.r_l * d.i_s)

        def residual(v: float) -> float:
            return math.exp(-v * k) - inv_i0 - (math.exp(v * k + log_bd) - math.exp(log_bd - log_i0)) - v * load

        def slope(v: float) -> float:
            return -k * math.exp(-v * k) - k * math.exp(v * k + log_bd) - load

        return residual, slope

    def vout_exact(self, beta: float) -> float:
        """
        DC output voltage from the exact diode balance equation, including reverse breakdown.

        Parameters
        ----------
        beta : float
            Bessel argument, non-negative.

        Returns
        -------
        float
            The unique root of the balance equation in [0, B_v] (V).

        Raises
        ------
        DomainError
            If `beta` is negative or not finite.
        ConvergenceError
            If the bracketed Newton solve fails.
        """
        log_i0 = log_bessel_i0(beta)
        if log_i0 == 0.0:
            return 0.0

        residual, slope = self._balance(log_i0)
        guess = min(self.vout_lowpower(beta), self.diode.b_v)
        v = newton_root(
            residual,
            slope,
            RootSolveSpec(initial_guess=guess, abs_tolerance=1e-14, max_iterations=200),
            bracket=(0.0, self.diode.b_v),
        )
        if abs(residual(v)) > 1e-10:
            raise ConvergenceError(
                f"DC balance at beta={beta!r} left residual {residual(v):.3g}",
                last_iterate=v,
                residual=residual(v),
                bracket=(0.0, self.diode.b_v),
            )
        return v

    def vout_lowpower(self, beta: ArrayLike) -> float | FloatArray:
        """Closed-form DC output voltage neglecting breakdown (V)."""
        a = self.a
        lb = np.asarray(log_bessel_i0(beta))
        w = np.asarray(lambert_w0_from_log(a + math.log(a) + lb))
        v = np.where(lb == 0.0, 0.0, (w - a) / a * self.diode.i_s * self.rectifier.r_l)
        return float(v) if v.ndim == 0 else v

    def pout_exact(self, beta: ArrayLike) -> float | FloatArray:
        """Harvested DC power V_out^2 / R_L from the exact balance equation (W)."""
        b = np.asarray(beta, dtype=np.float64)
        out = np.array([self.vout_exact(float(x)) for x in b.ravel()]).reshape(b.shape) ** 2 / self.rectifier.r_l
        return float(out) if out.ndim == 0 else out

    def pout_lowpower(self, beta: ArrayLike) -> float | FloatArray:
        """
        Closed-form harvested power without breakdown,
        ``[W0(a e^a I0(beta))/a - 1]^2 I_s^2 R_L`` (W). Exactly 0 at beta = 0.
        """
        v = np.asarray(self.vout_lowpower(beta))
        out = v * v / self.rectifier.r_l
        return float(out) if out.ndim == 0 else out

    def pout_approx(self, beta: ArrayLike) -> float | FloatArray:
        """Low-power closed form capped at the breakdown plateau B_v^2 / (4 R_L) (W)."""
        out = np.minimum(np.asarray(self.pout_lowpower(beta)), self.plateau)
        return float(out) if out.ndim == 0 else out

    def pout(self, beta: ArrayLike, model: PoutModel = "approx") -> float | FloatArray:
        """Harvested DC power under the named model."""
        match model:
            case "exact":
                return self.pout_exact(beta)
            case "lowpower":
                return self.pout_lowpower(beta)
            case "approx":
                return self.pout_approx(beta)
            case _:
                raise ValueError(f"Unknown rectenna model: {model!r}")

    @cached_property
    def _saturation(self) -> tuple[float, float]:
        u = self.diode.b_v / (2.0 * self.diode.i_s * self.rectifier.r_l)
        target = self.a * u + math.log1p(u)

        def f(beta: float) -> float:
            return log_bessel_i0(beta) - target

        def df(beta: float) -> float:
            return float(i1e(beta) / i0e(beta))

        # ln I0(beta) >= beta - ln(2 pi beta)/2, so the root sits below 2*target + 10.
        upper = 2.0 * target + 10.0
        beta_sat = newton_root(
            f, df, RootSolveSpec(initial_guess=target + 2.0, abs_tolerance=1e-13), bracket=(0.0, upper)
        )
        return beta_sat, float(self.beta_to_pin(beta_sat))

    def pin_sat(self) -> tuple[float, float]:
        """
        Onset of saturation.

        Returns
        -------
        tuple[float, float]
            ``(beta_sat, p_in_sat)``: the Bessel argument at which the closed form reaches
            the plateau, and the corresponding received RF power (W).
        """
        return self._saturation

    def harvested_power(self, amplitude: ArrayLike, h_e: float, *, exact: bool = False) -> float | FloatArray:
        """
        Harvested DC power for a transmit amplitude through a channel of gain `h_e`.

        Parameters
        ----------
        amplitude : float or array_like
            Non-negative amplitudes (V). Pass |x| for real symbols.
        h_e : float
            Channel amplitude gain |h_E|.
        exact : bool, optional
            Use the exact balance equation instead of the capped closed form.

        Returns
        -------
        float or ndarray
            Harvested power (W).
        """
        amp = np.asarray(amplitude, dtype=np.float64)
        if np.any(amp < 0):
            raise DomainError("amplitudes must be non-negative; pass |x|")
        beta = math.sqrt(2.0) * self.b_coef * abs(h_e) * amp
        return self.pout_exact(beta) if exact else self.pout_approx(beta)

    def a_t_sat(self, h_e: float) -> float:
        """Transmit amplitude at which the receiver reaches the plateau, sqrt(p_in_sat) / |h_E| (V)."""
        return math.sqrt(self.pin_sat()[1]) / abs(h_e)
