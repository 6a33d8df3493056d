from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from swiptcap import (
    SPEED_OF_LIGHT,
    Deployment,
    DiodeParams,
    DomainError,
    Rectenna,
    RectifierParams,
    channel_gain,
    dbm_to_watt,
    watt_to_dbm,
)


def test_reference_constants(rectenna: Rectenna) -> None:
    assert rectenna.a == pytest.approx(1.85708, rel=1e-5)
    assert rectenna.r_j0 == pytest.approx(5395.53, rel=1e-5)
    assert rectenna.b_coef == pytest.approx(2230.07, rel=1e-3)
    assert rectenna.plateau == pytest.approx(1e-4, rel=1e-12)
    assert rectenna.eta_vt == pytest.approx(1.05 * 25.693e-3)


def test_saturation_onset(rectenna: Rectenna) -> None:
    beta_sat, p_in_sat = rectenna.pin_sat()
    assert 42.0 < beta_sat < 44.0
    assert -8.0 < watt_to_dbm(p_in_sat) < -6.5
    assert rectenna.beta_from_pin(p_in_sat) == pytest.approx(beta_sat, rel=1e-12)
    assert rectenna.pout_lowpower(beta_sat) == pytest.approx(rectenna.plateau, rel=1e-9)


def test_saturation_amplitude_at_five_metres(rectenna: Rectenna) -> None:
    h_e = channel_gain(Deployment(), 5.0)
    assert h_e == pytest.approx((SPEED_OF_LIGHT / (4.0 * math.pi * 5.0 * 2.45e9)) ** 1.25, rel=1e-12)
    assert h_e == pytest.approx(4.0952e-4, rel=2e-3)
    assert rectenna.a_t_sat(h_e) == pytest.approx(33.28, rel=1e-2)
    assert rectenna.harvested_power(rectenna.a_t_sat(h_e), h_e) == pytest.approx(rectenna.plateau, rel=1e-9)


def test_plateau_past_saturation(rectenna: Rectenna) -> None:
    _, p_in_sat = rectenna.pin_sat()
    beta = rectenna.beta_from_pin(10.0 * p_in_sat)
    assert rectenna.pout_approx(beta) == rectenna.plateau
    assert rectenna.pout_lowpower(beta) > rectenna.plateau
    assert rectenna.vout_limit == pytest.approx(0.9577, rel=1e-3)
    assert rectenna.vout_exact(beta) == pytest.approx(rectenna.vout_limit, rel=1e-3)
    assert rectenna.pout_exact(beta) == pytest.approx(rectenna.vout_limit**2 / rectenna.rectifier.r_l, rel=2e-3)


def test_exact_power_approaches_its_limit_from_below(rectenna: Rectenna) -> None:
    _, p_in_sat = rectenna.pin_sat()
    beta = rectenna.beta_from_pin(p_in_sat * np.array([0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0]))
    exact = rectenna.pout_exact(beta)
    limit = rectenna.vout_limit**2 / rectenna.rectifier.r_l
    assert np.all(np.diff(exact) >= -1e-12 * limit)
    assert np.all(np.diff(exact[:5]) > 0)
    assert np.all(exact <= limit * (1 + 1e-12))
    assert np.all(exact <= rectenna.plateau)
    assert exact[-1] == pytest.approx(limit, rel=1e-9)


def test_vout_limit_without_breakdown_leakage() -> None:
    # With I_bv = I_s the two conduction terms balance at B_v / 2 up to the series-resistance factor.
    rectenna = Rectenna(diode=DiodeParams(i_bv=5e-6))
    assert rectenna.vout_limit == pytest.approx(1.0 / (1.0 + 20.0 / 10e3), rel=1e-12)


def test_low_power_models_agree(rectenna: Rectenna) -> None:
    pin_dbm = np.arange(-40.0, -20.0 + 0.25, 0.5)
    beta = rectenna.beta_from_pin(dbm_to_watt(pin_dbm))
    exact = rectenna.pout_exact(beta)
    low = rectenna.pout_lowpower(beta)
    np.testing.assert_allclose(exact, low, rtol=0.02)
    assert np.all(np.diff(exact) > 0)


@pytest.mark.parametrize("model", ["exact", "approx", "lowpower"])
def test_zero_input(rectenna: Rectenna, model: str) -> None:
    assert rectenna.pout(0.0, model) == 0.0  # type: ignore[arg-type]


def test_unknown_model(rectenna: Rectenna) -> None:
    with pytest.raises(ValueError):
        rectenna.pout(1.0, "linear")  # type: ignore[arg-type]


def test_power_per_energy_grows_below_saturation(rectenna: Rectenna) -> None:
    h_e = channel_gain(Deployment(), 5.0)
    amp = np.linspace(0.1, 0.999 * rectenna.a_t_sat(h_e), 200)
    ratio = rectenna.harvested_power(amp, h_e) / amp**2
    assert np.all(np.diff(ratio) > 0)


def test_exact_harvested_power(rectenna: Rectenna) -> None:
    h_e = channel_gain(Deployment(), 5.0)
    amp = np.array([1.0, 5.0, 20.0])
    approx = rectenna.harvested_power(amp, h_e)
    exact = rectenna.harvested_power(amp, h_e, exact=True)
    assert np.all(exact > 0)
    np.testing.assert_allclose(exact[:2], approx[:2], rtol=0.05)


def test_domain_errors(rectenna: Rectenna) -> None:
    with pytest.raises(DomainError):
        rectenna.harvested_power(-1.0, 1e-3)
    with pytest.raises(DomainError):
        rectenna.beta_from_pin(-1e-3)
    with pytest.raises(DomainError):
        rectenna.beta_to_pin(math.nan)
    with pytest.raises(DomainError):
        rectenna.input_impedance(0.0)


def test_impedances(rectenna: Rectenna) -> None:
    z = rectenna.z_a_low
    assert z.real > rectenna.diode.r_s
    assert rectenna.high_power_impedance() != z
    assert rectenna.beta_to_pin(rectenna.beta_from_pin(1e-5)) == pytest.approx(1e-5, rel=1e-12)


def test_short_time_constant_warns(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="swiptcap"):
        Rectenna(rectifier=RectifierParams(c_l=1e-12))
    assert "ripple" in caplog.text


def test_custom_thermal_voltage() -> None:
    warm = Rectenna(diode=DiodeParams(v_t=27e-3))
    assert warm.eta_vt == pytest.approx(1.05 * 27e-3)
    assert warm.a < Rectenna().a


def test_exact_voltage_near_low_power_closed_form(rectenna: Rectenna) -> None:
    assert rectenna.vout_exact(0.0) == 0.0
    for pin_dbm in (-35.0, -25.0):
        beta = float(rectenna.beta_from_pin(dbm_to_watt(pin_dbm)))
        v = rectenna.vout_exact(beta)
        assert 0.0 < v < rectenna.diode.b_v
        assert v == pytest.approx(rectenna.vout_lowpower(beta), rel=0.01)


def test_capped_power_never_exceeds_plateau(rectenna: Rectenna) -> None:
    beta_sat, _ = rectenna.pin_sat()
    beta = np.linspace(0.0, 5.0 * beta_sat, 1000)
    approx = rectenna.pout_approx(beta)
    assert np.all(approx <= rectenna.plateau)
    assert np.all(np.diff(approx) >= 0)
    assert np.all(approx[beta < beta_sat * (1 - 1e-9)] < rectenna.plateau)


def test_exact_and_capped_models_stay_within_factor_two(rectenna: Rectenna) -> None:
    beta_sat, _ = rectenna.pin_sat()
    beta = np.geomspace(0.1, 5.0 * beta_sat, 60)
    ratio = rectenna.pout_exact(beta) / rectenna.pout_approx(beta)
    assert np.all((ratio >= 0.5) & (ratio <= 2.0))


def test_power_grows_with_channel_gain(rectenna: Rectenna) -> None:
    amp = np.linspace(0.0, 60.0, 121)
    gains = np.geomspace(1e-5, 1e-2, 25)
    table = np.array([rectenna.harvested_power(amp, h) for h in gains])
    assert np.all(np.diff(table, axis=0) >= 0)
