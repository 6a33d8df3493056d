from __future__ import annotations

import math
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

from swiptcap import ScenarioConfig, SolverOptions

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def test_defaults() -> None:
    config = ScenarioConfig()
    tx = config.to_tx()
    assert tx.sigma2 == pytest.approx(10 ** 0.3)
    assert tx.a_t == pytest.approx(3.0 * math.sqrt(tx.sigma2))
    deployment = config.to_deployment()
    assert [r.id for r in deployment.receivers] == [1]
    assert deployment.sigma_n2 == pytest.approx(1e-8)
    assert config.to_solver_options() == SolverOptions()


def test_reference_scenario() -> None:
    config = ScenarioConfig.load(Path("configs/single_receiver.toml"))
    assert config.to_tx().a_t == 4.2375
    assert config.to_deployment().sigma_n2 == pytest.approx(1e-9)
    assert config.to_solver_options().grid_points == 201
    assert config.to_rectenna().a == pytest.approx(1.85708, rel=1e-5)


def test_three_receivers_scenario() -> None:
    config = ScenarioConfig.load("configs/three_receivers.toml")
    deployment = config.to_deployment()
    assert [(r.id, r.d_e) for r in deployment.receivers] == [(1, 3.0), (2, 3.5), (3, 4.0)]
    assert config.to_solver_options().quad_nodes == 1024


def test_amplitude_caps(tmp_path: Path) -> None:
    file = tmp_path / "caps.toml"
    file.write_text("[deployment]\nd_e_m = [3.0, 4.0]\na_r_v = [0.5, 0.7]\n")
    deployment = ScenarioConfig.load(file).to_deployment()
    assert [r.a_r for r in deployment.receivers] == [0.5, 0.7]

    file.write_text("[deployment]\nd_e_m = [3.0, 4.0]\na_r_v = [0.5]\n")
    with pytest.raises(ValidationError):
        ScenarioConfig.load(file)


def test_thermal_voltage_override(tmp_path: Path) -> None:
    file = tmp_path / "warm.toml"
    file.write_text("[diode]\nv_t_v = 0.027\n")
    assert ScenarioConfig.load(file).to_rectenna().diode.v_t == 0.027
    assert ScenarioConfig().to_rectenna().diode.v_t == pytest.approx(25.693e-3)


@pytest.mark.parametrize(
    "text",
    [
        "[tx]\nsigma2_w = 2.0\n",
        "[radio]\nf_c_hz = 2.45e9\n",
        "[deployment]\nalpha = 1.0\n",
        "[solver]\ngrid_points = 1\n",
        "[diode]\ni_s_a = -1e-6\n",
    ],
)
def test_rejects_bad_values(tmp_path: Path, text: str) -> None:
    file = tmp_path / "bad.toml"
    file.write_text(text)
    with pytest.raises(ValidationError):
        ScenarioConfig.load(file)


def test_rejects_broken_toml(tmp_path: Path) -> None:
    file = tmp_path / "broken.toml"
    file.write_text("[tx\nsigma2_dbm = 33\n")
    with pytest.raises(tomllib.TOMLDecodeError):
        ScenarioConfig.load(file)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        ScenarioConfig.load(tmp_path / "absent.toml")
