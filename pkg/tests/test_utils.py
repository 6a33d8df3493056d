from __future__ import annotations

import hashlib
import math
from pathlib import Path

import numpy as np
import pytest

from swiptcap import __version__, __version_tuple__, dbm_to_watt, watt_to_dbm
from swiptcap._utils import fmt, realpath, sha256sum
from swiptcap._version import Version


@pytest.mark.parametrize(
    "dbm,watt",
    [
        (0.0, 1e-3),
        (30.0, 1.0),
        (-30.0, 1e-6),
        (33.0, 1.9952623149688795),
        (-60.0, 1e-9),
    ],
)
def test_dbm_to_watt(dbm: float, watt: float) -> None:
    assert dbm_to_watt(dbm) == pytest.approx(watt, rel=1e-12)
    assert watt_to_dbm(watt) == pytest.approx(dbm, abs=1e-9)


def test_dbm_arrays() -> None:
    out = dbm_to_watt(np.array([-10.0, 0.0, 10.0]))
    assert isinstance(out, np.ndarray)
    np.testing.assert_allclose(out, [1e-4, 1e-3, 1e-2], rtol=1e-12)
    assert watt_to_dbm(0.0) == -math.inf


def test_fmt() -> None:
    assert fmt(1.0) == "1"
    assert fmt(1e-4) == "0.0001"
    assert fmt(1.23456789012) == "1.23456789"
    assert fmt(math.nan) == "nan"


def test_realpath(tmp_path: Path) -> None:
    assert realpath(tmp_path) == tmp_path.resolve()
    assert realpath(str(tmp_path)) == tmp_path.resolve()
    assert realpath("~") == Path.home().resolve()


def test_sha256sum(tmp_path: Path) -> None:
    file = tmp_path / "scenario.toml"
    file.write_bytes(b"[tx]\nsigma2_dbm = 33.0\n")
    assert sha256sum(file) == hashlib.sha256(b"[tx]\nsigma2_dbm = 33.0\n").hexdigest()


@pytest.mark.parametrize(
    "version,expected",
    [
        ("1.0.0", (1, 0, 0)),
        ("2.13.4.dev1+g1234", (2, 13, 4)),
        ("0.1.0rc2", (0, 1, 0)),
        ("unknown", (0, 0, 0)),
    ],
)
def test_version_parse(version: str, expected: tuple[int, int, int]) -> None:
    assert Version.parse(version) == expected


def test_package_version() -> None:
    assert __version_tuple__ == Version.parse(__version__)
