from __future__ import annotations

import math

import pytest

from swiptcap import Deployment, Receiver, Rectenna, SolverOptions, TxConstraints, dbm_to_watt


@pytest.fixture(scope="session")
def rectenna() -> Rectenna:
    return Rectenna()


@pytest.fixture(scope="session")
def deployment() -> Deployment:
    """One energy receiver at 5 m, information receiver at 25 m, -60 dBm noise."""
    return Deployment(sigma_n2=dbm_to_watt(-60.0), receivers=(Receiver(id=1, d_e=5.0),))


@pytest.fixture(scope="session")
def three_receivers() -> Deployment:
    """Energy receivers at 3, 3.5 and 4 m, -50 dBm noise."""
    receivers = tuple(Receiver(id=i, d_e=d) for i, d in enumerate((3.0, 3.5, 4.0), start=1))
    return Deployment(sigma_n2=dbm_to_watt(-50.0), receivers=receivers)


@pytest.fixture(scope="session")
def tx33() -> TxConstraints:
    """33 dBm average power with the peak at three standard deviations."""
    sigma2 = dbm_to_watt(33.0)
    return TxConstraints(sigma2=sigma2, a_t=3.0 * math.sqrt(sigma2))


@pytest.fixture(scope="session")
def fast_options() -> SolverOptions:
    return SolverOptions(grid_points=101, quad_nodes=512)
