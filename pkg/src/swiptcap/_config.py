from __future__ import annotations

import math
import sys
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing_extensions import Self

from swiptcap._models import SolverOptions, TxConstraints
from swiptcap._rectenna import DiodeParams, Rectenna, RectifierParams
from swiptcap._scenarios import Deployment, Receiver
from swiptcap._types import StrPath
from swiptcap._utils import dbm_to_watt, realpath

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class DiodeSection(_Section):
    """`[diode]`"""

    i_s_a: Positive = 5e-6
    eta: Annotated[float, Field(ge=1, le=2)] = 1.05
    i_bv_a: Positive = 1e-4
    b_v_v: Positive = 2.0
    r_s_ohm: Positive = 20.0
    c_j0_f: Positive = 0.14e-12
    v_t_v: Positive | None = None
    """Thermal voltage; the diode default when omitted."""


class CircuitSection(_Section):
    """`[circuit]`"""

    r_l_ohm: Positive = 10e3
    c_l_f: Positive = 1e-9
    r_ant_ohm: Positive = 50.0
    f_c_hz: Positive = 2.45e9


class DeploymentSection(_Section):
    """`[deployment]`"""

    alpha: Annotated[float, Field(ge=2)] = 2.5
    d_i_m: Positive = 25.0
    d_e_m: tuple[Positive, ...] = (5.0,)
    """Energy receiver distances; receivers are numbered 1, 2, ... in this order."""
    a_r_v: tuple[Positive | None, ...] | None = None
    """Received amplitude caps, aligned with `d_e_m`."""
    sigma_n2_dbm: float = -50.0
    """Noise power per real dimension at the information receiver."""

    @model_validator(mode="after")
    def _aligned_caps(self) -> Self:
        if self.a_r_v is not None and len(self.a_r_v) != len(self.d_e_m):
            raise ValueError(f"a_r_v has {len(self.a_r_v)} entries but d_e_m has {len(self.d_e_m)}")
        return self

    @property
    def sigma_n2(self) -> float:
        return float(dbm_to_watt(self.sigma_n2_dbm))


class TxSection(_Section):
    """`[tx]`"""

    sigma2_dbm: float = 33.0
    a_t_v: Positive | None = None
    """Peak amplitude; three standard deviations of the power budget when omitted."""

    @property
    def sigma2(self) -> float:
        return float(dbm_to_watt(self.sigma2_dbm))


class SolverSection(_Section):
    """`[solver]`"""

    grid_points: Annotated[int, Field(ge=2)] | None = None
    kkt_tol: Positive | None = None
    quad_nodes: Annotated[int, Field(ge=16)] = 2048
    gap_tol: Positive = 1e-6
    max_iterations: Annotated[int, Field(ge=1)] = 50_000
    mass_floor: Positive = 1e-7
    workers: Annotated[int, Field(ge=1)] = 1


class ScenarioConfig(BaseModel):
    """
    A scenario file.

    Sections and keys are fixed; anything unknown is rejected so that a misspelt
    unit suffix never passes silently. Defaults describe an SMS7630 rectenna at
    2.45 GHz with one energy receiver at 5 m and the information receiver at 25 m.

    Examples
    --------
    ```toml
    [tx]
    sigma2_dbm = 33.0

    [deployment]
    d_e_m = [3.0, 3.5, 4.0]
    ```
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    diode: DiodeSection = DiodeSection()
    circuit: CircuitSection = CircuitSection()
    deployment: DeploymentSection = DeploymentSection()
    tx: TxSection = TxSection()
    solver: SolverSection = SolverSection()

    @classmethod
    def load(cls, path: StrPath) -> ScenarioConfig:
        """
        Read and validate a TOML scenario file.

        Raises
        ------
        tomllib.TOMLDecodeError
            If the file is not valid TOML.
        pydantic.ValidationError
            If a key is unknown or a value out of range.
        """
        with realpath(path).open("rb") as f:
            return cls.model_validate(tomllib.load(f))

    def to_rectenna(self) -> Rectenna:
        d = self.diode
        diode = DiodeParams(i_s=d.i_s_a, eta=d.eta, i_bv=d.i_bv_a, b_v=d.b_v_v, r_s=d.r_s_ohm, c_j0=d.c_j0_f)
        if d.v_t_v is not None:
            diode = diode.model_copy(update={"v_t": d.v_t_v})
        c = self.circuit
        rectifier = RectifierParams(r_l=c.r_l_ohm, c_l=c.c_l_f, r_ant=c.r_ant_ohm, f_c=c.f_c_hz)
        return Rectenna(diode=diode, rectifier=rectifier)

    def to_deployment(self) -> Deployment:
        dep = self.deployment
        rectenna = self.to_rectenna()
        caps = dep.a_r_v or (None,) * len(dep.d_e_m)
        receivers = tuple(
            Receiver(id=i, d_e=d_e, rectenna=rectenna, a_r=cap)
            for i, (d_e, cap) in enumerate(zip(dep.d_e_m, caps), start=1)
        )
        return Deployment(
            f_c=self.circuit.f_c_hz, alpha=dep.alpha, d_i=dep.d_i_m, sigma_n2=dep.sigma_n2, receivers=receivers
        )

    def to_tx(self) -> TxConstraints:
        sigma2 = self.tx.sigma2
        a_t = self.tx.a_t_v if self.tx.a_t_v is not None else 3.0 * math.sqrt(sigma2)
        return TxConstraints(sigma2=sigma2, a_t=a_t)

    def to_solver_options(self) -> SolverOptions:
        s = self.solver
        return SolverOptions(
            grid_points=s.grid_points,
            kkt_tol=s.kkt_tol,
            quad_nodes=s.quad_nodes,
            gap_tol=s.gap_tol,
            max_iterations=s.max_iterations,
            mass_floor=s.mass_floor,
        )
