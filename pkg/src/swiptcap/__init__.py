from __future__ import annotations

from swiptcap._channels import AmplitudeChannel, BaseChannel, DiscreteKernel, RealAwgnChannel
from swiptcap._config import ScenarioConfig
from swiptcap._enums import Signalling, SolveStatus
from swiptcap._exceptions import (
    ConvergenceError,
    DomainError,
    InfeasibleDemandError,
    NumericalError,
    ParameterError,
    SaturatedRegimeError,
    SwiptError,
)
from swiptcap._models import (
    ActiveConstraint,
    CapacitySolution,
    DiscreteDistribution,
    EffectivePeak,
    McSpec,
    OptimalityReport,
    QuadratureSpec,
    RETrace,
    RETracePoint,
    RootSolveSpec,
    SolverOptions,
    TxConstraints,
)
from swiptcap._numerics import erf, gauss_legendre_nodes, integrate, lambert_w0, lambert_w0_from_log, log_bessel_i0
from swiptcap._oracle import finite_difference_gradient, lp_max_harvest, mc_mutual_information, quad_mutual_information
from swiptcap._rectenna import DiodeParams, Rectenna, RectifierParams
from swiptcap._scenarios import (
    SPEED_OF_LIGHT,
    Deployment,
    Harvester,
    Receiver,
    SuboptimalDistribution,
    active_constraint,
    capacity_problem,
    channel_gain,
    effective_peak,
    gaussian_capacity,
    max_wpt,
    preq_grid,
    re_sweep,
    suboptimal_distribution,
    suboptimal_for_power,
)
from swiptcap._solver import (
    CapacityProblem,
    EhConstraint,
    ask_constellation_rate,
    mass_point_clustering,
    recover_multipliers,
    smith_capacity,
    solve,
    verify_optimality,
)
from swiptcap._utils import dbm_to_watt, watt_to_dbm
from swiptcap._version import Version, _get_version

__version__ = _get_version()
__version_tuple__ = Version.parse(__version__)

__all__ = [
    # numerics
    "log_bessel_i0",
    "lambert_w0",
    "lambert_w0_from_log",
    "erf",
    "gauss_legendre_nodes",
    "integrate",
    "QuadratureSpec",
    "RootSolveSpec",
    # rectenna
    "DiodeParams",
    "RectifierParams",
    "Rectenna",
    # channels
    "BaseChannel",
    "DiscreteKernel",
    "RealAwgnChannel",
    "AmplitudeChannel",
    "DiscreteDistribution",
    # solver
    "CapacityProblem",
    "CapacitySolution",
    "EhConstraint",
    "OptimalityReport",
    "SolverOptions",
    "SolveStatus",
    "solve",
    "verify_optimality",
    "recover_multipliers",
    "smith_capacity",
    "mass_point_clustering",
    "ask_constellation_rate",
    # scenarios
    "SPEED_OF_LIGHT",
    "Deployment",
    "Receiver",
    "Harvester",
    "TxConstraints",
    "EffectivePeak",
    "ActiveConstraint",
    "RETrace",
    "RETracePoint",
    "SuboptimalDistribution",
    "Signalling",
    "channel_gain",
    "effective_peak",
    "max_wpt",
    "suboptimal_distribution",
    "suboptimal_for_power",
    "active_constraint",
    "capacity_problem",
    "preq_grid",
    "re_sweep",
    "gaussian_capacity",
    # oracle
    "McSpec",
    "mc_mutual_information",
    "quad_mutual_information",
    "lp_max_harvest",
    "finite_difference_gradient",
    # configuration and units
    "ScenarioConfig",
    "dbm_to_watt",
    "watt_to_dbm",
    # errors
    "SwiptError",
    "DomainError",
    "ParameterError",
    "ConvergenceError",
    "NumericalError",
    "InfeasibleDemandError",
    "SaturatedRegimeError",
]
