"""
Command line interface.

Every command writes CSV: leading ``#`` lines carry the package version, the
command and the SHA-256 of the scenario file, then one header row and the
records. Floats are written with 9 significant digits.

Exit codes: 0 success, 2 usage or configuration error, 3 infeasible demand,
4 no verified optimum.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, TextIO

import numpy as np
from pydantic import ValidationError
from rich import box as RichBox
from rich import print as richprint
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table as RichTable

from swiptcap._config import ScenarioConfig
from swiptcap._enums import Signalling, SolveStatus
from swiptcap._exceptions import ConvergenceError, InfeasibleDemandError, SaturatedRegimeError
from swiptcap._models import CapacitySolution, DiscreteDistribution
from swiptcap._scenarios import active_constraint, capacity_problem, effective_peak, max_wpt, re_sweep
from swiptcap._solver import recover_multipliers, solve, verify_optimality
from swiptcap._types import TableStyle
from swiptcap._utils import dbm_to_watt, fmt, realpath, sha256sum, watt_to_dbm
from swiptcap._version import _get_version

logger = logging.getLogger("swiptcap")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


class UsageError(ValueError):
    """A command line value could not be interpreted."""


def parse_range(text: str) -> list[float]:
    """
    Parse ``start:stop:step`` (stop inclusive) or a single number.

    An empty list results when start exceeds stop.
    """
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError as err:
        raise UsageError(f"bad range {text!r}; expected start:stop:step") from err
    match values:
        case [single]:
            return [single]
        case [start, stop, step]:
            if not step > 0:
                raise UsageError(f"range step must be positive, got {step!r}")
            if start > stop:
                return []
            count = math.floor((stop - start) / step + 1e-9) + 1
            return [start + k * step for k in range(count)]
        case _:
            raise UsageError(f"bad range {text!r}; expected start:stop:step")


def parse_preq(text: str | None, receivers: Sequence[int]) -> dict[int, float]:
    """Comma separated demands in microwatts, in receiver order, to a watt mapping."""
    if not text:
        return {}
    try:
        values = [float(v) * 1e-6 for v in text.split(",")]
    except ValueError as err:
        raise UsageError(f"bad demand list {text!r}") from err
    if len(values) > len(receivers):
        raise UsageError(f"{len(values)} demands given for {len(receivers)} receivers")
    if any(v < 0 for v in values):
        raise UsageError("demands must be non-negative")
    return dict(zip(receivers, values))


def _preamble(out: TextIO, command: str, digest: str) -> None:
    out.write(f"# swiptcap {_get_version()}\n")
    out.write(f"# command {command}\n")
    out.write(f"# config sha256 {digest}\n")


def _writer(out: TextIO) -> Any:
    return csv.writer(out, lineterminator="\n")


def _print_table(rows: Iterable[Sequence[str]], columns: Sequence[str], title: str, style: TableStyle) -> None:
    table = RichTable(title=title, box=getattr(RichBox, style.upper()))
    for column in columns:
        table.add_column(column, no_wrap=True)
    for row in rows:
        table.add_row(*row)
    richprint(table)


def cmd_pout(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    rectenna = config.to_rectenna()
    pins = parse_range(args.pin_dbm)
    _preamble(out, "pout", args.digest)
    w = _writer(out)
    w.writerow(["pin_dbm", "pout_w", "model"])
    for pin in pins:
        beta = rectenna.beta_from_pin(dbm_to_watt(pin))
        w.writerow([fmt(pin), fmt(float(rectenna.pout(beta, args.model))), args.model])
    return EXIT_OK


def cmd_pinsat(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    deployment = config.to_deployment()
    columns = ["receiver", "d_e_m", "beta_sat", "p_in_sat_w", "p_in_sat_dbm", "a_t_sat_v"]
    rows = []
    for r in deployment.receivers:
        beta_sat, p_in_sat = r.rectenna.pin_sat()
        h_e = deployment.channel_gain(r.d_e)
        rows.append(
            [
                str(r.id),
                fmt(r.d_e),
                fmt(beta_sat),
                fmt(p_in_sat),
                fmt(float(watt_to_dbm(p_in_sat))),
                fmt(r.rectenna.a_t_sat(h_e)),
            ]
        )
    if args.table:
        _print_table(rows, columns, "Saturation onset", args.style)
        return EXIT_OK
    _preamble(out, "pinsat", args.digest)
    w = _writer(out)
    w.writerow(columns)
    w.writerows(rows)
    return EXIT_OK


def _summary(solution: CapacitySolution) -> str:
    items = [f"rate_bits={fmt(solution.rate)}", f"lambda0={fmt(solution.lambda0)}"]
    items += [f"lambda_{rid}={fmt(v)}" for rid, v in sorted(solution.lambdas.items())]
    items += [f"harvested_w_{rid}={fmt(v)}" for rid, v in sorted(solution.harvested.items())]
    items += [f"verified={str(solution.verified).lower()}", f"status={solution.status.name.lower()}"]
    return "# summary " + " ".join(items) + "\n"


def cmd_capacity(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    deployment = config.to_deployment()
    options = config.to_solver_options()
    signalling = Signalling.get(args.signalling)
    p_req = parse_preq(args.preq_uw, [r.id for r in deployment.receivers])
    problem = capacity_problem(deployment, config.to_tx(), p_req, signalling=signalling, options=options)
    solution = solve(problem, options)

    _preamble(out, "capacity", args.digest)
    out.write(f"# signalling {signalling.name.lower()}\n")
    for r in deployment.receivers:
        out.write(f"# preq_w {r.id} {fmt(p_req.get(r.id, 0.0))}\n")
    w = _writer(out)
    w.writerow(["support", "prob"])
    w.writerows([fmt(x), fmt(p)] for x, p in zip(solution.dist.x, solution.dist.p))
    out.write(_summary(solution))
    logger.info("rate %.6g bits, verified %s", solution.rate, solution.verified)
    return EXIT_OK if solution.status is SolveStatus.OPTIMAL else EXIT_NUMERICAL


def cmd_recurve(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    deployment = config.to_deployment()
    signalling = Signalling.get(args.signalling)
    workers = args.workers or config.solver.workers
    trace = re_sweep(
        deployment,
        config.to_tx(),
        args.receiver,
        points=args.points,
        spacing=args.spacing,
        signalling=signalling,
        options=config.to_solver_options(),
        workers=workers,
    )
    harvesters = deployment.harvesters()

    _preamble(out, "recurve", args.digest)
    out.write(f"# signalling {signalling.name.lower()}\n")
    w = _writer(out)
    w.writerow(["p_req_w", "rate_bits", *(f"p_harv_w_{h.receiver}" for h in harvesters), "verified"])
    for pt in trace.points:
        if pt.dist is None:
            harvested = [math.nan] * len(harvesters)
        else:
            harvested = [pt.dist.expect(h(np.abs(pt.dist.x))) for h in harvesters]
        w.writerow(
            [fmt(pt.p_req[args.receiver]), fmt(pt.rate), *(fmt(v) for v in harvested), str(pt.verified).lower()]
        )
    failed = [pt for pt in trace.points if pt.status is SolveStatus.MAX_ITERATIONS]
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_maxwpt(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    deployment = config.to_deployment()
    tx = config.to_tx()
    signalling = Signalling.get(args.signalling)
    peak = effective_peak(tx, deployment)
    ids = [args.receiver] if args.receiver is not None else [r.id for r in deployment.receivers]
    columns = ["receiver", "a_prime_v", "peak_mass", "p_max_w"]
    rows = []
    for rid in ids:
        harvester = deployment.harvester(rid)
        dist, p_max = max_wpt(harvester, peak.a, tx.sigma2, signalling=signalling)
        a_prime = float(dist.x[-1])
        peak_mass = float(dist.p[np.abs(dist.x) == a_prime].sum())
        rows.append([str(rid), fmt(a_prime), fmt(peak_mass), fmt(p_max)])
    if args.table:
        _print_table(rows, columns, "Maximum harvested power", args.style)
        return EXIT_OK
    _preamble(out, "maxwpt", args.digest)
    w = _writer(out)
    w.writerow(columns)
    w.writerows(rows)
    return EXIT_OK


def cmd_active(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    deployment = config.to_deployment()
    p_req = parse_preq(args.preq_uw, [r.id for r in deployment.receivers])
    result = active_constraint(
        deployment,
        config.to_tx(),
        p_req,
        signalling=Signalling.get(args.signalling),
        options=config.to_solver_options(),
        cross_check=args.cross_check,
    )
    _preamble(out, "active", args.digest)
    w = _writer(out)
    w.writerow(["receiver", "p_req_w", "single_rate_bits", "active"])
    for r in deployment.receivers:
        active = str(r.id == result.receiver).lower()
        w.writerow([str(r.id), fmt(p_req.get(r.id, 0.0)), fmt(result.single_rates[r.id]), active])
    out.write(f"# active {result.receiver if result.receiver is not None else 'none'}\n")
    return EXIT_OK


def read_solution(path: Path) -> tuple[dict[str, str], dict[int, float], DiscreteDistribution]:
    """
    Read a file written by the ``capacity`` command.

    Returns
    -------
    tuple[dict[str, str], dict[int, float], DiscreteDistribution]
        Summary fields (plus ``signalling``), demands per receiver and the distribution.
    """
    meta: dict[str, str] = {}
    p_req: dict[int, float] = {}
    support: list[float] = []
    probs: list[float] = []
    with path.open(newline="") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                words = line[1:].split()
                match words:
                    case ["signalling", value]:
                        meta["signalling"] = value
                    case ["preq_w", rid, value]:
                        p_req[int(rid)] = float(value)
                    case ["summary", *fields]:
                        meta.update(field.split("=", 1) for field in fields)
                continue
            if line == "support,prob":
                continue
            x, p = next(csv.reader([line]))
            support.append(float(x))
            probs.append(float(p))
    if not support:
        raise UsageError(f"{path} holds no distribution")
    return meta, p_req, DiscreteDistribution.from_arrays(support, probs, normalize=True)


def cmd_verify(config: ScenarioConfig, args: argparse.Namespace, out: TextIO) -> int:
    meta, p_req, dist = read_solution(realpath(args.solution))
    deployment = config.to_deployment()
    options = config.to_solver_options()
    signalling = Signalling.get(meta.get("signalling"))
    problem = capacity_problem(deployment, config.to_tx(), p_req, signalling=signalling, options=options)

    if "lambda0" in meta:
        lambda0 = float(meta["lambda0"])
        lambdas = {r.id: float(meta.get(f"lambda_{r.id}", 0.0)) for r in deployment.receivers}
    else:
        lambda0, lambdas = recover_multipliers(dist, problem, options)
    # Files without a summary line are taken to claim optimality.
    claimed = SolveStatus.get(meta.get("status"), SolveStatus.OPTIMAL)
    if claimed is not SolveStatus.OPTIMAL:
        logger.warning("%s was written by a solve that ended with status %s", args.solution, claimed.name.lower())
    candidate = CapacitySolution(dist=dist, rate=0.0, lambda0=lambda0, lambdas=lambdas, status=claimed)
    report = verify_optimality(candidate, problem, options)

    _preamble(out, "verify", args.digest)
    w = _writer(out)
    w.writerow(["verified", "min_s", "max_abs_s_at_mass", "tolerance", "solve_status"])
    w.writerow(
        [
            str(report.passed).lower(),
            fmt(report.min_s),
            fmt(report.max_abs_s_at_mass),
            fmt(report.tolerance),
            claimed.name.lower(),
        ]
    )
    if not report.passed:
        logger.error("The distribution in %s violates the optimality conditions", args.solution)
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swiptcap", description="SWIPT conditional capacity toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_get_version()}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging; repeat for debug output.")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors.")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", type=Path, help="TOML scenario file. Built-in defaults when omitted.")
    common.add_argument("-o", "--out", type=Path, help="Write CSV here instead of standard output.")

    signalling = argparse.ArgumentParser(add_help=False)
    signalling.add_argument("--signalling", choices=["real", "complex"], default="real")

    table = argparse.ArgumentParser(add_help=False)
    table.add_argument("--table", action="store_true", help="Render a table instead of CSV.")
    table.add_argument("--style", default="markdown", help="Table box style.")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pout", parents=[common], help="Harvested DC power versus input RF power.")
    p.add_argument(
        "--pin-dbm", required=True, help="start:stop:step in dBm; write negative values as --pin-dbm=-40:-20:0.5"
    )
    p.add_argument("--model", choices=["exact", "approx", "lowpower"], default="approx")
    p.set_defaults(handler=cmd_pout)

    p = sub.add_parser("pinsat", parents=[common, table], help="Saturation onset per receiver.")
    p.set_defaults(handler=cmd_pinsat)

    p = sub.add_parser("capacity", parents=[common, signalling], help="Solve one conditional capacity problem.")
    p.add_argument("--preq-uw", help="Comma separated demands (uW) in receiver order.")
    p.set_defaults(handler=cmd_capacity)

    p = sub.add_parser("recurve", parents=[common, signalling], help="Rate-energy curve of one receiver.")
    p.add_argument("--receiver", type=int, default=1)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.add_argument("--workers", type=int, default=None, help="Parallel solves; the config value when omitted.")
    p.set_defaults(handler=cmd_recurve)

    p = sub.add_parser("maxwpt", parents=[common, signalling, table], help="Power-maximizing distribution.")
    p.add_argument("--receiver", type=int, default=None)
    p.set_defaults(handler=cmd_maxwpt)

    p = sub.add_parser("active", parents=[common, signalling], help="Identify the binding harvesting constraint.")
    p.add_argument("--preq-uw", help="Comma separated demands (uW) in receiver order.")
    p.add_argument("--cross-check", action="store_true", help="Also solve the joint problem and compare.")
    p.set_defaults(handler=cmd_active)

    p = sub.add_parser("verify", parents=[common], help="Check a solution written by 'capacity'.")
    p.add_argument("--solution", type=Path, required=True)
    p.set_defaults(handler=cmd_verify)
    return parser


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    handler = RichHandler(console=Console(stderr=True), show_time=False, show_path=False)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``swiptcap`` command. Returns the exit code."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    _configure_logging(args.verbose, args.quiet)

    try:
        if args.config is None:
            config, args.digest = ScenarioConfig(), "defaults"
        else:
            config, args.digest = ScenarioConfig.load(args.config), sha256sum(args.config)
    except (OSError, ValidationError, ValueError) as err:
        logger.error("Cannot load %s: %s", args.config, err)
        return EXIT_USAGE

    out: TextIO = sys.stdout
    try:
        if args.out is not None:
            out = realpath(args.out).open("w", newline="")
        return int(args.handler(config, args, out))
    except (UsageError, SaturatedRegimeError, KeyError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except InfeasibleDemandError as err:
        logger.error("%s (P_max = %.9g W)", err, err.p_max)
        return EXIT_INFEASIBLE
    except ConvergenceError as err:
        logger.error("%s", err)
        return EXIT_NUMERICAL
    finally:
        if out is not sys.stdout:
            out.close()
