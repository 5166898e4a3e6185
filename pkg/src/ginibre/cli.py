"""Command line entry point.

    ginibre-edge [--log-level LEVEL] [--workers N] SUBCOMMAND [options]

Every subcommand writes one table (CSV) or one JSON object to --output, or to standard
output when no path is given. `mc` adds a JSON summary next to its CSV (`<stem>.summary.json`,
or standard error without --output). Exit codes: 0 success, 2 invalid input, 3 a
numerical check failed; the failing check is named on standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Literal, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ginibre.asymptotics import fit_lkappa_series, tail_model, verify_table
from ginibre.checks_graph.configuration import ALL_GROUPS
from ginibre.conserved import default_x_grid, invariance_check
from ginibre.distribution import distribution_table, tail_residuals, with_tail_fit
from ginibre.glm import glm_table, k_invariant_glm
from ginibre.models import GammaParam, McConfig, PotentialTable
from ginibre.montecarlo import ks_distance, sample_max_real_eig
from ginibre.rhp import potential_table
from ginibre.scattering import c_coeff, scattering_constants
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import FitResidualTooLarge, NumericalCheckError, ParameterError
from shared.settings import get_settings
from shared.utils import configure_logging, encode_json, format_csv, write_csv, write_json

LOGGER = logging.getLogger(__name__)

PROG = "ginibre-edge"
EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3

Subcommand = Literal[
    "constants",
    "potential",
    "glm",
    "distribution",
    "conserved",
    "verify-asymptotics",
    "fit-lkappa",
    "mc",
    "all-checks",
]


class RunConfig(BaseModel):
    """Validated arguments of one invocation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: Subcommand
    gamma: float = Field(default=1.0, ge=0.0, le=1.0, description="Ensemble parameter.")
    gammas: list[float] = Field(default_factory=lambda: [0.5, 1.0], description="Gammas of all-checks.")
    truncation: Optional[float] = Field(default=None, gt=0.0, description="Real-line truncation.")
    nodes: Optional[int] = Field(default=None, ge=64, description="Initial rational grid size.")
    x_min: float = -10.0
    x_max: float = 10.0
    x_step: float = Field(default=0.05, gt=0.0)
    t: float = Field(default=0.0, ge=-0.1, le=0.1)
    t_values: list[float] = Field(default_factory=lambda: [0.0, 0.05])
    x0: Optional[float] = None
    route: Literal["q_form", "u_form"] = "q_form"
    n: int = Field(default=200, ge=2)
    trials: int = Field(default=5000, ge=1)
    seed: int = Field(default=0, ge=0)
    ks: bool = Field(default=True, description="Compare the Monte Carlo maxima with F(s; 1).")
    s_min: Optional[float] = None
    s_max: Optional[float] = None
    s_step: Optional[float] = Field(default=None, gt=0.0)
    groups: list[str] = Field(default_factory=lambda: list(ALL_GROUPS))
    output: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    digits: Optional[int] = Field(default=None, ge=0, le=17)

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.x_max <= self.x_min:
            raise ValueError(f"x range [{self.x_min}, {self.x_max}] is empty")
        s_min = 2 * self.x_min if self.s_min is None else self.s_min
        s_max = 2 * self.x_max if self.s_max is None else self.s_max
        if s_max <= s_min:
            raise ValueError(f"s range [{s_min}, {s_max}] is empty")
        if any(abs(t) > 0.1 for t in self.t_values):
            raise ValueError("times must lie in [-0.1, 0.1]")
        if any(not 0.0 <= g <= 1.0 for g in self.gammas):
            raise ValueError("gammas must lie in [0, 1]")
        unknown = set(self.groups) - set(ALL_GROUPS)
        if unknown:
            raise ValueError(f"unknown check groups: {sorted(unknown)}")
        return self

    @property
    def p(self) -> GammaParam:
        return GammaParam(gamma=self.gamma)

    def numerics(self) -> BaseConfiguration:
        overrides: dict[str, Any] = {}
        if self.truncation is not None:
            overrides["truncation"] = self.truncation
        if self.nodes is not None:
            overrides["rhp_nodes"] = self.nodes
        return BaseConfiguration(**overrides) if overrides else DEFAULT_CONFIG

    def x_grid(self) -> np.ndarray:
        """Return the x grid, extended left as far as the tail model and the radiation front at t need.

        An s range, when given, overrides the x range through x = s/2.
        """
        x_min = self.x_min if self.s_min is None else self.s_min / 2
        x_max = self.x_max if self.s_max is None else self.s_max / 2
        step = self.x_step if self.s_step is None else self.s_step / 2
        return default_x_grid(self.p, x_max, self.numerics(), x_min=x_min, step=step, t=self.t)


@dataclass
class Result:
    """A table plus flat metadata; `failed_check` names a check that failed after output."""

    columns: Sequence[str] = ()
    rows: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    meta: dict[str, Any] = field(default_factory=dict)
    failed_check: Optional[str] = None
    json_only: bool = False
    summary: bool = False

    def payload(self) -> dict[str, Any]:
        out = dict(self.meta)
        for index, name in enumerate(self.columns):
            out[name] = self.rows[:, index]
        return out


def summary_path(output: Path) -> Path:
    """Return where the JSON summary of a CSV table goes: `mc.csv` -> `mc.summary.json`."""
    return output.with_suffix(".summary.json")


def _table_result(table: PotentialTable, columns: Sequence[str], rows: np.ndarray, **meta: Any) -> Result:
    failed = table.failures[0]["check"] if table.failures else None
    return Result(columns=columns, rows=rows, meta={"gamma": table.gamma, "t": table.t, **meta}, failed_check=failed)


def _constants(cfg: RunConfig) -> Result:
    """Tabulate the constants with c_j for the default a and for 2a."""
    numerics = cfg.numerics()
    constants = scattering_constants(cfg.p, config=numerics)
    head = [
        constants.gamma,
        constants.t1,
        constants.t1_error,
        np.nan if constants.l_minus1 is None else constants.l_minus1,
        np.nan if constants.l1_of_1 is None else constants.l1_of_1,
    ]
    c = list(constants.c) + [np.nan] * (5 - len(constants.c))
    rows = [[*head, constants.a, *c[:5]]]
    if not cfg.p.trivial:
        doubled = cfg.p.with_a(2 * constants.a)
        rows.append([*head, doubled.a, *(c_coeff(j, doubled, numerics) for j in range(5))])
    columns = ("gamma", "t1", "t1_error", "l_minus1", "l1_of_1", "a", "c0", "c1", "c2", "c3", "c4")
    return Result(columns=columns, rows=np.array(rows))


def _potential(cfg: RunConfig) -> Result:
    table = potential_table(cfg.p, cfg.x_grid(), t=cfg.t, config=cfg.numerics())
    return _table_result(table, PotentialTable.COLUMNS, table.rows())


def _glm(cfg: RunConfig) -> Result:
    numerics = cfg.numerics()
    if cfg.x0 is not None:
        k = k_invariant_glm(cfg.p, cfg.x0, numerics)
        return Result(meta={"gamma": cfg.gamma, "x0": cfg.x0, "k_invariant": k}, json_only=True)
    xs = np.round(np.arange(cfg.x_min, cfg.x_max + cfg.x_step / 2, cfg.x_step), 10)
    table = glm_table(cfg.p, xs, numerics)
    return Result(columns=table.COLUMNS, rows=table.rows(), meta={"gamma": cfg.gamma})


def _distribution(cfg: RunConfig) -> Result:
    numerics = cfg.numerics()
    table = potential_table(cfg.p, cfg.x_grid(), config=numerics)
    dist = distribution_table(cfg.p, table, route=cfg.route, config=numerics)
    meta: dict[str, Any] = {"route": cfg.route}
    residual = np.full(dist.s_values.shape, np.nan)
    try:
        dist = with_tail_fit(dist)
    except (FitResidualTooLarge, ParameterError) as exc:
        LOGGER.warning("left-tail fit skipped: %s", exc)
    if dist.tail_slope is not None and dist.tail_offset is not None:
        residual = tail_residuals(dist, dist.tail_slope, dist.tail_offset)
        meta.update(tail_slope=dist.tail_slope, tail_offset=dist.tail_offset)
        if cfg.p.is_one:
            meta["k_from_tail"] = -2 * dist.tail_offset
    with np.errstate(divide="ignore"):
        log_f = np.log(dist.f_values)
    rows = np.column_stack([dist.s_values, dist.f_values, log_f, residual])
    return _table_result(table, ("s", "F", "lnF", "tail_model_residual"), rows, **meta)


def _conserved(cfg: RunConfig) -> Result:
    report = invariance_check(cfg.p, cfg.t_values, cfg.x_grid(), cfg.numerics())
    meta: dict[str, Any] = {
        "gamma": cfg.gamma,
        "t": [s.t for s in report.sets],
        "H": [s.h for s in report.sets],
        "K": [s.k for s in report.sets],
        "N": [s.n for s in report.sets],
        "M": [s.m for s in report.sets],
        "spreads": {name.upper(): value for name, value in report.spreads.items()},
    }
    return Result(meta=meta, json_only=True)


def _verify_asymptotics(cfg: RunConfig) -> Result:
    numerics = cfg.numerics()
    table = potential_table(cfg.p, cfg.x_grid(), config=numerics)
    m = tail_model(cfg.p, numerics)
    residuals = verify_table(table, m)
    return _table_result(table, residuals.COLUMNS, residuals.rows(), valid_from=m.valid_from)


def _fit_lkappa(cfg: RunConfig) -> Result:
    fit = fit_lkappa_series(config=cfg.numerics())
    meta: dict[str, Any] = {"l1": fit.l1, "l2": fit.l2, "l3": fit.l3, "residual": fit.residual, "degree": fit.degree}
    meta.update({f"l{index}_error": error for index, error in enumerate(fit.std_errors, start=1)})
    return Result(meta=meta, json_only=True)


def _mc(cfg: RunConfig) -> Result:
    """Sample shifted maxima; the summary carries n, trials, seed and the KS distance to F(s; 1)."""
    emp = sample_max_real_eig(McConfig(n=cfg.n, trials=cfg.trials, seed=cfg.seed))
    counts = emp.real_counts if emp.real_counts is not None else np.zeros(0)
    distance: Optional[float] = None
    if cfg.ks:
        numerics = cfg.numerics()
        one = GammaParam(gamma=1.0)
        table = potential_table(one, default_x_grid(one, config=numerics), config=numerics)
        distance = ks_distance(emp, distribution_table(one, table, config=numerics))
    meta = {
        "n": cfg.n,
        "trials": emp.trials,
        "seed": cfg.seed,
        "ks_distance": distance,
        "no_real": emp.no_real,
        "failed": emp.failed,
        "mean_real_count": float(np.mean(counts)) if counts.size else float("nan"),
    }
    rows = np.column_stack([emp.samples, counts])
    return Result(columns=("shifted_max", "real_count"), rows=rows, meta=meta, summary=True)


def _all_checks(cfg: RunConfig) -> Result:
    from ginibre.checks_graph.graph import graph

    configurable: dict[str, Any] = {
        "gammas": tuple(cfg.gammas),
        "groups": tuple(cfg.groups),
        "x_min": cfg.x_min,
        "x_max": cfg.x_max,
        "x_step": cfg.x_step,
        "t_values": tuple(cfg.t_values),
        "mc_n": cfg.n,
        "mc_trials": cfg.trials,
        "mc_seed": cfg.seed,
    }
    if cfg.truncation is not None:
        configurable["truncation"] = cfg.truncation
    if cfg.nodes is not None:
        configurable["rhp_nodes"] = cfg.nodes
    state = graph.invoke({"label": "all-checks"}, {"configurable": configurable})
    checks = state["checks"]
    failing = [c for c in checks if c.failing]
    meta = dict(state["summary"])
    meta["results"] = [c.model_dump() for c in checks]
    return Result(
        meta=meta,
        failed_check=failing[0].name if failing else None,
        json_only=True,
    )


HANDLERS: dict[str, Callable[[RunConfig], Result]] = {
    "constants": _constants,
    "potential": _potential,
    "glm": _glm,
    "distribution": _distribution,
    "conserved": _conserved,
    "verify-asymptotics": _verify_asymptotics,
    "fit-lkappa": _fit_lkappa,
    "mc": _mc,
    "all-checks": _all_checks,
}


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x-min", type=float, default=-10.0, help="left end of the x grid (default: -10)")
    parser.add_argument("--x-max", type=float, default=10.0, help="right end of the x grid (default: 10)")
    parser.add_argument("--x-step", type=float, default=0.05, help="x grid step (default: 0.05)")


def _add_numerics(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--truncation", type=float, help="real-line truncation of the quadrature (default: 12)")
    parser.add_argument("--nodes", type=int, help="initial rational grid size of the RHP solver (default: 1024)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Largest real eigenvalue of real Ginibre matrices.")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="overrides GINIBRE_LOG_LEVEL")
    parser.add_argument("--workers", type=int, help="worker processes, overrides GINIBRE_WORKERS")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def command(name: str, help_text: str, *, gamma: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if gamma:
            p.add_argument("--gamma", type=float, default=1.0, help="ensemble parameter in [0, 1] (default: 1)")
        p.add_argument("--output", type=Path, help="output file (default: standard output)")
        p.add_argument("--format", choices=["csv", "json"], default="csv", help="output format (default: csv)")
        p.add_argument("--digits", type=int, help="write CSV numbers with this many decimals (default: %%.15e)")
        _add_numerics(p)
        return p

    command("constants", "T1, L_{-1} or L1(1), and c_j for one gamma")
    potential = command("potential", "tabulate q, u and their tail integrals")
    _add_grid(potential)
    potential.add_argument("--t", type=float, default=0.0, help="time, |t| <= 0.1 (default: 0)")
    glm = command("glm", "GLM kernel diagonals and u, or K(gamma) with --x0")
    _add_grid(glm)
    glm.add_argument("--x0", type=float, help="split point; prints K(gamma) instead of the table")
    distribution = command("distribution", "tabulate F(s; gamma) on s = 2x")
    _add_grid(distribution)
    distribution.add_argument("--route", choices=["q_form", "u_form"], default="q_form")
    distribution.add_argument("--s-min", type=float, help="left end of the s grid, overrides --x-min")
    distribution.add_argument("--s-max", type=float, help="right end of the s grid, overrides --x-max")
    distribution.add_argument("--s-step", type=float, help="s grid step, overrides --x-step")
    conserved = command("conserved", "H, K, N, M at several times")
    _add_grid(conserved)
    conserved.add_argument("--t-values", type=float, nargs="+", default=[0.0, 0.05])
    verify = command("verify-asymptotics", "solver minus left-tail model residuals")
    _add_grid(verify)
    command("fit-lkappa", "series fit of L_{-1}/(2 kappa) near gamma = 1", gamma=False)
    mc = command("mc", "Monte Carlo maxima of real eigenvalues", gamma=False)
    mc.add_argument("--n", type=int, default=200, help="matrix dimension (default: 200)")
    mc.add_argument("--trials", type=int, default=5000, help="number of matrices (default: 5000)")
    mc.add_argument("--seed", type=int, default=0, help="root seed (default: 0)")
    mc.add_argument(
        "--ks",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="compare with F(s; 1), which solves the gamma = 1 potential table (default: on)",
    )
    checks = command("all-checks", "run the acceptance checks", gamma=False)
    _add_grid(checks)
    checks.add_argument("--gamma", dest="gammas", type=float, nargs="+", default=[0.5, 1.0])
    checks.add_argument("--t-values", type=float, nargs="+", default=[0.0, 0.05])
    checks.add_argument("--groups", nargs="+", choices=list(ALL_GROUPS), default=list(ALL_GROUPS))
    checks.add_argument("--n", type=int, default=200)
    checks.add_argument("--trials", type=int, default=5000)
    checks.add_argument("--seed", type=int, default=0)
    return parser


def _emit(cfg: RunConfig, result: Result) -> None:
    as_json = cfg.format == "json" or result.json_only
    output = cfg.output
    if output is not None and not output.is_absolute() and output.parent == Path("."):
        directory = get_settings().output_dir
        if directory:
            output = Path(directory) / output
    if as_json:
        if output is None:
            sys.stdout.buffer.write(encode_json(result.payload()))
        else:
            write_json(output, result.payload())
    elif output is None:
        sys.stdout.buffer.write(format_csv(result.columns, result.rows, cfg.digits))
        if result.summary:
            sys.stderr.buffer.write(encode_json(result.meta))
    else:
        write_csv(output, result.columns, result.rows, cfg.digits)
        if result.summary:
            write_json(summary_path(output), result.meta)
    sys.stdout.flush()


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one subcommand and return the exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    values = {k: v for k, v in vars(args).items() if v is not None and k not in ("log_level", "workers")}
    settings = get_settings()
    configure_logging(args.log_level or settings.log_level)
    if args.workers is not None:
        if args.workers < 1:
            sys.stderr.write(f"{PROG}: --workers must be at least 1\n")
            return EXIT_INVALID
        os.environ["GINIBRE_WORKERS"] = str(args.workers)
    try:
        cfg = RunConfig(**values)
        LOGGER.info("running %s", cfg.subcommand)
        result = HANDLERS[cfg.subcommand](cfg)
        _emit(cfg, result)
    except (ValidationError, ParameterError) as exc:
        sys.stderr.write(f"{PROG}: invalid input: {exc}\n")
        return EXIT_INVALID
    except NumericalCheckError as exc:
        sys.stderr.write(f"{PROG}: check failed: {exc.check}: {exc}\n")
        return EXIT_CHECK
    if result.failed_check is not None:
        sys.stderr.write(f"{PROG}: check failed: {result.failed_check}\n")
        return EXIT_CHECK
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
