"""Monte Carlo sampling of the largest real eigenvalue of real Ginibre matrices."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from ginibre.models import DistributionTable, DkwReport, EmpiricalCdf, McConfig
from shared.exceptions import EigenFailure, ParameterError, SupportMismatch
from shared.settings import get_settings

LOGGER = logging.getLogger(__name__)

PAIR_TOL = 1e-6
SUPPORT_FRACTION = 0.01
CHUNK = 64

# (shifted max or -inf, number of real eigenvalues), or None for a failed trial
Trial = Optional[tuple[float, int]]


def _one_trial(n: int, tol: float, seed: np.random.SeedSequence) -> tuple[float, int]:
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((n, n))
    try:
        eigenvalues = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    real = np.abs(eigenvalues.imag) < tol
    upper = np.sort_complex(eigenvalues[~real & (eigenvalues.imag > 0)])
    lower = np.sort_complex(np.conj(eigenvalues[~real & (eigenvalues.imag < 0)]))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if upper.size != lower.size or (upper.size and np.max(np.abs(upper - lower)) > PAIR_TOL * scale):
        raise EigenFailure("non-real eigenvalues are not in conjugate pairs")
    count = int(np.count_nonzero(real))
    if count == 0:
        return -math.inf, 0
    return float(np.max(eigenvalues.real[real])) - math.sqrt(n), count


def _run_chunk(args: tuple[int, float, list[np.random.SeedSequence]]) -> list[Trial]:
    n, tol, seeds = args
    out: list[Trial] = []
    for seed in seeds:
        try:
            out.append(_one_trial(n, tol, seed))
        except EigenFailure as exc:
            LOGGER.debug("trial excluded: %s", exc)
            out.append(None)
    return out


def sample_max_real_eig(cfg: McConfig, workers: Optional[int] = None) -> EmpiricalCdf:
    """Sample `cfg.trials` matrices and return the law of max real eigenvalue - sqrt(n).

    Trial i draws from stream i of SeedSequence(seed).spawn(trials), so the result does
    not depend on the number of workers. Trials without a real eigenvalue are kept as
    -inf; trials whose eigenvalue computation fails are excluded and counted.
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    jobs = [(cfg.n, cfg.tolerance, seeds[i : i + CHUNK]) for i in range(0, cfg.trials, CHUNK)]
    workers = workers or get_settings().workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, jobs))
    else:
        chunks = [_run_chunk(job) for job in jobs]
    trials = [trial for chunk in chunks for trial in chunk]
    kept = [trial for trial in trials if trial is not None]
    failed = len(trials) - len(kept)
    if failed:
        LOGGER.warning("%d of %d trials excluded after eigenvalue failures", failed, len(trials))
    if not kept:
        raise EigenFailure("every trial failed")
    values = np.array([value for value, _ in kept])
    counts = np.array([count for _, count in kept], dtype=int)
    no_real = int(np.count_nonzero(counts == 0))
    if no_real:
        LOGGER.info("%d trials had no real eigenvalue", no_real)
    return EmpiricalCdf.from_samples(values, no_real=no_real, failed=failed, real_counts=counts)


def empirical_as_table(emp: EmpiricalCdf) -> DistributionTable:
    """Return the empirical CDF sampled at its distinct finite jump points."""
    finite = emp.samples[np.isfinite(emp.samples)]
    s = np.unique(finite)
    return DistributionTable(gamma=1.0, s_values=s, f_values=emp.evaluate(s), route="empirical")


def ks_distance(emp: EmpiricalCdf, table: DistributionTable) -> float:
    """Return sup |F_emp(s) - F(s)| over the jump points of F_emp and the nodes of F.

    Both functions are compared by their right-continuous values.

    Raises:
        SupportMismatch: More than 1% of the samples lie outside the table's s-range.
    """
    lo, hi = float(table.s_values[0]), float(table.s_values[-1])
    outside = float(np.mean((emp.samples < lo) | (emp.samples > hi)))
    if outside > SUPPORT_FRACTION:
        raise SupportMismatch(
            f"{outside:.2%} of samples outside the table range [{lo}, {hi}]",
            measured=outside,
            limit=SUPPORT_FRACTION,
        )
    points = np.union1d(emp.samples[np.isfinite(emp.samples)], table.s_values)
    return float(np.max(np.abs(emp.evaluate(points) - table.evaluate(points))))


def dkw_band(
    emp: EmpiricalCdf,
    alpha: float = 0.01,
    table: Optional[DistributionTable] = None,
    s_range: tuple[float, float] = (-4.0, 2.0),
) -> DkwReport:
    """Return the DKW half-width at level 1 - alpha and, given F, whether F stays in the band."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    epsilon = math.sqrt(math.log(2 / alpha) / (2 * emp.samples.size))
    if table is None:
        return DkwReport(alpha=alpha, epsilon=epsilon)
    s = np.linspace(s_range[0], s_range[1], 601)
    worst = float(np.max(np.abs(emp.evaluate(s) - table.evaluate(s))))
    return DkwReport(alpha=alpha, epsilon=epsilon, worst=worst, contains=worst <= epsilon)


def inverse_cdf_samples(table: DistributionTable, size: int, seed: int = 0) -> np.ndarray:
    """Draw from the distribution tabulated in `table` by inverting the interpolated CDF."""
    rng = np.random.default_rng(seed)
    f = np.maximum.accumulate(table.f_values)
    keep = np.concatenate([[True], np.diff(f) > 0])
    return np.interp(rng.uniform(0.0, 1.0, size), f[keep], table.s_values[keep])
