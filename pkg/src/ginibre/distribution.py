"""The distribution F(s; gamma) assembled from potential tables.

F(2s) = exp(-1/2 int_s^inf (z - s) q^2 dz) sqrt(cosh sigma(s) - sqrt(gamma) sinh sigma(s)),
with sigma(s) = int_s^inf q. For gamma = 1 the same value is exp(-1/2 int_s^inf (z - s) u dz).
The weighted integrals are computed as int_s^inf (int_z^inf q^2) dz from the tail-integral
columns of the table; left of the table they are continued with the closed-form models.
"""

from __future__ import annotations

import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ginibre.asymptotics import intq2_increment, intq_increment, intu_increment, tail_model
from ginibre.models import DistributionTable, GammaParam, GlmTable, PotentialTable, TailModel
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import FitResidualTooLarge, NegativeRadicand, ParameterError
from shared.quadrature import corrected_trapezoid_cumulative

LOGGER = logging.getLogger(__name__)

TAIL_FIT_TOL = 1e-4
TAIL_FIT_EDGE = -8.0

Route = Literal["q_form", "u_form"]


class _RightIntegral:
    """int_s^{x_max} f for a sampled f with known derivative, continued left by a model."""

    def __init__(self, x: np.ndarray, f: np.ndarray, df: np.ndarray, left) -> None:
        self.x_min, self.x_max = float(x[0]), float(x[-1])
        values = corrected_trapezoid_cumulative(x, f, df)
        self._spline = CubicHermiteSpline(x, values, -f)
        self._left = left
        self._at_min = float(values[0])

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        inside = (s >= self.x_min) & (s <= self.x_max)
        out[inside] = self._spline(s[inside])
        for index in np.nonzero(s < self.x_min)[0]:
            out[index] = self._at_min + self._left(float(s[index]), self.x_min)
        return out


def _require_complete(x: np.ndarray, *columns: np.ndarray) -> None:
    if x.size < 3:
        raise ParameterError("potential table needs at least three rows")
    for column in columns:
        if not np.all(np.isfinite(column)):
            raise ParameterError("potential table has failed rows")


def _model(p: GammaParam, config: BaseConfiguration) -> Optional[TailModel]:
    return None if p.trivial else tail_model(p, config)


def _no_tail(s: float, anchor: float) -> float:
    return 0.0


class QForm:
    """sigma and the q^2-weighted integral of one potential table."""

    def __init__(self, p: GammaParam, table: PotentialTable, config: BaseConfiguration = DEFAULT_CONFIG) -> None:
        if not math.isclose(p.gamma, table.gamma):
            raise ParameterError(f"table is for gamma={table.gamma}, not {p.gamma}")
        x = np.asarray(table.x, dtype=float)
        _require_complete(x, table.q, table.q_x, table.int_q, table.int_q2)
        self.p = p
        m = _model(p, config)
        self.weighted = _RightIntegral(
            x,
            table.int_q2,
            -(table.q**2),
            (lambda s, a: intq2_increment(s, a, m)) if m else _no_tail,
        )
        self._sigma = CubicHermiteSpline(x, table.int_q, -table.q)
        self._sigma_min = float(table.int_q[0])
        self._x_min, self._x_max = float(x[0]), float(x[-1])
        self._m = m

    def sigma(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        inside = (s >= self._x_min) & (s <= self._x_max)
        out[inside] = self._sigma(s[inside])
        for index in np.nonzero(s < self._x_min)[0]:
            out[index] = self._sigma_min + intq_increment(float(s[index]), self._x_min, self._m)  # type: ignore[arg-type]
        return out

    def f_half(self, x: np.ndarray) -> np.ndarray:
        """Return F(2x)."""
        sigma = self.sigma(x)
        root = math.sqrt(self.p.gamma)
        radicand = 0.5 * ((1 - root) * np.exp(sigma) + (1 + root) * np.exp(-sigma))
        if np.any(radicand <= 0):
            worst = float(np.min(radicand))
            raise NegativeRadicand("cosh sigma - sqrt(gamma) sinh sigma <= 0", measured=worst, limit=0.0)
        return np.exp(-0.5 * self.weighted(x)) * np.sqrt(radicand)


class UForm:
    """The u-weighted integral of a gamma = 1 table, from the RHP or the GLM route."""

    def __init__(
        self,
        table: Union[PotentialTable, GlmTable],
        config: BaseConfiguration = DEFAULT_CONFIG,
    ) -> None:
        if table.gamma not in (0.0, 1.0):
            raise ParameterError("the u-only form of F holds for gamma = 1")
        x = np.asarray(table.x, dtype=float)
        if isinstance(table, GlmTable):
            int_u, u = 2 * table.k_plus_diag, table.u_glm
        else:
            int_u, u = table.int_u, table.u
        _require_complete(x, int_u, u)
        p = GammaParam(gamma=table.gamma)
        m = _model(p, config)
        self.weighted = _RightIntegral(
            x, int_u, -u, (lambda s, a: intu_increment(s, a, m)) if m else _no_tail
        )

    def f_half(self, x: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * self.weighted(x))


def sigma_of_s(
    s: float, p: GammaParam, table: PotentialTable, config: BaseConfiguration = DEFAULT_CONFIG
) -> float:
    """Return sigma(s) = int_s^inf q(x, 0) dx."""
    if p.trivial:
        return 0.0
    return float(QForm(p, table, config).sigma(s)[0])


def f_of_s(
    s: float, p: GammaParam, table: PotentialTable, config: BaseConfiguration = DEFAULT_CONFIG
) -> float:
    """Return F(s; gamma), evaluating the defining formula at s/2.

    Raises:
        NegativeRadicand: cosh sigma - sqrt(gamma) sinh sigma is not positive.
    """
    if p.trivial:
        return 1.0
    return float(QForm(p, table, config).f_half(s / 2)[0])


def f_of_s_uform(
    s: float, table: Union[PotentialTable, GlmTable], config: BaseConfiguration = DEFAULT_CONFIG
) -> float:
    """Return F(s; 1) = exp(-1/2 int_{s/2}^inf (z - s/2) u dz)."""
    return float(UForm(table, config).f_half(s / 2)[0])


def distribution_table(
    p: GammaParam,
    table: Union[PotentialTable, GlmTable],
    s_values: Optional[Sequence[float]] = None,
    route: Route = "q_form",
    config: BaseConfiguration = DEFAULT_CONFIG,
) -> DistributionTable:
    """Tabulate F(s; gamma) on `s_values` (default: twice the table's x-grid)."""
    s = 2 * np.asarray(table.x, dtype=float) if s_values is None else np.asarray(s_values, dtype=float)
    if p.trivial:
        return DistributionTable(gamma=p.gamma, s_values=s, f_values=np.ones_like(s), route=route)
    if route == "q_form":
        if not isinstance(table, PotentialTable):
            raise ParameterError("the q form needs a potential table")
        f = QForm(p, table, config).f_half(s / 2)
    else:
        f = UForm(table, config).f_half(s / 2)
    return DistributionTable(gamma=p.gamma, s_values=s, f_values=f, route=route)


def tail_fit(
    table: DistributionTable, s_edge: float = TAIL_FIT_EDGE, tol: float = TAIL_FIT_TOL
) -> tuple[float, float]:
    """Fit ln F = slope s + offset on s <= s_edge.

    Returns:
        (slope, offset); for gamma = 1 these estimate T1(1)/2 and -K(1)/2.

    Raises:
        FitResidualTooLarge: ln F deviates from the line by more than `tol`.
    """
    keep = (table.s_values <= s_edge) & (table.f_values > 0)
    if int(np.count_nonzero(keep)) < 10:
        raise ParameterError(f"tail fit needs at least 10 points with s <= {s_edge}")
    s = table.s_values[keep]
    log_f = np.log(table.f_values[keep])
    slope, offset = np.polyfit(s, log_f, 1)
    worst = float(np.max(np.abs(log_f - (slope * s + offset))))
    if worst > tol:
        raise FitResidualTooLarge("ln F is not linear on the left tail", measured=worst, limit=tol)
    LOGGER.info("tail fit gamma=%s: slope=%.8f offset=%.8f", table.gamma, slope, offset)
    return float(slope), float(offset)


def with_tail_fit(table: DistributionTable, s_edge: float = TAIL_FIT_EDGE) -> DistributionTable:
    slope, offset = tail_fit(table, s_edge)
    return table.model_copy(update={"tail_slope": slope, "tail_offset": offset})


def tail_residuals(table: DistributionTable, slope: float, offset: float) -> np.ndarray:
    """Return ln F - (slope s + offset) on the table grid."""
    with np.errstate(divide="ignore"):
        return np.log(table.f_values) - (slope * table.s_values + offset)
