"""Conserved quantities H, K, N and M of the potentials.

    H = 3 int u^2,   K = int x u + H t,   N = 3 int (q^4 + q_x^2),
    M = int x q^2 + N t - 1/2 ln|ln gamma| - ln 2                    (gamma < 1),
    M(1) = int_-inf^a (z q^2 - 1/z) + int_a^inf z q^2 + N t + ln|a| + 3/2 ln 2 - 1.

Integrals over a table use the derivative-corrected trapezoid rule; the part left of
the table is the integral of the closed-form tail model.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from ginibre.asymptotics import q_model, qx_model, tail_model
from ginibre.models import ConservedSet, GammaParam, InvarianceReport, PotentialTable, TailModel
from ginibre.rhp import potential_table
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import ParameterError, SplitInconsistency, TailDivergence
from shared.quadrature import corrected_trapezoid

LOGGER = logging.getLogger(__name__)

ANCHOR = -6.0
CHECK_ANCHOR = -8.0
ANCHOR_TOL = 1e-5
STEP = 0.05
# |R(k)| below which radiation is ignored, and the slack kept left of its front
RADIATION_TOL = 1e-8
RADIATION_MARGIN = 4.0
LEFT_U_TOL = 1e-6
M_LIMIT_TOL = 1e-2


def radiation_front(p: GammaParam, t: float) -> float:
    """Return -12 k^2 |t| for the largest k with |R(k)| >= RADIATION_TOL.

    Waves of wave number k travel to x = -12 k^2 t; left of this front q(x, t) follows
    the t = 0 tail model up to O(t / x^2).
    """
    if p.trivial or t == 0.0:
        return 0.0
    k_squared = 4 * math.log(p.sqrt_gamma / RADIATION_TOL)
    return -12.0 * k_squared * abs(t)


def _left_end(p: GammaParam, t: float) -> float:
    return math.floor(radiation_front(p, t) - RADIATION_MARGIN)


def extend_for_time(x_grid: Sequence[float], p: GammaParam, t: float) -> np.ndarray:
    """Prepend nodes of the grid's first step until it reaches past the radiation front of t."""
    x = np.asarray(x_grid, dtype=float)
    if p.trivial or t == 0.0 or x[0] <= _left_end(p, t):
        return x
    if x.size < 2:
        raise ParameterError("cannot extend a grid with fewer than two nodes")
    step = float(x[1] - x[0])
    count = int(math.ceil((x[0] - _left_end(p, t)) / step - 1e-9))
    left = np.round(x[0] - step * np.arange(count, 0, -1), 10)
    return np.concatenate([left, x])


def default_x_grid(
    p: GammaParam,
    x_max: float = 10.0,
    config: BaseConfiguration = DEFAULT_CONFIG,
    *,
    x_min: float = -10.0,
    step: float = STEP,
    t: float = 0.0,
) -> np.ndarray:
    """Grid of the given step from min(x_min, floor(valid_from) - 4) to x_max.

    For t != 0 the left end moves past the radiation front. With an integer x_min and
    a step dividing 1 the anchors -6 and -8 are nodes.
    """
    if step <= 0 or x_max <= x_min:
        raise ParameterError(f"bad grid: [{x_min}, {x_max}] with step {step}")
    if not p.trivial:
        x_min = min(x_min, math.floor(tail_model(p, config).valid_from) - 4.0, _left_end(p, t))
    count = int(round((x_max - x_min) / step))
    return np.round(x_min + step * np.arange(count + 1), 10)


def _left_tail(fn: Callable[[float], float], x_min: float) -> float:
    value, _ = quad(fn, -np.inf, x_min, limit=200, epsabs=1e-14, epsrel=1e-11)
    return float(value)


def _check_tail(table: PotentialTable, m: TailModel) -> None:
    x_min = float(table.x[0])
    if x_min > m.valid_from:
        raise TailDivergence(
            f"table starts at x={x_min}, right of the model range x <= {m.valid_from:.3f}",
            measured=x_min,
            limit=m.valid_from,
        )
    expected = q_model(x_min, m)
    gap = abs(float(table.q[0]) - expected)
    limit = 1e-3 * abs(expected) + 1e-9
    if not gap <= limit:
        raise TailDivergence(f"q at x={x_min} does not follow the tail model", measured=gap, limit=limit)
    if table.t == 0.0:
        return
    u_gap = abs(float(table.q[0] ** 2 - table.q_x[0]) - (expected**2 - qx_model(x_min, m)))
    if not u_gap <= LEFT_U_TOL:
        raise TailDivergence(
            f"radiation at t={table.t} reaches the left end x={x_min}", measured=u_gap, limit=LEFT_U_TOL
        )


def _index(x: np.ndarray, value: float) -> int:
    hits = np.nonzero(np.isclose(x, value, rtol=0.0, atol=1e-9))[0]
    if hits.size == 0:
        raise ParameterError(f"anchor x={value} is not a node of the table")
    return int(hits[0])


def _m_one(table: PotentialTable, m: TailModel, anchor: float, n: float) -> float:
    x, q, q_x = table.x, table.q, table.q_x
    split = _index(x, anchor)
    left = slice(0, split + 1)
    right = slice(split, None)
    regular = corrected_trapezoid(
        x[left],
        x[left] * q[left] ** 2 - 1 / x[left],
        q[left] ** 2 + 2 * x[left] * q[left] * q_x[left] + 1 / x[left] ** 2,
    )
    plain = corrected_trapezoid(x[right], x[right] * q[right] ** 2, q[right] ** 2 + 2 * x[right] * q[right] * q_x[right])
    tail = _left_tail(lambda z: z * q_model(z, m) ** 2 - 1 / z, float(x[0]))
    return regular + tail + plain + n * table.t + math.log(abs(anchor)) + 1.5 * math.log(2.0) - 1.0


def compute_conserved(
    table: PotentialTable,
    p: GammaParam,
    config: BaseConfiguration = DEFAULT_CONFIG,
    *,
    anchor: float = ANCHOR,
    check_anchor: Optional[float] = CHECK_ANCHOR,
) -> ConservedSet:
    """Compute H, K, N and M at the time of `table`.

    Raises:
        TailDivergence: The table does not reach the range of the left-tail model, or
            q at its left end does not follow the model.
        SplitInconsistency: M(1) differs between the two anchors by more than 1e-5.
    """
    if p.trivial:
        return ConservedSet(gamma=p.gamma, t=table.t, h=0.0, k=0.0, n=0.0)
    if not table.ok:
        raise ParameterError(f"potential table has {len(table.failures)} failed rows")
    m = tail_model(p, config)
    _check_tail(table, m)
    x, q, q_x, q_xx = table.x, table.q, table.q_x, table.q_xx
    u = q**2 - q_x
    u_x = 2 * q * q_x - q_xx
    x_min = float(x[0])

    def u_model(z: float) -> float:
        return q_model(z, m) ** 2 - qx_model(z, m)

    h = 3 * (corrected_trapezoid(x, u**2, 2 * u * u_x) + _left_tail(lambda z: u_model(z) ** 2, x_min))
    k = (
        corrected_trapezoid(x, x * u, u + x * u_x)
        + _left_tail(lambda z: z * u_model(z), x_min)
        + h * table.t
    )
    n = 3 * (
        corrected_trapezoid(x, q**4 + q_x**2, 4 * q**3 * q_x + 2 * q_x * q_xx)
        + _left_tail(lambda z: q_model(z, m) ** 4 + qx_model(z, m) ** 2, x_min)
    )
    if p.is_one:
        value = _m_one(table, m, anchor, n)
        if check_anchor is not None:
            other = _m_one(table, m, check_anchor, n)
            if abs(value - other) > ANCHOR_TOL:
                raise SplitInconsistency(
                    f"M(1) depends on the anchor ({anchor} vs {check_anchor})",
                    measured=abs(value - other),
                    limit=ANCHOR_TOL,
                )
        return ConservedSet(gamma=p.gamma, t=table.t, h=h, k=k, n=n, m=value, m_anchor_x=anchor)
    weighted = corrected_trapezoid(x, x * q**2, q**2 + 2 * x * q * q_x)
    tail = _left_tail(lambda z: z * q_model(z, m) ** 2, x_min)
    value = weighted + tail + n * table.t - 0.5 * math.log(abs(math.log(p.gamma))) - math.log(2.0)
    return ConservedSet(gamma=p.gamma, t=table.t, h=h, k=k, n=n, m=value)


def invariance_check(
    p: GammaParam,
    t_values: Sequence[float],
    x_grid: Optional[Sequence[float]] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
    workers: Optional[int] = None,
) -> InvarianceReport:
    """Recompute the conserved set at each t and report the spread of each quantity."""
    if any(abs(t) > 0.1 for t in t_values):
        raise ParameterError("times must lie in [-0.1, 0.1]")
    grid = default_x_grid(p, config=config) if x_grid is None else np.asarray(x_grid, dtype=float)
    grid = extend_for_time(grid, p, max((abs(t) for t in t_values), default=0.0))
    sets = []
    for t in t_values:
        table = potential_table(p, grid, t=float(t), config=config, workers=workers)
        sets.append(compute_conserved(table, p, config))
        LOGGER.info("gamma=%s t=%s: %s", p.gamma, t, sets[-1])
    spreads = {}
    for name in ("h", "k", "n", "m"):
        values = [getattr(s, name) for s in sets if getattr(s, name) is not None]
        spreads[name] = float(max(values) - min(values)) if values else 0.0
    return InvarianceReport(gamma=p.gamma, sets=sets, spreads=spreads)


def lemma_boundary_term(x: float, q: float, q_x: float, q_xx: float) -> float:
    """Return x (3 q^4 - 2 q q_xx + q_x^2) + 2 q q_x."""
    return x * (3 * q**4 - 2 * q * q_xx + q_x**2) + 2 * q * q_x


def boundary_terms(table: PotentialTable, points: Sequence[float] = (-10.0, 10.0)) -> dict[float, float]:
    """Evaluate the boundary term at the table rows closest to `points`."""
    out = {}
    for point in points:
        i = int(np.argmin(np.abs(table.x - point)))
        out[float(table.x[i])] = lemma_boundary_term(
            float(table.x[i]), float(table.q[i]), float(table.q_x[i]), float(table.q_xx[i])
        )
    return out


def m_limit_check(
    p_near_one: GammaParam,
    m_one: float,
    config: BaseConfiguration = DEFAULT_CONFIG,
    workers: Optional[int] = None,
) -> dict[str, float]:
    """Compare M(gamma) for gamma close to 1 with M(1)."""
    if p_near_one.trivial or p_near_one.is_one:
        raise ParameterError("m_limit_check needs gamma in (0, 1)")
    table = potential_table(p_near_one, default_x_grid(p_near_one, config=config), config=config, workers=workers)
    value = compute_conserved(table, p_near_one, config).m
    assert value is not None
    gap = abs(value - m_one)
    LOGGER.info("M(%s)=%.8f, M(1)=%.8f, gap %.2e", p_near_one.gamma, value, m_one, gap)
    return {"gamma": p_near_one.gamma, "m_gamma": value, "m_one": m_one, "gap": gap}
