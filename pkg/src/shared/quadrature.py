"""Quadrature grids on the real line and on deformed contours.

Functions:
    gauss_legendre_panels: Composite Gauss-Legendre rule along a polyline.
    real_line_grid: Real line, optionally graded towards s = 0.
    sigma_a_grid: The contour that dips below the origin through -ia/4.
    shifted_line_grid: A horizontal line Im s = shift.
    rational_grid: Moebius-mapped trapezoid rule used by the Riemann-Hilbert solver.
    corrected_trapezoid: Sampled integral using derivative values at the nodes.
"""

from __future__ import annotations

import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import roots_legendre

from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import MethodDisagreement, ParameterError

LOGGER = logging.getLogger(__name__)

SELF_TEST_TOL = 1e-12


class ContourShape(str, Enum):
    """Kinds of integration contour."""

    REAL_LINE = "real_line"
    SIGMA_A = "sigma_a"
    SHIFTED = "shifted"
    RATIONAL = "rational"


class ContourGrid(BaseModel):
    """Quadrature nodes and weights on an oriented contour.

    Nodes are ordered along the orientation of the contour, left to right for the
    real line and for horizontal lines. Construction integrates exp(-s^2) over the
    whole contour and rejects the grid if the result misses sqrt(pi).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    nodes: np.ndarray = Field(description="Complex quadrature nodes.")
    weights: np.ndarray = Field(description="Complex quadrature weights (ds included).")
    truncation: float = Field(
        description="Half-width of the |Re s| range covered by panels (inf when tails are mapped)."
    )
    shape: ContourShape = Field(description="Kind of contour.")
    a: Optional[float] = Field(default=None, description="Layer parameter for Sigma_a.")
    shift: float = Field(default=0.0, description="Imaginary offset for horizontal lines.")
    scale: Optional[float] = Field(default=None, description="Moebius scale for rational grids.")

    @model_validator(mode="after")
    def _self_test(self) -> "ContourGrid":
        if self.nodes.shape != self.weights.shape:
            raise ParameterError("nodes and weights must have the same shape")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        value = self.integrate(np.exp(-(self.nodes**2)))
        error = abs(value - math.sqrt(math.pi)) / math.sqrt(math.pi)
        if error > SELF_TEST_TOL:
            raise MethodDisagreement(
                f"{self.shape.value} grid fails the Gaussian self-test",
                measured=error,
                limit=SELF_TEST_TOL,
            )
        return self

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values: np.ndarray) -> complex:
        """Apply the rule along the last axis of `values`."""
        return np.dot(values, self.weights)

    def distance_to(self, k: complex) -> float:
        """Distance from k to the nearest node (a proxy for the distance to the contour)."""
        return float(np.min(np.abs(self.nodes - k)))


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    return x, w


def gauss_legendre_panels(
    vertices: Sequence[complex], widths: Sequence[float], order: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule along the polyline through `vertices`.

    Args:
        vertices: Polyline vertices in orientation order.
        widths: Largest panel length for each segment (one entry per segment).
        order: Points per panel.

    Returns:
        Tuple of (nodes, weights) as complex arrays in orientation order.
    """
    x, w = _legendre(order)
    nodes, weights = [], []
    for z0, z1, width in zip(vertices[:-1], vertices[1:], widths):
        count = max(1, math.ceil(abs(z1 - z0) / width - 1e-12))
        ends = z0 + (z1 - z0) * np.linspace(0.0, 1.0, count + 1)
        for p0, p1 in zip(ends[:-1], ends[1:]):
            half = (p1 - p0) / 2
            nodes.append((p0 + p1) / 2 + half * x)
            weights.append(half * w)
    return np.concatenate(nodes).astype(complex), np.concatenate(weights).astype(complex)


def _tail(anchor: float, shift: float, order: int, right: bool) -> tuple[np.ndarray, np.ndarray]:
    # s = +-anchor/tau + i*shift with tau in (0, 1]; two panels in tau
    x, w = _legendre(order)
    taus, tau_w = [], []
    for t0, t1 in ((0.0, 0.5), (0.5, 1.0)):
        taus.append((t0 + t1) / 2 + (t1 - t0) / 2 * x)
        tau_w.append((t1 - t0) / 2 * w)
    tau = np.concatenate(taus)
    wt = np.concatenate(tau_w) * anchor / tau**2
    if right:
        tau, wt = tau[::-1], wt[::-1]
        return anchor / tau + 1j * shift, wt.astype(complex)
    return -anchor / tau + 1j * shift, wt.astype(complex)


def _with_tails(
    nodes: np.ndarray, weights: np.ndarray, anchor: float, shift: float, order: int
) -> tuple[np.ndarray, np.ndarray]:
    ln, lw = _tail(anchor, shift, order, right=False)
    rn, rw = _tail(anchor, shift, order, right=True)
    return np.concatenate([ln, nodes, rn]), np.concatenate([lw, weights, rw])


def _dyadic(start: float, stop: float, width: float) -> list[float]:
    """Breakpoints from `start` > 0 doubling up to 1, then uniform up to `stop`."""
    points = [start]
    while points[-1] * 2 < min(1.0, stop):
        points.append(points[-1] * 2)
    edge = points[-1]
    count = max(1, math.ceil((stop - edge) / width - 1e-12))
    points.extend(edge + (stop - edge) * np.arange(1, count + 1) / count)
    return points


@lru_cache(maxsize=64)
def real_line_grid(
    config: BaseConfiguration = DEFAULT_CONFIG,
    *,
    truncation: Optional[float] = None,
    graded: bool = False,
    tails: bool = False,
    order: Optional[int] = None,
) -> ContourGrid:
    """Build a composite Gauss-Legendre grid on the real line.

    Args:
        config: Numerical configuration (truncation, panel order and width).
        truncation: Override of the half-width of the panel range.
        graded: Refine dyadically towards s = 0 (for integrands with a logarithmic
            singularity at or near the origin).
        tails: Append algebraic tails mapped onto (0, 1].
        order: Override of the panel order.

    Returns:
        The grid, ordered left to right.
    """
    cut = truncation or config.truncation
    order = order or config.panel_order
    if graded:
        smallest = 2.0 ** (-config.grading_depth)
        right = [0.0] + _dyadic(smallest, cut, config.panel_width)
    else:
        count = max(1, math.ceil(cut / config.panel_width))
        right = list(np.linspace(0.0, cut, count + 1))
    vertices = [-v for v in right[::-1]] + right[1:]
    nodes, weights = gauss_legendre_panels(
        vertices, [np.inf] * (len(vertices) - 1), order
    )
    if tails:
        nodes, weights = _with_tails(nodes, weights, cut, 0.0, order)
    return ContourGrid(
        nodes=nodes,
        weights=weights,
        truncation=math.inf if tails else cut,
        shape=ContourShape.REAL_LINE,
    )


@lru_cache(maxsize=64)
def sigma_a_grid(a: float, config: BaseConfiguration = DEFAULT_CONFIG) -> ContourGrid:
    """Build the grid on (-inf,-a/4) + (-a/4,-ia/4) + (-ia/4,a/4) + (a/4,+inf)."""
    if a <= 0:
        raise ParameterError(f"layer parameter a must be positive, got {a}")
    cut = max(config.truncation, a)
    quarter = a / 4
    leg = min(config.panel_width, a / 8)
    right = _dyadic(quarter, cut, config.panel_width)
    left = [-v for v in right[::-1]]
    vertices = left + [-1j * quarter] + right
    widths = [np.inf] * (len(left) - 1) + [leg, leg] + [np.inf] * (len(right) - 1)
    nodes, weights = gauss_legendre_panels(vertices, widths, config.panel_order)
    nodes, weights = _with_tails(nodes, weights, cut, 0.0, config.panel_order)
    return ContourGrid(
        nodes=nodes,
        weights=weights,
        truncation=math.inf,
        shape=ContourShape.SIGMA_A,
        a=a,
    )


@lru_cache(maxsize=64)
def shifted_line_grid(
    shift: float, config: BaseConfiguration = DEFAULT_CONFIG
) -> ContourGrid:
    """Build the grid on the horizontal line Im s = shift, with algebraic tails."""
    cut = config.truncation
    width = min(config.panel_width, 0.5)
    count = math.ceil(2 * cut / width)
    vertices = list(np.linspace(-cut, cut, count + 1) + 1j * shift)
    nodes, weights = gauss_legendre_panels(
        vertices, [np.inf] * count, config.panel_order
    )
    nodes, weights = _with_tails(nodes, weights, cut, shift, config.panel_order)
    return ContourGrid(
        nodes=nodes,
        weights=weights,
        truncation=math.inf,
        shape=ContourShape.SHIFTED,
        shift=shift,
    )


@lru_cache(maxsize=16)
def rational_grid(size: int, scale: float) -> ContourGrid:
    """Trapezoid rule in the angle of the Moebius map s = -scale*cot(theta/2).

    Node j sits at theta_j = 2*pi*(j + 1/2)/size, so the nodes run from -inf to
    +inf and the point at infinity (theta = 0) is never a node.
    """
    if size < 8 or size % 2:
        raise ParameterError(f"rational grid size must be even and >= 8, got {size}")
    theta = 2 * np.pi * (np.arange(size) + 0.5) / size
    nodes = -scale / np.tan(theta / 2)
    weights = (2 * np.pi / size) * scale / (2 * np.sin(theta / 2) ** 2)
    return ContourGrid(
        nodes=nodes.astype(complex),
        weights=weights.astype(complex),
        truncation=math.inf,
        shape=ContourShape.RATIONAL,
        scale=scale,
    )


def corrected_trapezoid_cumulative(x: np.ndarray, f: np.ndarray, df: np.ndarray) -> np.ndarray:
    """Return int_{x_i}^{x_last} f on a sampled grid, with the derivative end correction.

    Each interval uses h/2 (f_i + f_{i+1}) - h^2/12 (f'_{i+1} - f'_i), which is exact
    for cubics, so the grid may be non-uniform.
    """
    x, f, df = (np.asarray(v, dtype=float) for v in (x, f, df))
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise ParameterError("grid must be strictly increasing with at least two points")
    h = np.diff(x)
    pieces = h / 2 * (f[:-1] + f[1:]) - h**2 / 12 * (df[1:] - df[:-1])
    return np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])


def corrected_trapezoid(x: np.ndarray, f: np.ndarray, df: np.ndarray) -> float:
    """Return int_{x_0}^{x_last} f with the derivative end correction."""
    return float(corrected_trapezoid_cumulative(x, f, df)[0])
