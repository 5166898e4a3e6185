import math

import numpy as np
import pytest

from shared.configuration import DEFAULT_CONFIG
from shared.exceptions import ParameterError
from shared.quadrature import (
    ContourShape,
    corrected_trapezoid,
    corrected_trapezoid_cumulative,
    gauss_legendre_panels,
    rational_grid,
    real_line_grid,
    shifted_line_grid,
    sigma_a_grid,
)


def test_gauss_legendre_panels_exact_for_polynomials() -> None:
    nodes, weights = gauss_legendre_panels([0.0, 1.0, 3.0], [0.5, 1.0], 4)
    assert np.all(np.diff(nodes.real) > 0)
    value = np.dot(nodes**7, weights)
    assert abs(value - 3.0**8 / 8) < 1e-9


def test_gauss_legendre_panels_along_a_slanted_segment() -> None:
    nodes, weights = gauss_legendre_panels([0.0, 1.0 + 1.0j], [1.0], 8)
    assert abs(np.sum(weights) - (1.0 + 1.0j)) < 1e-14


@pytest.mark.parametrize("graded", [False, True])
def test_real_line_grid_integrates_gaussian(graded: bool) -> None:
    grid = real_line_grid(DEFAULT_CONFIG, graded=graded)
    assert grid.shape is ContourShape.REAL_LINE
    value = grid.integrate(np.exp(-(grid.nodes**2) / 2))
    assert abs(value - math.sqrt(2 * math.pi)) < 1e-12


def test_real_line_grid_with_tails_covers_algebraic_decay() -> None:
    grid = real_line_grid(DEFAULT_CONFIG, tails=True)
    assert grid.truncation == math.inf
    value = grid.integrate(1 / (1 + grid.nodes**2))
    assert abs(value - math.pi) < 1e-10


def test_sigma_a_grid_passes_below_origin() -> None:
    grid = sigma_a_grid(1.0)
    assert grid.shape is ContourShape.SIGMA_A
    assert np.min(grid.nodes.imag) == pytest.approx(-0.25, abs=1e-2)
    # analytic integrand: deforming the contour does not change the integral
    value = grid.integrate(np.exp(-(grid.nodes**2) / 2))
    assert abs(value - math.sqrt(2 * math.pi)) < 1e-12


def test_sigma_a_grid_rejects_nonpositive_a() -> None:
    with pytest.raises(ParameterError):
        sigma_a_grid(0.0)


def test_shifted_line_grid() -> None:
    grid = shifted_line_grid(0.5)
    assert np.allclose(grid.nodes.imag, 0.5)
    value = grid.integrate(np.exp(-(grid.nodes**2) / 2))
    assert abs(value - math.sqrt(2 * math.pi)) < 1e-12


def test_rational_grid_nodes_are_ordered_and_finite() -> None:
    grid = rational_grid(1024, 6.0)
    assert grid.shape is ContourShape.RATIONAL
    assert np.all(np.diff(grid.nodes.real) > 0)
    assert np.all(np.isfinite(grid.nodes))


@pytest.mark.parametrize("size", [7, 6, 9])
def test_rational_grid_rejects_bad_sizes(size: int) -> None:
    with pytest.raises(ParameterError):
        rational_grid(size, 6.0)


def test_corrected_trapezoid_exact_for_cubics_on_uneven_grid() -> None:
    x = np.array([-1.0, -0.3, 0.2, 0.25, 1.1, 2.0])
    f = x**3 - 2 * x + 1
    df = 3 * x**2 - 2
    exact = (2.0**4 / 4 - 2.0**2 + 2.0) - (1 / 4 - 1 - 1)
    assert corrected_trapezoid(x, f, df) == pytest.approx(exact, abs=1e-13)


def test_corrected_trapezoid_cumulative_runs_to_the_right_end() -> None:
    x = np.linspace(0.0, 2.0, 21)
    values = corrected_trapezoid_cumulative(x, np.cos(x), -np.sin(x))
    assert values[-1] == 0.0
    assert np.allclose(values, np.sin(2.0) - np.sin(x), atol=1e-6)


def test_corrected_trapezoid_rejects_unordered_grid() -> None:
    with pytest.raises(ParameterError):
        corrected_trapezoid(np.array([0.0, 0.0, 1.0]), np.zeros(3), np.zeros(3))
