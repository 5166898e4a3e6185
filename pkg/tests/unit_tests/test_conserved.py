import math
from typing import Callable

import numpy as np
import pytest

from ginibre.conserved import (
    boundary_terms,
    compute_conserved,
    default_x_grid,
    extend_for_time,
    invariance_check,
    lemma_boundary_term,
    m_limit_check,
    radiation_front,
)
from ginibre.models import GammaParam, PotentialTable
from ginibre.scattering import L1_OF_1
from shared.exceptions import ParameterError, TailDivergence


def test_lemma_boundary_term() -> None:
    assert lemma_boundary_term(1.0, 1.0, 0.0, 0.0) == pytest.approx(3.0)
    assert lemma_boundary_term(2.0, 0.5, 1.0, 2.0) == pytest.approx(-0.625)


def test_boundary_terms_use_nearest_rows(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    x = np.round(np.linspace(-3.0, 3.0, 61), 10)
    table = make_gaussian_table(0.5, x, 1.0, 1.0)
    terms = boundary_terms(table, points=(-10.0, 0.53))
    assert sorted(terms) == [-3.0, 0.5]
    i = 35
    expected = lemma_boundary_term(x[i], table.q[i], table.q_x[i], table.q_xx[i])
    assert terms[0.5] == pytest.approx(expected)


def test_default_grid_for_trivial_gamma() -> None:
    grid = default_x_grid(GammaParam(gamma=0.0))
    assert grid[0] == -10.0 and grid[-1] == 10.0
    assert grid.size == 401
    assert np.any(grid == -6.0) and np.any(grid == -8.0)


@pytest.mark.parametrize("kwargs", [{"step": 0.0}, {"step": -0.1}, {"x_min": 5.0, "x_max": 5.0}])
def test_default_grid_rejects_bad_ranges(kwargs: dict) -> None:
    with pytest.raises(ParameterError):
        default_x_grid(GammaParam(gamma=0.0), **kwargs)


def test_trivial_gamma_has_zero_conserved_set(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    x = np.linspace(-2.0, 2.0, 41)
    table = make_gaussian_table(0.0, x, 0.0, 1.0)
    conserved = compute_conserved(table, GammaParam(gamma=0.0))
    assert (conserved.h, conserved.k, conserved.n) == (0.0, 0.0, 0.0)


def test_table_short_of_the_tail_model_is_rejected(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    x = np.round(np.linspace(-4.0, 4.0, 81), 10)
    table = make_gaussian_table(1.0, x, 1.0, 1.0)
    with pytest.raises(TailDivergence):
        compute_conserved(table, GammaParam(gamma=1.0))


def test_invariance_check_rejects_large_times() -> None:
    with pytest.raises(ParameterError):
        invariance_check(GammaParam(gamma=0.5), [0.0, 0.2])


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_m_limit_check_needs_interior_gamma(gamma: float) -> None:
    with pytest.raises(ParameterError):
        m_limit_check(GammaParam(gamma=gamma), 0.0)


def test_radiation_front() -> None:
    one = GammaParam(gamma=1.0)
    assert radiation_front(one, 0.0) == 0.0
    assert radiation_front(one, 0.05) == pytest.approx(-2.4 * math.log(1e8))
    assert radiation_front(one, -0.05) == radiation_front(one, 0.05)
    assert radiation_front(GammaParam(gamma=0.0), 0.05) == 0.0


def test_grid_is_extended_past_the_radiation_front() -> None:
    one = GammaParam(gamma=1.0)
    base = np.round(np.arange(-10.0, 10.0 + 0.025, 0.05), 10)
    np.testing.assert_array_equal(extend_for_time(base, one, 0.0), base)
    grid = extend_for_time(base, one, 0.05)
    assert grid[0] == -49.0
    np.testing.assert_allclose(np.diff(grid), 0.05, atol=1e-9)
    np.testing.assert_array_equal(grid[-base.size :], base)
    assert np.any(grid == -6.0) and np.any(grid == -8.0)


def _gamma_one_tail_table(t: float) -> PotentialTable:
    x = np.round(np.linspace(-20.0, 0.0, 401), 10)
    gap = L1_OF_1 - 2 * x
    q = 2 / gap
    q_x = 4 / gap**2
    return PotentialTable(
        gamma=1.0,
        t=t,
        x=x,
        q=q,
        q_x=q_x,
        q_xx=16 / gap**3,
        u=q**2 - q_x,
        a1=np.zeros_like(x),
        int_q=np.zeros_like(x),
        int_q2=np.zeros_like(x),
        int_u=np.zeros_like(x),
        residual=np.zeros_like(x),
    )


def test_radiation_at_the_left_end_is_rejected() -> None:
    table = _gamma_one_tail_table(0.05)
    q_x = table.q_x.copy()
    q_x[0] += 1e-3
    with pytest.raises(TailDivergence):
        compute_conserved(table.model_copy(update={"q_x": q_x}), GammaParam(gamma=1.0))
