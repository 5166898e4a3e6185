import math
from typing import Callable

import numpy as np
import pytest
from scipy.special import erfc

from ginibre.distribution import (
    QForm,
    UForm,
    distribution_table,
    f_of_s,
    f_of_s_uform,
    sigma_of_s,
    tail_fit,
    tail_residuals,
    with_tail_fit,
)
from ginibre.models import DistributionTable, GammaParam, PotentialTable
from shared.exceptions import FitResidualTooLarge, ParameterError

C, B = 1.0, 1.0
X = np.round(np.linspace(-4.0, 6.0, 501), 10)


def _closed_form(x: float) -> float:
    """F(2x) for gamma = 1 and q = C exp(-B x^2)."""
    sigma = C * math.sqrt(math.pi / B) / 2 * erfc(math.sqrt(B) * x)
    weighted = C**2 * (
        math.exp(-2 * B * x * x) / (4 * B)
        - x * math.sqrt(math.pi / (2 * B)) / 2 * erfc(math.sqrt(2 * B) * x)
    )
    return math.exp(-0.5 * weighted - 0.5 * sigma)


@pytest.fixture
def table(make_gaussian_table: Callable[..., PotentialTable]) -> PotentialTable:
    return make_gaussian_table(1.0, X, C, B)


@pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 0.5, 2.0])
def test_q_form_matches_closed_form(table: PotentialTable, x: float) -> None:
    p = GammaParam(gamma=1.0)
    assert f_of_s(2 * x, p, table) == pytest.approx(_closed_form(x), abs=1e-6)


def test_u_form_agrees_with_q_form(table: PotentialTable) -> None:
    p = GammaParam(gamma=1.0)
    s = np.array([-6.0, -2.0, 0.0, 1.0, 4.0])
    q_values = QForm(p, table).f_half(s / 2)
    u_values = UForm(table).f_half(s / 2)
    np.testing.assert_allclose(u_values, q_values, atol=1e-6)
    assert f_of_s_uform(0.0, table) == pytest.approx(float(q_values[2]), abs=1e-6)


def test_sigma_interpolates_int_q(table: PotentialTable) -> None:
    p = GammaParam(gamma=1.0)
    assert sigma_of_s(0.0, p, table) == pytest.approx(math.sqrt(math.pi) / 2, abs=1e-10)
    assert sigma_of_s(0.0, GammaParam(gamma=0.0), table) == 0.0


def test_distribution_table_is_monotone(table: PotentialTable) -> None:
    dist = distribution_table(GammaParam(gamma=1.0), table)
    np.testing.assert_allclose(dist.s_values, 2 * X)
    assert np.all(np.diff(dist.f_values) >= -1e-12)
    assert dist.f_values[-1] == pytest.approx(1.0, abs=1e-10)
    assert dist.route == "q_form"


def test_trivial_gamma_gives_ones(table: PotentialTable) -> None:
    p = GammaParam(gamma=0.0)
    dist = distribution_table(p, table, s_values=[-3.0, 0.0, 3.0])
    np.testing.assert_array_equal(dist.f_values, np.ones(3))
    assert f_of_s(-5.0, p, table) == 1.0


def test_gamma_mismatch_and_u_form_restriction(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    half = make_gaussian_table(0.5, X, C, B)
    with pytest.raises(ParameterError):
        QForm(GammaParam(gamma=1.0), half)
    with pytest.raises(ParameterError):
        UForm(half)


def _line_table(slope: float, offset: float, bend: float = 0.0) -> DistributionTable:
    s = np.linspace(-20.0, 0.0, 201)
    return DistributionTable(gamma=1.0, s_values=s, f_values=np.exp(slope * s + offset + bend * s**2))


def test_tail_fit_recovers_line() -> None:
    slope, offset = tail_fit(_line_table(0.52, -0.3))
    assert slope == pytest.approx(0.52, abs=1e-10)
    assert offset == pytest.approx(-0.3, abs=1e-9)
    fitted = with_tail_fit(_line_table(0.52, -0.3))
    assert fitted.tail_slope == pytest.approx(0.52, abs=1e-10)
    residuals = tail_residuals(fitted, slope, offset)
    assert np.max(np.abs(residuals)) < 1e-9


def test_tail_fit_rejects_curvature() -> None:
    with pytest.raises(FitResidualTooLarge):
        tail_fit(_line_table(0.5, 0.0, bend=0.01))


def test_tail_fit_needs_ten_points() -> None:
    s = np.linspace(-9.0, 0.0, 10)
    with pytest.raises(ParameterError):
        tail_fit(DistributionTable(gamma=1.0, s_values=s, f_values=np.exp(s)))
