"""Distribution, conserved quantities and tail models on one gamma = 1 table."""

import numpy as np
import pytest

from ginibre.asymptotics import tail_model, verify_table
from ginibre.conserved import M_LIMIT_TOL, compute_conserved, default_x_grid, invariance_check, m_limit_check
from ginibre.distribution import distribution_table, tail_fit
from ginibre.models import GammaParam, PotentialTable
from ginibre.rhp import potential_table
from ginibre.scattering import T1_OF_1

pytestmark = pytest.mark.slow

ONE = GammaParam(gamma=1.0)


@pytest.fixture(scope="module")
def table() -> PotentialTable:
    return potential_table(ONE, default_x_grid(ONE))


def test_table_is_complete(table: PotentialTable) -> None:
    assert table.ok
    assert table.x[0] <= -9.0 and table.x[-1] == 10.0
    assert np.max(table.residual) < 1e-8


def test_left_tail_follows_the_model(table: PotentialTable) -> None:
    residuals = verify_table(table, tail_model(ONE))
    window = (residuals.x >= -9.0) & (residuals.x <= -6.0)
    for column in (
        residuals.q_residual,
        residuals.int_q2_residual,
        residuals.int_q_residual,
        residuals.relation_residual,
    ):
        assert np.max(np.abs(column[window])) < 1e-5


def test_distribution_forms_and_tail(table: PotentialTable) -> None:
    q_form = distribution_table(ONE, table)
    u_form = distribution_table(ONE, table, route="u_form")
    assert np.all(np.diff(q_form.f_values) >= -1e-10)
    assert 0.0 < q_form.f_values[0] and q_form.f_values[-1] <= 1.0 + 1e-10
    np.testing.assert_allclose(u_form.f_values, q_form.f_values, atol=1e-6)
    slope, offset = tail_fit(q_form)
    assert slope == pytest.approx(T1_OF_1 / 2, abs=1e-4)
    conserved = compute_conserved(table, ONE)
    assert conserved.m is not None
    # K(1) = M(1), and ln F ~ T1 s/2 - K(1)/2 on the left tail
    assert conserved.k == pytest.approx(conserved.m, abs=1e-3)
    assert -2 * offset == pytest.approx(conserved.m, abs=1e-3)


def test_conserved_quantities_do_not_move() -> None:
    report = invariance_check(ONE, [0.0, 0.05], workers=None)
    assert len(report.sets) == 2
    for name in ("h", "k", "n", "m"):
        assert report.spreads[name] < 1e-3


def test_m_near_one_approaches_m_of_one(table: PotentialTable) -> None:
    m_one = compute_conserved(table, ONE).m
    assert m_one is not None
    limit = m_limit_check(GammaParam(gamma=1 - 1e-4), m_one)
    assert limit["gap"] < M_LIMIT_TOL
    assert limit["m_one"] == m_one
