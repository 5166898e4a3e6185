import numpy as np
import pytest

from ginibre.models import GammaParam, MatrixField
from ginibre.rhp import (
    build_jump,
    cauchy_plus,
    da1_dx_check,
    eval_m,
    int_q_from_zero,
    large_k_moment,
    potential_table,
    solve_sie,
)
from shared.exceptions import ParameterError, TruncationLeak
from shared.quadrature import rational_grid

ONE = GammaParam(gamma=1.0)
SAMPLE_K = np.array([0.5 + 0.5j, -1.0 + 0.3j, 2.0 + 1.0j, -0.7 - 0.4j, 1.5 - 2.0j])


def _field(values: np.ndarray, size: int) -> MatrixField:
    grid = rational_grid(size, 6.0)
    return MatrixField(grid=grid, values=np.repeat(values[:, None, None], 4, axis=1).reshape(size, 2, 2))


def test_cauchy_plus_reproduces_upper_analytic_functions() -> None:
    size = 1024
    s = rational_grid(size, 6.0).nodes
    f = 1 / (s + 1j) ** 8
    out = cauchy_plus(_field(f, size))
    np.testing.assert_allclose(out.values[:, 0, 0], f, atol=1e-10)
    np.testing.assert_allclose(out.values[:, 1, 1], f, atol=1e-10)


def test_cauchy_plus_rejects_slow_decay() -> None:
    size = 1024
    s = rational_grid(size, 6.0).nodes
    with pytest.raises(TruncationLeak):
        cauchy_plus(_field(1 / (s + 1j), size))


def test_jump_has_unit_determinant() -> None:
    jump = build_jump(0.3, 0.05, GammaParam(gamma=0.5), rational_grid(256, 6.0))
    np.testing.assert_allclose(jump.det(), 1.0, atol=1e-14)


def test_gamma_zero_gives_zero_potentials() -> None:
    table = potential_table(GammaParam(gamma=0.0), [-1.0, 0.0, 1.0], workers=1)
    assert table.ok
    for column in (table.q, table.q_x, table.u, table.int_q, table.int_q2, table.int_u):
        np.testing.assert_array_equal(column, np.zeros(3))


@pytest.mark.parametrize("x", [-2.0, 0.0, 1.0])
def test_solution_satisfies_its_identities(x: float) -> None:
    sol = solve_sie(x, 0.0, ONE)
    assert sol.residual < 1e-8
    assert da1_dx_check(sol) < 1e-5
    m = eval_m(SAMPLE_K, sol)
    np.testing.assert_allclose(np.linalg.det(m), 1.0, atol=1e-8)
    np.testing.assert_allclose(np.conj(eval_m(-np.conj(SAMPLE_K), sol)), m, atol=1e-8)
    np.testing.assert_allclose(np.conj(eval_m(np.conj(SAMPLE_K), sol))[:, ::-1, ::-1], m, atol=1e-8)
    assert abs(large_k_moment(sol) - 1j * sol.b1) < 1e-6
    assert sol.q == pytest.approx(2 * sol.b1)
    assert sol.int_q2 == pytest.approx(-2 * sol.a1)
    assert int_q_from_zero(sol) == pytest.approx(sol.int_q, abs=1e-10)


def test_potentials_are_positive_and_decay() -> None:
    table = potential_table(ONE, [-4.0, 0.0, 1.5], workers=1)
    assert table.ok
    assert np.all(table.q > 0)
    assert table.q[2] < table.q[1] and table.int_q2[2] < table.int_q2[1]


def test_real_k_needs_a_side() -> None:
    sol = solve_sie(0.0, 0.0, GammaParam(gamma=0.5))
    with pytest.raises(ParameterError):
        eval_m(0.5, sol)
    assert eval_m(0.5, sol, side="+").shape == (2, 2)


def test_time_outside_range() -> None:
    with pytest.raises(ParameterError):
        solve_sie(0.0, 0.2, ONE)
    with pytest.raises(ParameterError):
        potential_table(ONE, [1.0, 0.0], workers=1)
