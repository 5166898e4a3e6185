import math
from typing import Callable

import numpy as np
import pytest

from ginibre.glm import PARSEVAL_TOL, glm_kernels, r_plus, riccati_q_from_u
from ginibre.models import GammaParam, PotentialTable
from shared.exceptions import KernelTruncation, ParameterError

X = np.round(np.linspace(-2.0, 8.0, 1001), 10)


def test_r_plus_closed_form() -> None:
    p = GammaParam(gamma=0.5)
    assert r_plus(0.0, p) == pytest.approx(-math.sqrt(0.5 / math.pi))
    values = r_plus(np.array([1.0, -1.0]), p)
    np.testing.assert_allclose(values, -math.sqrt(0.5 / math.pi) * math.exp(-1.0))
    np.testing.assert_array_equal(r_plus(np.linspace(-1, 1, 5), GammaParam(gamma=0.0)), np.zeros(5))


def test_riccati_recovers_gaussian_q(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    # q = 2 sqrt(gamma/pi) e^{-4x^2} matches the right-end start value exactly
    table = make_gaussian_table(1.0, X, 2 / math.sqrt(math.pi), 4.0)
    q = riccati_q_from_u(table)
    np.testing.assert_allclose(q, table.q, atol=1e-6)


def test_riccati_on_zero_u(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    table = make_gaussian_table(0.0, X, 0.0, 1.0)
    np.testing.assert_array_equal(riccati_q_from_u(table), np.zeros_like(X))


def test_riccati_needs_the_right_tail(make_gaussian_table: Callable[..., PotentialTable]) -> None:
    table = make_gaussian_table(1.0, np.linspace(-2.0, 4.0, 61), 1.0, 1.0)
    with pytest.raises(ParameterError):
        riccati_q_from_u(table)


def test_minus_kernel_table_keeps_its_energy() -> None:
    kernels = glm_kernels(GammaParam(gamma=0.5))
    assert kernels.parseval_gap < PARSEVAL_TOL
    assert kernels.check_parseval() == kernels.parseval_gap


def test_parseval_gap_above_the_limit_raises() -> None:
    kernels = glm_kernels(GammaParam(gamma=0.5))
    with pytest.raises(KernelTruncation):
        kernels.check_parseval(limit=-1.0)
