import math

import numpy as np
import pytest
from scipy.integrate import quad

from ginibre.asymptotics import (
    default_kappas,
    fit_lkappa_series,
    intq2_increment,
    intq2_model,
    intq2_q_relation,
    intq_increment,
    intq_model,
    intu_increment,
    intu_left_model,
    q_model,
    qx_model,
)
from ginibre.models import TailModel, TailRegime
from shared.exceptions import IllConditionedFit, ModelPole, ParameterError

LESS = TailModel(regime=TailRegime.GAMMA_LESS_ONE, kappa=0.8, l_minus1=1.3, t1=0.4, valid_from=-1.0)
ONE = TailModel(regime=TailRegime.GAMMA_ONE, l1=1.165194315878021, t1=1.042186978869, valid_from=-5.0)


def _u(z: float, m: TailModel) -> float:
    return q_model(z, m) ** 2 - qx_model(z, m)


@pytest.mark.parametrize("m", [LESS, ONE])
def test_qx_model_is_the_derivative(m: TailModel) -> None:
    x, h = -2.0, 1e-5
    numeric = (q_model(x + h, m) - q_model(x - h, m)) / (2 * h)
    assert qx_model(x, m) == pytest.approx(numeric, rel=1e-8)


@pytest.mark.parametrize("m", [LESS, ONE])
def test_intq2_model_derivative_is_minus_q_squared(m: TailModel) -> None:
    x, h = -3.0, 1e-5
    numeric = (intq2_model(x + h, m) - intq2_model(x - h, m)) / (2 * h)
    assert numeric == pytest.approx(-q_model(x, m) ** 2, rel=1e-6)


@pytest.mark.parametrize("m", [LESS, ONE])
def test_relation_vanishes_on_the_models(m: TailModel) -> None:
    for x in (-6.0, -3.0, -1.5):
        assert abs(intq2_q_relation(x, m)) < 1e-12


@pytest.mark.parametrize("m", [LESS, ONE])
def test_increments_match_quadrature(m: TailModel) -> None:
    x, anchor = -7.0, -2.0
    value, _ = quad(lambda z: q_model(z, m), x, anchor, epsabs=1e-13)
    assert intq_increment(x, anchor, m) == pytest.approx(value, abs=1e-10)
    value, _ = quad(lambda z: intq2_model(z, m), x, anchor, epsabs=1e-13)
    assert intq2_increment(x, anchor, m) == pytest.approx(value, abs=1e-10)
    assert intu_increment(x, anchor, m) == pytest.approx(
        intq_increment(x, anchor, m) + intq2_increment(x, anchor, m)
    )


def test_intu_left_model() -> None:
    value, _ = quad(lambda z: _u(z, LESS), -math.inf, -2.0, epsabs=1e-13, limit=200)
    assert intu_left_model(-2.0, LESS) == pytest.approx(value, abs=1e-10)
    assert intu_left_model(-8.0, ONE) == 0.0
    # the gamma = 1 model u vanishes identically
    assert abs(_u(-8.0, ONE)) < 1e-15


def test_gamma_one_int_q_model() -> None:
    x = -6.0
    assert intq_model(x, ONE) == pytest.approx(math.log(ONE.l1 - 2 * x) + 0.5 * math.log(2.0))
    with pytest.raises(ParameterError):
        intq_model(x, LESS)


def test_model_poles() -> None:
    with pytest.raises(ModelPole):
        q_model(1.0, ONE)
    # E = 2 kappa at x = ln(2 kappa / L_-1) / (2 kappa)
    pole = math.log(2 * LESS.kappa / LESS.l_minus1) / (2 * LESS.kappa)
    with pytest.raises(ModelPole):
        q_model(pole + 0.1, LESS)


def test_fit_recovers_series_coefficients() -> None:
    kappas = default_kappas()
    values = 1 - 1.2 * kappas + 0.7 * kappas**2 - 0.25 * kappas**3 + 0.1 * kappas**4
    fit = fit_lkappa_series(kappas, values=values)
    assert fit.l1 == pytest.approx(1.2, abs=1e-8)
    assert fit.l2 == pytest.approx(0.7, abs=1e-7)
    assert fit.l3 == pytest.approx(0.25, abs=1e-6)
    assert fit.residual < 1e-12
    assert len(fit.std_errors) == 3


def test_fit_rejects_noisy_values() -> None:
    kappas = default_kappas()
    noise = np.where(np.arange(kappas.size) % 2, 1e-4, -1e-4)
    with pytest.raises(IllConditionedFit):
        fit_lkappa_series(kappas, values=1 - kappas + noise)


@pytest.mark.parametrize("kappas", [[0.1, 0.2, 0.3], list(np.linspace(0.1, 0.5, 24))])
def test_fit_rejects_bad_kappas(kappas: list[float]) -> None:
    with pytest.raises(ParameterError):
        fit_lkappa_series(kappas, values=np.ones(len(kappas)))
