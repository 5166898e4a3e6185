import math

import numpy as np
import pytest

from ginibre.models import (
    DistributionTable,
    EmpiricalCdf,
    GammaParam,
    McConfig,
    TailModel,
    TailRegime,
)


def test_gamma_param_derives_kappa_and_a() -> None:
    p = GammaParam(gamma=math.exp(-0.5))
    assert p.kappa == pytest.approx(1.0, rel=1e-14)
    assert p.a == pytest.approx(2.0, rel=1e-14)
    half = GammaParam(gamma=0.9)
    assert half.kappa**2 == pytest.approx(-2 * math.log(0.9), rel=1e-14)
    assert half.a == 1.0


def test_gamma_one_and_zero() -> None:
    one = GammaParam(gamma=1.0)
    assert one.kappa == 0.0 and one.is_one and one.a == 1.0
    zero = GammaParam(gamma=0.0)
    assert zero.trivial and math.isinf(zero.kappa)


@pytest.mark.parametrize("gamma", [-0.1, 1.5])
def test_gamma_out_of_range(gamma: float) -> None:
    with pytest.raises(ValueError):
        GammaParam(gamma=gamma)


def test_layer_parameter_must_exceed_kappa() -> None:
    with pytest.raises(ValueError):
        GammaParam(gamma=0.5, a=0.5)
    assert GammaParam(gamma=1.0).with_a(2.0).a == 2.0


def test_gamma_param_is_hashable() -> None:
    assert hash(GammaParam(gamma=0.5)) == hash(GammaParam(gamma=0.5))


def test_tail_model_needs_its_parameters() -> None:
    with pytest.raises(ValueError):
        TailModel(regime=TailRegime.GAMMA_LESS_ONE, t1=0.1, valid_from=0.0)
    with pytest.raises(ValueError):
        TailModel(regime=TailRegime.GAMMA_ONE, t1=0.1, valid_from=-5.0)


def test_distribution_table_evaluate_clamps() -> None:
    table = DistributionTable(
        gamma=1.0, s_values=np.array([-1.0, 0.0, 1.0]), f_values=np.array([0.2, 0.5, 0.9])
    )
    assert np.allclose(table.evaluate(np.array([-5.0, -0.5, 5.0])), [0.0, 0.35, 1.0])


def test_distribution_table_rejects_unordered_s() -> None:
    with pytest.raises(ValueError):
        DistributionTable(gamma=1.0, s_values=np.array([0.0, 0.0]), f_values=np.array([0.1, 0.2]))


def test_empirical_cdf_is_right_continuous() -> None:
    emp = EmpiricalCdf.from_samples(np.array([1.0, -np.inf, 0.0, 1.0]))
    assert emp.trials == 4
    assert emp.samples[0] == -np.inf
    assert np.allclose(emp.evaluate(np.array([-1.0, 0.0, 0.5, 1.0])), [0.25, 0.5, 0.5, 1.0])


def test_mc_config_tolerance() -> None:
    assert McConfig(n=100, trials=1).tolerance == pytest.approx(1e-7)
    assert McConfig(n=100, trials=1, im_tol=1e-6).tolerance == 1e-6
    with pytest.raises(ValueError):
        McConfig(n=1, trials=10)
