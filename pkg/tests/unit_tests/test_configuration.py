import pytest

from ginibre.checks_graph.configuration import ALL_GROUPS, ChecksConfiguration
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import ParameterError


def test_configuration_empty() -> None:
    BaseConfiguration.from_runnable_config({})


def test_configuration_ignores_unknown_keys() -> None:
    config = BaseConfiguration.from_runnable_config(
        {"configurable": {"truncation": 14.0, "thread_id": "abc"}}
    )
    assert config.truncation == 14.0
    assert config.panel_order == DEFAULT_CONFIG.panel_order


def test_configuration_is_hashable() -> None:
    assert hash(BaseConfiguration()) == hash(DEFAULT_CONFIG)
    assert BaseConfiguration() == DEFAULT_CONFIG


def test_checks_configuration_defaults() -> None:
    config = ChecksConfiguration.from_runnable_config({})
    assert config.groups == ALL_GROUPS
    assert config.gammas == (0.5, 1.0)


def test_checks_configuration_converts_lists() -> None:
    config = ChecksConfiguration.from_runnable_config(
        {"configurable": {"groups": ["scattering"], "gammas": [1.0]}}
    )
    assert config.groups == ("scattering",)
    assert config.gammas == (1.0,)
    hash(config)


def test_checks_configuration_rejects_unknown_group() -> None:
    with pytest.raises(ParameterError):
        ChecksConfiguration(groups=("plots",))


def test_numerics_drops_pipeline_fields() -> None:
    config = ChecksConfiguration(rhp_nodes=2048, gammas=(0.25,))
    numerics = config.numerics()
    assert type(numerics) is BaseConfiguration
    assert numerics.rhp_nodes == 2048
    assert DEFAULT_CONFIG.numerics() is DEFAULT_CONFIG


def test_m_limit_gamma_can_be_switched_off() -> None:
    assert ChecksConfiguration().m_limit_gamma == pytest.approx(1 - 1e-4)
    config = ChecksConfiguration.from_runnable_config({"configurable": {"m_limit_gamma": None}})
    assert config.m_limit_gamma is None
    assert not hasattr(config.numerics(), "m_limit_gamma")
