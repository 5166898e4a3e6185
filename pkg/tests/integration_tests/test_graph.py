import pytest

from ginibre.checks_graph import graph
from shared.state import CheckResult


@pytest.mark.asyncio
async def test_scattering_group() -> None:
    state = await graph.ainvoke(
        {"label": "scattering only"},
        {"configurable": {"groups": ["scattering"], "gammas": []}},
    )
    names = {check.name for check in state["checks"]}
    assert {"scattering.t1_of_1", "scattering.l1_of_1", "scattering.c2_of_1_a2"} <= names
    assert all(isinstance(check, CheckResult) for check in state["checks"])
    assert state["summary"]["label"] == "scattering only"
    assert "t1@1" in state["constants"]
    assert state["exit_code"] == 0, state["summary"]["failing"]


@pytest.mark.asyncio
async def test_montecarlo_group_without_tables() -> None:
    state = await graph.ainvoke(
        {"label": "mc"},
        {"configurable": {"groups": ["montecarlo"], "gammas": [], "mc_n": 200, "mc_trials": 400, "mc_seed": 1}},
    )
    checks = {check.name: check for check in state["checks"]}
    assert checks["montecarlo.real_count"].passed
    assert checks["montecarlo.deterministic"].passed
    assert checks["montecarlo.ks"].reported_only
    assert state["exit_code"] == 0
    assert state["tables"] == {}


@pytest.mark.asyncio
async def test_groups_not_selected_do_nothing() -> None:
    state = await graph.ainvoke({"label": "empty"}, {"configurable": {"groups": [], "gammas": []}})
    assert state["checks"] == []
    assert state["summary"]["checks"] == 0
    assert state["exit_code"] == 0


@pytest.mark.slow
@pytest.mark.asyncio
async def test_conserved_group_compares_m_near_one() -> None:
    state = await graph.ainvoke(
        {"label": "conserved"},
        {"configurable": {"groups": ["conserved"], "gammas": [1.0], "t_values": [0.0]}},
    )
    checks = {check.name: check for check in state["checks"]}
    assert checks["conserved.m_limit"].passed
    assert checks["conserved.m_limit"].measured < 1e-2
    assert "m@1" in state["constants"]
