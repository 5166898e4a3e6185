import json
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from ginibre.checks_graph.configuration import ALL_GROUPS
from ginibre.cli import EXIT_INVALID, EXIT_OK, Result, RunConfig, build_parser, run, summary_path
from ginibre.models import ConservedSet, InvarianceReport, LkappaFit
from shared.configuration import DEFAULT_CONFIG


def test_parser_maps_all_checks_gammas() -> None:
    args = build_parser().parse_args(["all-checks", "--gamma", "0.25", "1", "--groups", "scattering"])
    assert args.gammas == [0.25, 1.0]
    assert args.groups == ["scattering"]


def test_run_config_defaults() -> None:
    cfg = RunConfig(subcommand="constants")
    assert cfg.p.is_one
    assert cfg.numerics() is DEFAULT_CONFIG
    assert cfg.groups == list(ALL_GROUPS)
    assert RunConfig(subcommand="potential", truncation=10.0, nodes=512).numerics().rhp_nodes == 512


@pytest.mark.parametrize(
    "values",
    [
        {"gamma": 1.5},
        {"t": 0.5},
        {"x_min": 2.0, "x_max": 1.0},
        {"t_values": [0.0, 0.2]},
        {"gammas": [-0.1]},
        {"groups": ["bogus"]},
        {"nodes": 8},
        {"unknown": 1},
    ],
)
def test_run_config_rejects_bad_values(values: dict) -> None:
    with pytest.raises(ValidationError):
        RunConfig(subcommand="potential", **values)


def test_run_config_grid() -> None:
    grid = RunConfig(subcommand="potential", gamma=0.0, x_min=-2.0, x_max=2.0, x_step=0.5).x_grid()
    np.testing.assert_allclose(grid, np.arange(-2.0, 2.5, 0.5))


def test_result_payload() -> None:
    result = Result(columns=("s", "F"), rows=np.array([[0.0, 0.5], [1.0, 0.7]]), meta={"gamma": 1.0})
    payload = result.payload()
    assert payload["gamma"] == 1.0
    np.testing.assert_array_equal(payload["F"], [0.5, 0.7])


@pytest.mark.parametrize(
    "argv",
    [
        ["constants", "--gamma", "1.5"],
        ["potential", "--t", "0.5"],
        ["potential", "--x-min", "3", "--x-max", "1"],
        ["--workers", "0", "constants"],
        ["all-checks", "--groups", "bogus"],
        ["no-such-command"],
        [],
    ],
)
def test_invalid_input_exits_with_2(argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
    assert run(argv) == EXIT_INVALID
    assert capsys.readouterr().err


def test_help_exits_with_0(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["--help"]) == EXIT_OK
    assert "ginibre-edge" in capsys.readouterr().out


def test_conserved_writes_one_json_object(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    sets = [
        ConservedSet(gamma=0.5, t=0.0, h=0.1, k=0.2, n=0.3),
        ConservedSet(gamma=0.5, t=0.05, h=0.1, k=0.2, n=0.3 + 1e-7),
    ]
    report = InvarianceReport(gamma=0.5, sets=sets, spreads={"h": 0.0, "k": 0.0, "n": 1e-7, "m": 0.0})
    monkeypatch.setattr("ginibre.cli.invariance_check", lambda *args, **kwargs: report)
    monkeypatch.setattr("ginibre.cli.default_x_grid", lambda *args, **kwargs: np.linspace(-1.0, 1.0, 3))
    assert run(["conserved", "--gamma", "0.5"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"gamma", "t", "H", "K", "N", "M", "spreads"}
    assert payload["t"] == [0.0, 0.05]
    assert payload["M"] == [None, None]
    assert payload["spreads"]["N"] == pytest.approx(1e-7)


def test_fit_lkappa_writes_one_json_object(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    fit = LkappaFit(l1=0.5, l2=-0.1, l3=0.02, residual=1e-9, std_errors=[1e-8, 1e-7, 1e-6], degree=5, kappas=[0.1])
    monkeypatch.setattr("ginibre.cli.fit_lkappa_series", lambda *args, **kwargs: fit)
    assert run(["fit-lkappa", "--format", "csv"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert {"l1", "l2", "l3", "residual"} <= set(payload)
    assert payload["l1"] == 0.5 and payload["l3_error"] == 1e-6


def test_summary_path() -> None:
    assert summary_path(Path("out/mc.csv")) == Path("out/mc.summary.json")


def test_mc_ks_flag() -> None:
    assert build_parser().parse_args(["mc", "--no-ks"]).ks is False
    assert build_parser().parse_args(["mc"]).ks is True


def test_s_range_overrides_x_range() -> None:
    grid = RunConfig(subcommand="distribution", gamma=0.0, s_min=-4.0, s_max=4.0, s_step=2.0).x_grid()
    np.testing.assert_allclose(grid, [-2.0, -1.0, 0.0, 1.0, 2.0])
    with pytest.raises(ValidationError):
        RunConfig(subcommand="distribution", s_min=3.0, s_max=1.0)
