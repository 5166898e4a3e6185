from shared.state import CheckResult, reduce_checks


def _check(name: str, passed: bool = True, **extra) -> CheckResult:
    return CheckResult(name=name, group=name.split(".")[0], passed=passed, **extra)


def test_reduce_checks_appends_in_order() -> None:
    merged = reduce_checks(None, [_check("a.x"), _check("b.y")])
    merged = reduce_checks(merged, _check("c.z"))
    assert [c.name for c in merged] == ["a.x", "b.y", "c.z"]


def test_reduce_checks_replaces_by_name() -> None:
    merged = reduce_checks([_check("a.x"), _check("b.y")], [_check("a.x", passed=False)])
    assert [c.name for c in merged] == ["a.x", "b.y"]
    assert not merged[0].passed


def test_reduce_checks_accepts_dicts_and_delete() -> None:
    merged = reduce_checks([], [{"name": "a.x", "group": "a", "passed": True, "measured": 1.0}])
    assert merged[0].measured == 1.0
    assert reduce_checks(merged, "delete") == []


def test_reported_only_checks_never_fail() -> None:
    assert _check("a.x", passed=False).failing
    assert not _check("a.x", passed=False, reported_only=True).failing
