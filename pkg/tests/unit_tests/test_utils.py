import logging
import math

import msgspec
import numpy as np
import pytest

from shared.utils import configure_logging, encode_json, format_csv, write_csv, write_json


def test_format_csv_header_and_numbers() -> None:
    out = format_csv(["x", "y"], np.array([[1.0, -0.5], [2.0, 0.25]]))
    assert out == b"x,y\n1.000000000000000e+00,-5.000000000000000e-01\n2.000000000000000e+00,2.500000000000000e-01\n"


def test_format_csv_fixed_digits() -> None:
    assert format_csv(["t1"], np.array([[1.0421869788690771]]), digits=12) == b"t1\n1.042186978869\n"


def test_format_csv_column_mismatch() -> None:
    with pytest.raises(ValueError):
        format_csv(["x"], np.array([[1.0, 2.0]]))


def test_encode_json_sorted_and_nonfinite() -> None:
    payload = encode_json({"b": np.float64(1.5), "a": [math.inf, 2], "c": np.arange(2)})
    assert payload.endswith(b"\n")
    assert payload.index(b'"a"') < payload.index(b'"b"') < payload.index(b'"c"')
    assert msgspec.json.decode(payload) == {"a": ["inf", 2], "b": 1.5, "c": [0, 1]}


def test_writes_are_atomic_and_deterministic(tmp_path) -> None:
    rows = np.array([[0.1, 0.2]])
    first = write_csv(tmp_path / "out" / "a.csv", ["x", "y"], rows)
    second = write_csv(tmp_path / "out" / "b.csv", ["x", "y"], rows)
    assert first.read_bytes() == second.read_bytes()
    write_json(tmp_path / "out" / "c.json", {"k": 1})
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["a.csv", "b.csv", "c.json"]


def test_configure_logging_does_not_stack_handlers() -> None:
    configure_logging("INFO")
    configure_logging("DEBUG")
    logger = logging.getLogger("ginibre")
    assert len(logger.handlers) == 1
    assert logger.level == logging.DEBUG
