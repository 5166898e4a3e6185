"""Shared utility functions used in the project.

Functions:
    configure_logging: Install a single stderr handler on the package loggers.
    write_csv: Write a numeric table atomically as CSV.
    write_json: Write a flat mapping atomically as sorted-key JSON.
    encode_json: Encode a mapping as deterministic JSON bytes.
"""

from __future__ import annotations

import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import msgspec
import numpy as np

PathLike = Union[str, os.PathLike]

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Union[int, str] = logging.WARNING) -> None:
    """Configure the root logger of the `ginibre` and `shared` packages.

    Calling it twice replaces the handler instead of stacking a second one.
    """
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(_LOG_FORMAT))
    for name in ("ginibre", "shared"):
        logger = logging.getLogger(name)
        logger.handlers = [handler]
        logger.setLevel(level)
        logger.propagate = False


def _atomic_write(path: PathLike, payload: bytes) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def format_csv(columns: Sequence[str], rows: np.ndarray, digits: Optional[int] = None) -> bytes:
    """Render rows as CSV with a header row and `%.15e` numbers.

    Args:
        columns: Column names.
        rows: Two-dimensional array with one column per name.
        digits: Write fixed-point numbers with this many decimals instead.

    Returns:
        bytes: The CSV document with LF line endings.

    Examples:
        >>> format_csv(["x"], np.array([[1.0]]))
        b'x\\n1.000000000000000e+00\\n'
    """
    data = np.atleast_2d(np.asarray(rows, dtype=float))
    if data.size and data.shape[1] != len(columns):
        raise ValueError(f"expected {len(columns)} columns, got {data.shape[1]}")
    lines = [",".join(columns)]
    spec = ".15e" if digits is None else f".{digits}f"
    lines.extend(",".join(format(value, spec) for value in row) for row in data)
    return ("\n".join(lines) + "\n").encode()


def write_csv(
    path: PathLike, columns: Sequence[str], rows: np.ndarray, digits: Optional[int] = None
) -> Path:
    """Write a numeric table to `path` via a temporary file and rename."""
    return _atomic_write(path, format_csv(columns, rows, digits))


def _jsonable(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def encode_json(payload: Mapping[str, Any]) -> bytes:
    """Encode a mapping as JSON with sorted keys and a trailing newline.

    Non-finite floats are written as strings, since JSON has no literal for them.
    """
    return msgspec.json.encode(_jsonable(payload), order="sorted") + b"\n"


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    """Write a mapping to `path` as deterministic JSON via a temporary file and rename."""
    return _atomic_write(path, encode_json(payload))
