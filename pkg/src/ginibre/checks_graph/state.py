"""State of the acceptance-check graph."""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Annotated, Any

from ginibre.models import PotentialTable
from shared.state import CheckResult, reduce_checks


@dataclass(kw_only=True)
class InputState:
    """What a caller passes in; everything numerical comes from the configuration."""

    label: str = field(default="all-checks")
    """Name of the run, copied into the summary."""


@dataclass(kw_only=True)
class ChecksState(InputState):
    """Accumulated results of the check groups."""

    checks: Annotated[list[CheckResult], reduce_checks] = field(default_factory=list)
    """Results of every check that ran, merged by name."""

    constants: Annotated[dict[str, float], operator.or_] = field(default_factory=dict)
    """Values shared between groups for the cross-checks of the report."""

    tables: dict[float, PotentialTable] = field(default_factory=dict)
    """Potential tables at t = 0, keyed by gamma."""

    summary: dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0
