"""Shared records and reducers for pipeline state."""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """Outcome of one acceptance check."""

    name: str = Field(description="Unique check name, e.g. 'scattering.t1_of_1'.")
    group: str = Field(description="Check group the check belongs to.")
    passed: bool
    measured: Optional[float] = None
    limit: Optional[float] = None
    message: str = ""
    reported_only: bool = Field(
        default=False, description="Reported but not allowed to fail the run."
    )

    @property
    def failing(self) -> bool:
        return not self.passed and not self.reported_only


def reduce_checks(
    existing: Optional[list[CheckResult]],
    new: Union[list[CheckResult], list[dict[str, Any]], CheckResult, Literal["delete"]],
) -> list[CheckResult]:
    """Merge new check results into the state by check name.

    A result whose name is already present replaces the earlier one in place; other
    results are appended in arrival order. The literal "delete" clears the list.

    Args:
        existing: The results already in the state, if any.
        new: Results as CheckResult objects or dictionaries, a single result, or "delete".
    """
    if new == "delete":
        return []
    merged = list(existing) if existing else []
    items = [new] if isinstance(new, CheckResult) else list(new)
    positions = {check.name: i for i, check in enumerate(merged)}
    for item in items:
        check = item if isinstance(item, CheckResult) else CheckResult(**item)
        if check.name in positions:
            merged[positions[check.name]] = check
        else:
            positions[check.name] = len(merged)
            merged.append(check)
    return merged
