"""Define the configurable parameters for the acceptance checks."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional

from shared.configuration import BaseConfiguration
from shared.exceptions import ParameterError

ALL_GROUPS = (
    "scattering",
    "rhp",
    "glm",
    "asymptotics",
    "distribution",
    "conserved",
    "montecarlo",
)


@dataclass(kw_only=True, frozen=True)
class ChecksConfiguration(BaseConfiguration):
    """The configuration of the acceptance pipeline."""

    groups: tuple[str, ...] = field(
        default=ALL_GROUPS,
        metadata={"description": "Check groups to run, a subset of: " + ", ".join(ALL_GROUPS)},
    )

    gammas: tuple[float, ...] = field(
        default=(0.5, 1.0),
        metadata={"description": "Values of gamma for the potential-based checks."},
    )

    x_min: float = field(
        default=-10.0,
        metadata={"description": "Left end of the potential tables."},
    )

    x_max: float = field(
        default=10.0,
        metadata={"description": "Right end of the potential tables."},
    )

    x_step: float = field(
        default=0.05,
        metadata={"description": "Step of the potential tables."},
    )

    t_values: tuple[float, ...] = field(
        default=(0.0, 0.05),
        metadata={"description": "Times of the conservation checks."},
    )

    m_limit_gamma: Optional[float] = field(
        default=1 - 1e-4,
        metadata={"description": "gamma close to 1 at which M(gamma) is compared with M(1); None skips the comparison."},
    )

    mc_n: int = field(
        default=200,
        metadata={"description": "Matrix dimension of the Monte Carlo comparison."},
    )

    mc_trials: int = field(
        default=5000,
        metadata={"description": "Number of Monte Carlo trials."},
    )

    mc_seed: int = field(
        default=0,
        metadata={"description": "Root seed of the Monte Carlo streams."},
    )

    def __post_init__(self) -> None:
        # configurable values arriving as JSON lists
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                object.__setattr__(self, f.name, tuple(value))
        unknown = set(self.groups) - set(ALL_GROUPS)
        if unknown:
            raise ParameterError(f"unknown check groups: {sorted(unknown)}")
