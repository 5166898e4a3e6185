"""Define the configurable numerical parameters shared by all solvers."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Type, TypeVar

from langchain_core.runnables import RunnableConfig, ensure_config


@dataclass(kw_only=True, frozen=True)
class BaseConfiguration:
    """Numerical knobs for quadrature, the Riemann-Hilbert solver and the GLM solver.

    Every module function accepts an optional configuration; the defaults reproduce
    the documented tolerances. Instances are frozen so they can key the per-gamma
    caches of precomputed contour data.
    """

    truncation: float = field(
        default=12.0,
        metadata={
            "description": "Half-width of the truncated real-line range covered by Gauss-Legendre panels; algebraic tails cover the rest."
        },
    )

    panel_order: int = field(
        default=24,
        metadata={"description": "Number of Gauss-Legendre points per panel."},
    )

    panel_width: float = field(
        default=1.0,
        metadata={"description": "Maximal width of a quadrature panel."},
    )

    guard_ratio: float = field(
        default=1e-3,
        metadata={
            "description": "Guard distance around contours and poles, as a fraction of the layer parameter a."
        },
    )

    grading_depth: int = field(
        default=48,
        metadata={
            "description": "Number of dyadic panel levels accumulating at s = 0 on graded real-line grids."
        },
    )

    rhp_nodes: int = field(
        default=1024,
        metadata={"description": "Initial size of the rational grid of the Riemann-Hilbert solver."},
    )

    rhp_max_nodes: int = field(
        default=16384,
        metadata={"description": "Upper bound for the adaptive rational grid size."},
    )

    rhp_scale: float = field(
        default=6.0,
        metadata={"description": "Scale of the Moebius map between the real line and the circle."},
    )

    residual_tol: float = field(
        default=1e-8,
        metadata={"description": "Largest accepted residual of the singular integral equation."},
    )

    leak_tol: float = field(
        default=1e-12,
        metadata={"description": "Largest accepted function value at truncated grid ends."},
    )

    realness_tol: float = field(
        default=1e-8,
        metadata={"description": "Largest accepted imaginary part of quantities that must be real."},
    )

    glm_panel_order: int = field(
        default=16,
        metadata={"description": "Gauss-Legendre points per panel in the GLM Nystroem solve."},
    )

    glm_panel_width: float = field(
        default=1.0,
        metadata={"description": "Panel width of the GLM Nystroem solve."},
    )

    @classmethod
    def from_runnable_config(
        cls: Type[T], config: Optional[RunnableConfig] = None
    ) -> T:
        """Create a configuration instance from a RunnableConfig object.

        Args:
            cls (Type[T]): The class itself.
            config (Optional[RunnableConfig]): The configuration object to use.

        Returns:
            T: An instance of the configuration with the `configurable` values applied.
        """
        config = ensure_config(config)
        configurable = config.get("configurable") or {}
        _fields = {f.name for f in fields(cls) if f.init}
        return cls(**{k: v for k, v in configurable.items() if k in _fields})

    def numerics(self) -> BaseConfiguration:
        """Return the numerical part of this configuration as a plain BaseConfiguration."""
        if type(self) is BaseConfiguration:
            return self
        return BaseConfiguration(**{f.name: getattr(self, f.name) for f in fields(BaseConfiguration)})


T = TypeVar("T", bound=BaseConfiguration)

DEFAULT_CONFIG = BaseConfiguration()
