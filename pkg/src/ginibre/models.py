"""Record types passed between the solvers.

Scalar records are plain pydantic models. Records that carry sampled data hold
numpy arrays and are frozen after construction.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Any, ClassVar, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.exceptions import ParameterError
from shared.quadrature import ContourGrid


class GammaParam(BaseModel):
    """The ensemble parameter gamma with its derived kappa and layer parameter a.

    Build it with `GammaParam(gamma=...)`; kappa is always derived from gamma and a
    defaults to 1 when kappa < 1 and to 2*kappa otherwise. gamma = 0 is accepted
    with kappa = a = inf for the operations that only need R.
    """

    model_config = ConfigDict(frozen=True)

    gamma: float = Field(ge=0.0, le=1.0, description="Ensemble parameter gamma in [0, 1].")
    kappa: float = Field(default=math.nan, description="sqrt(-2 ln gamma).")
    a: float = Field(default=math.nan, description="Layer parameter of the deformed contour, a > kappa.")

    @model_validator(mode="before")
    @classmethod
    def _derive(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "gamma" not in data:
            return data
        gamma = float(data["gamma"])
        if not 0.0 <= gamma <= 1.0:
            raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
        kappa = math.inf if gamma == 0.0 else math.sqrt(max(-2.0 * math.log(gamma), 0.0))
        if "kappa" in data and data["kappa"] is not None and not math.isnan(data["kappa"]):
            if not math.isclose(data["kappa"], kappa, rel_tol=1e-14, abs_tol=1e-300):
                raise ParameterError(f"kappa {data['kappa']} does not match gamma {gamma}")
        a = data.get("a")
        if a is None or (isinstance(a, float) and math.isnan(a)):
            a = math.inf if gamma == 0.0 else (1.0 if kappa < 1.0 else 2.0 * kappa)
        elif gamma > 0.0 and not a > kappa:
            raise ParameterError(f"layer parameter a={a} must exceed kappa={kappa}")
        return {"gamma": gamma, "kappa": kappa, "a": float(a)}

    @property
    def trivial(self) -> bool:
        """True when gamma = 0, where every potential vanishes."""
        return self.gamma == 0.0

    @property
    def is_one(self) -> bool:
        return self.gamma == 1.0

    @property
    def sqrt_gamma(self) -> float:
        return math.sqrt(self.gamma)

    def with_a(self, a: float) -> "GammaParam":
        """Return the same gamma with another layer parameter."""
        return GammaParam(gamma=self.gamma, a=a)


class ScatteringConstants(BaseModel):
    """Scalar scattering data of one gamma."""

    gamma: float
    t1: float = Field(description="T1(gamma).")
    t1_error: float = Field(description="Estimated quadrature error of t1.")
    l_minus1: Optional[float] = Field(default=None, description="L_{-1}(gamma), gamma in (0, 1).")
    l1_of_1: Optional[float] = Field(default=None, description="L1(1), only for gamma = 1.")
    c: list[float] = Field(default_factory=list, description="c_j(gamma; a) for j = 0..j_max.")
    a: float = Field(description="Layer parameter used for c_j.")


class MatrixField(BaseModel):
    """2x2 complex matrices sampled at the nodes of a grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: ContourGrid
    values: np.ndarray = Field(description="Array of shape (nodes, 2, 2).")

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixField":
        if self.values.shape != (self.grid.size, 2, 2):
            raise ParameterError(
                f"matrix field has shape {self.values.shape}, grid has {self.grid.size} nodes"
            )
        return self

    def det(self) -> np.ndarray:
        v = self.values
        return v[:, 0, 0] * v[:, 1, 1] - v[:, 0, 1] * v[:, 1, 0]


class RhpSolution(BaseModel):
    """Solution of the Riemann-Hilbert problem at one (x, t, gamma)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: float
    t: float
    p: GammaParam
    z_field: MatrixField = Field(description="Z = M_+ - I on the rational grid.")
    coefficients: np.ndarray = Field(
        description="Discrete Fourier coefficients of Z in the rational basis, shape (nodes, 2, 2)."
    )
    a1: float
    a1_x: float = Field(description="x-derivative of a1 from the differentiated equation.")
    b1: float
    q: float
    q_x: float
    q_xx: float
    int_q: float = Field(description="Integral of q over (x, inf) from the k -> 0 data.")
    int_q2: float = Field(description="Integral of q^2 over (x, inf), equal to -2 a1.")
    r: float
    w: float
    residual: float

    @property
    def int_u(self) -> float:
        return self.q + self.int_q2

    @property
    def u(self) -> float:
        return self.q**2 - self.q_x


class PotentialTable(BaseModel):
    """Per-x potentials and tail integrals at fixed (gamma, t)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    COLUMNS: ClassVar[tuple[str, ...]] = ("x", "q", "q_x", "u", "int_q", "int_q2", "int_u", "residual")

    gamma: float
    t: float
    x: np.ndarray
    q: np.ndarray
    q_x: np.ndarray
    q_xx: np.ndarray
    u: np.ndarray
    a1: np.ndarray
    int_q: np.ndarray
    int_q2: np.ndarray
    int_u: np.ndarray
    residual: np.ndarray
    failures: list[dict[str, Any]] = Field(default_factory=list)

    def rows(self) -> np.ndarray:
        return np.column_stack([getattr(self, name) for name in self.COLUMNS])

    @property
    def ok(self) -> bool:
        return not self.failures


class GlmSide(str, Enum):
    """Which of the two Marchenko equations."""

    PLUS = "plus"
    MINUS = "minus"


class GlmKernelTable(BaseModel):
    """Diagonal values of one GLM kernel on an x-grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    side: GlmSide
    gamma: float
    x_values: np.ndarray
    kernel_diag: np.ndarray
    r_kernel: str = Field(description="Source of the reflection kernel.")


class GlmTable(BaseModel):
    """Both kernel diagonals and the potential recovered from the plus side."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    COLUMNS: ClassVar[tuple[str, ...]] = ("x", "K_plus_diag", "K_minus_diag", "u_glm")

    gamma: float
    x: np.ndarray
    k_plus_diag: np.ndarray
    k_minus_diag: np.ndarray
    u_glm: np.ndarray

    def rows(self) -> np.ndarray:
        return np.column_stack([self.x, self.k_plus_diag, self.k_minus_diag, self.u_glm])


class TailRegime(str, Enum):
    """Asymptotic regime of the potential as x -> -inf."""

    GAMMA_LESS_ONE = "gamma_less_one"
    GAMMA_ONE = "gamma_one"


class TailModel(BaseModel):
    """Closed-form left-tail model of q and its integrals."""

    model_config = ConfigDict(frozen=True)

    regime: TailRegime
    kappa: Optional[float] = None
    l_minus1: Optional[float] = None
    l1: Optional[float] = None
    t1: float
    valid_from: float = Field(description="x below which the model is exponentially accurate.")

    @model_validator(mode="after")
    def _check_params(self) -> "TailModel":
        if self.regime is TailRegime.GAMMA_LESS_ONE:
            if not (self.kappa and self.kappa > 0 and self.l_minus1 and self.l_minus1 > 0):
                raise ParameterError("gamma < 1 tail model needs kappa > 0 and l_minus1 > 0")
        elif self.l1 is None:
            raise ParameterError("gamma = 1 tail model needs l1")
        return self


class DistributionTable(BaseModel):
    """F(s; gamma) on an s-grid with the fitted left-tail law."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    gamma: float
    s_values: np.ndarray
    f_values: np.ndarray
    tail_slope: Optional[float] = None
    tail_offset: Optional[float] = None
    route: str = Field(default="q_form", description="'q_form' or 'u_form'.")

    @model_validator(mode="after")
    def _check_values(self) -> "DistributionTable":
        if self.s_values.shape != self.f_values.shape:
            raise ParameterError("s and F arrays differ in shape")
        if np.any(np.diff(self.s_values) <= 0):
            raise ParameterError("s grid must be strictly increasing")
        return self

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        """Interpolate F linearly; 0 to the left of the table, 1 to the right."""
        return np.interp(s, self.s_values, self.f_values, left=0.0, right=1.0)


class ConservedSet(BaseModel):
    """The conserved quantities H, K, N, M at one (gamma, t)."""

    gamma: float
    t: float
    h: float
    k: float
    n: float
    m: Optional[float] = None
    m_anchor_x: Optional[float] = None


class McConfig(BaseModel):
    """Monte Carlo experiment parameters."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2, description="Matrix dimension.")
    trials: int = Field(ge=1, description="Number of sampled matrices.")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Root seed of the per-trial streams.")
    im_tol: Optional[float] = Field(default=None, gt=0.0, description="Reality threshold for eigenvalues.")

    @property
    def tolerance(self) -> float:
        return self.im_tol if self.im_tol is not None else 1e-8 * math.sqrt(self.n)


class EmpiricalCdf(BaseModel):
    """Empirical law of the shifted largest real eigenvalue."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: np.ndarray = Field(description="Sorted shifted maxima; -inf marks trials with no real eigenvalue.")
    trials: int
    no_real: int = 0
    failed: int = 0
    real_counts: Optional[np.ndarray] = None

    @classmethod
    def from_samples(cls, samples: np.ndarray, **extra: Any) -> "EmpiricalCdf":
        values = np.sort(np.asarray(samples, dtype=float))
        return cls(samples=values, trials=int(values.size), **extra)

    def evaluate(self, s: np.ndarray) -> np.ndarray:
        """Right-continuous step function #(samples <= s)/trials."""
        return np.searchsorted(self.samples, s, side="right") / self.samples.size


class LkappaFit(BaseModel):
    """Polynomial fit of L_{-1}/(2 kappa) in kappa near gamma = 1."""

    l1: float
    l2: float
    l3: float
    residual: float = Field(description="Largest absolute fit residual.")
    std_errors: list[float] = Field(description="Standard errors of l1, l2, l3.")
    degree: int
    kappas: list[float]


class ResidualTable(BaseModel):
    """Solver minus model residuals of the left-tail asymptotics."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    COLUMNS: ClassVar[tuple[str, ...]] = (
        "x", "q_residual", "int_q2_residual", "int_q_residual", "a1_residual", "relation_residual",
    )

    gamma: float
    x: np.ndarray
    q_residual: np.ndarray
    int_q2_residual: np.ndarray
    int_q_residual: np.ndarray = Field(description="NaN where no closed form exists (gamma < 1).")
    a1_residual: np.ndarray
    relation_residual: np.ndarray

    def rows(self) -> np.ndarray:
        return np.column_stack([getattr(self, name) for name in self.COLUMNS])


class InvarianceReport(BaseModel):
    """Conserved quantities at several times and their largest spread."""

    gamma: float
    sets: list[ConservedSet]
    spreads: dict[str, float] = Field(description="max - min over t for h, k, n and m.")


class DkwReport(BaseModel):
    """Dvoretzky-Kiefer-Wolfowitz band of an empirical CDF."""

    alpha: float
    epsilon: float = Field(description="Half-width sqrt(ln(2/alpha)/(2 trials)).")
    worst: Optional[float] = Field(default=None, description="sup |F_emp - F| on the checked range.")
    contains: Optional[bool] = None
