"""Error hierarchy shared by every numerical module.

Input problems raise `ParameterError`. Every failed numerical self-check raises a
subclass of `NumericalCheckError`, which records the check name together with the
measured value and the limit it was compared against. The command line maps the two
branches to exit codes 2 and 3.
"""

from __future__ import annotations

from typing import Optional


class GinibreError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(GinibreError, ValueError):
    """Invalid input parameters (bad gamma, grid, or configuration)."""


class NumericalCheckError(GinibreError):
    """A numerical self-check failed.

    Attributes:
        check: Short name of the failing check.
        measured: The measured quantity, if any.
        limit: The tolerance it was compared against, if any.
    """

    check = "numerical-check"

    def __init__(
        self,
        message: str,
        *,
        measured: Optional[float] = None,
        limit: Optional[float] = None,
    ) -> None:
        detail = message
        if measured is not None and limit is not None:
            detail = f"{message} (measured {measured:.3e}, limit {limit:.3e})"
        super().__init__(detail)
        self.measured = measured
        self.limit = limit


class MethodDisagreement(NumericalCheckError):
    """Two independent routes to the same quantity disagree."""

    check = "method-disagreement"


class ContourClash(NumericalCheckError):
    """Evaluation point too close to the integration contour."""

    check = "contour-clash"


class RealnessViolation(NumericalCheckError):
    """A quantity that must be real has a large imaginary part."""

    check = "realness-violation"


class PoleProximity(NumericalCheckError):
    """Evaluation point too close to a pole."""

    check = "pole-proximity"


class TruncationLeak(NumericalCheckError):
    """A function does not decay at the truncated ends of its grid."""

    check = "truncation-leak"


class SingularSystem(NumericalCheckError):
    """The discretised linear system could not be solved."""

    check = "singular-system"


class ResidualTooLarge(NumericalCheckError):
    """The solved system leaves a residual above tolerance."""

    check = "residual-too-large"


class HyperbolicViolation(NumericalCheckError):
    """The identity r^2 - w^2 = 1 fails."""

    check = "hyperbolic-violation"


class KernelTruncation(NumericalCheckError):
    """The kernel tail beyond the truncation window is not negligible."""

    check = "kernel-truncation"


class SplitInconsistency(NumericalCheckError):
    """A split-point formula depends on the split point."""

    check = "split-inconsistency"


class BlowUp(NumericalCheckError):
    """The Riccati integration left its bound."""

    check = "riccati-blow-up"


class ModelPole(NumericalCheckError):
    """An asymptotic model is evaluated at or beyond its pole."""

    check = "model-pole"


class IllConditionedFit(NumericalCheckError):
    """A least-squares fit leaves a large residual."""

    check = "ill-conditioned-fit"


class NegativeRadicand(NumericalCheckError):
    """The square-root factor of the distribution is not positive."""

    check = "negative-radicand"


class FitResidualTooLarge(NumericalCheckError):
    """The tail of ln F is not linear to tolerance."""

    check = "fit-residual-too-large"


class TailDivergence(NumericalCheckError):
    """A regularised tail integrand fails to decay."""

    check = "tail-divergence"


class EigenFailure(NumericalCheckError):
    """The eigenvalue solver failed on a trial."""

    check = "eigen-failure"


class SupportMismatch(NumericalCheckError):
    """Samples fall outside the tabulated distribution."""

    check = "support-mismatch"
