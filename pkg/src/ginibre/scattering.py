"""Scattering data of the Gaussian reflection coefficient R(k) = -sqrt(gamma) exp(-k^2/4).

The transmission coefficient T, the left reflection coefficient L and the constants
T1, L_{-1}, L1(1), c_j are all built from the scalar function delta_hat, a Cauchy
integral of the logarithm of

    G(s) = (s^2 + a^2) (1 - exp(-(s^2 + kappa^2)/2)) / (s^2 + kappa^2)

over a contour that avoids the origin. `ScatteringData` keeps the contour grids and
the sampled logarithm for one gamma; the module-level functions delegate to a cached
instance.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Literal, Optional, Union

import mpmath
import numpy as np

from ginibre.models import GammaParam, ScatteringConstants
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import (
    ContourClash,
    MethodDisagreement,
    ParameterError,
    PoleProximity,
    RealnessViolation,
)
from shared.quadrature import (
    ContourGrid,
    ContourShape,
    real_line_grid,
    shifted_line_grid,
    sigma_a_grid,
)

LOGGER = logging.getLogger(__name__)

Side = Literal["+", "-"]
ComplexLike = Union[complex, np.ndarray]

SQRT_2PI = math.sqrt(2 * math.pi)
L1_OF_1 = 1.165194315878021340410354
T1_OF_1 = 1.042186978869

# E(w) = (1 - exp(-w/2))/w = sum_n (-1)^n w^n / (2^(n+1) (n+1)!)
_E_SERIES = np.array(
    [(-1) ** n / (2 ** (n + 1) * math.factorial(n + 1)) for n in range(9)]
)
_CHUNK = 256


def e_ratio(w: ComplexLike) -> np.ndarray:
    """Evaluate (1 - exp(-w/2))/w without cancellation near w = 0."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-2
    safe = np.where(small, 1.0, w)
    out = -np.expm1(-safe / 2) / safe
    if np.any(small):
        out = np.where(small, np.polynomial.polynomial.polyval(w, _E_SERIES), out)
    return out


def log_symbol(nodes: np.ndarray, p: GammaParam) -> np.ndarray:
    """Continuous logarithm of G along ordered contour nodes, vanishing at the ends."""
    value = (nodes**2 + p.a**2) * e_ratio(nodes**2 + p.kappa**2)
    phase = np.unwrap(np.angle(value))
    if abs(phase[0]) > 1e-8 or abs(phase[-1]) > 1e-8:
        raise MethodDisagreement(
            "log G does not return to the principal branch at the contour ends",
            measured=max(abs(phase[0]), abs(phase[-1])),
            limit=1e-8,
        )
    return np.log(np.abs(value)) + 1j * phase


def log_unit_gap(s: np.ndarray, gamma: float) -> np.ndarray:
    """Return ln(1 - gamma e^{-s^2/2}) = ln(1 - R(s)^2) on real nodes.

    Written through expm1 so that it stays accurate where gamma e^{-s^2/2} rounds to 1.
    """
    return np.log(-np.expm1(math.log(gamma) - np.asarray(s, dtype=float) ** 2 / 2))


def reflection_r(k: ComplexLike, p: GammaParam) -> ComplexLike:
    """Return R(k; gamma) = -sqrt(gamma) exp(-k^2/4)."""
    return -p.sqrt_gamma * np.exp(-np.asarray(k) ** 2 / 4)


def _scalar(value: np.ndarray, like: ComplexLike) -> ComplexLike:
    return complex(value) if np.ndim(like) == 0 else value


class ScatteringData:
    """Contour grids and sampled symbol for one gamma.

    The '+' continuation of delta_hat uses the horizontal line Im s = -d (or Sigma_a
    near the imaginary axis) and is valid for Im k > -d/2; the '-' continuation uses
    Im s = +d and is valid for Im k < d/2, where d = min(a/2, 1).
    """

    def __init__(self, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> None:
        if p.trivial:
            raise ParameterError("scattering data needs gamma > 0")
        self.p = p
        self.config = config
        self.depth = min(p.a / 2, 1.0)
        self.guard = config.guard_ratio * p.a
        self.sigma = sigma_a_grid(p.a, config)
        self.g_sigma = log_symbol(self.sigma.nodes, p)
        self.upper = shifted_line_grid(-self.depth, config)
        self.g_upper = log_symbol(self.upper.nodes, p)
        self.lower = shifted_line_grid(self.depth, config)
        self.g_lower = log_symbol(self.lower.nodes, p)
        samples = np.array([-2.0, -1.0, 0.5, 1.5, 3.0], dtype=complex)
        jump = float(np.max(np.abs(self._transmission(samples, "+") - self._transmission(samples, "-"))))
        if jump > 1e-8:
            raise MethodDisagreement("T is discontinuous across the real line", measured=jump, limit=1e-8)
        LOGGER.debug(
            "scattering data for gamma=%s: kappa=%.6g a=%.6g, %d/%d nodes",
            p.gamma,
            p.kappa,
            p.a,
            self.sigma.size,
            self.upper.size,
        )

    # delta_hat

    def _check_clearance(self, grid: ContourGrid, k: np.ndarray) -> None:
        if grid.shape is ContourShape.SHIFTED:
            distance = float(np.min(np.abs(k.imag - grid.shift))) if k.size else math.inf
        else:
            distance = min((grid.distance_to(z) for z in k), default=math.inf)
        if distance < self.guard:
            raise ContourClash(
                "evaluation point too close to the contour", measured=distance, limit=self.guard
            )

    def _cauchy_log(self, grid: ContourGrid, g: np.ndarray, k: np.ndarray) -> np.ndarray:
        self._check_clearance(grid, k)
        out = np.empty(k.shape, dtype=complex)
        for start in range(0, k.size, _CHUNK):
            block = k[start : start + _CHUNK]
            kernel = g[None, :] / (grid.nodes[None, :] - block[:, None])
            out[start : start + _CHUNK] = grid.integrate(kernel) / (2j * math.pi)
        return out

    def log_delta(
        self, k: np.ndarray, side: Side, contour: Literal["auto", "sigma", "line"] = "auto"
    ) -> np.ndarray:
        """Return ln delta_hat(k) for one continuation side."""
        k = np.asarray(k, dtype=complex).ravel()
        a = self.p.a
        if side == "+":
            if np.any(k.imag <= -self.depth / 2):
                raise ContourClash("'+' continuation requested below its layer")
            if contour == "auto":
                use_sigma = (np.abs(k.real) <= a / 8) & (k.imag > -a / 16) & (k.imag < a / 4)
            else:
                use_sigma = np.full(k.shape, contour == "sigma")
            line, g_line = self.upper, self.g_upper
        else:
            if np.any(k.imag >= self.depth / 2):
                raise ContourClash("'-' continuation requested above its layer")
            use_sigma = np.full(k.shape, contour == "sigma")
            line, g_line = self.lower, self.g_lower
        out = np.empty(k.shape, dtype=complex)
        if np.any(use_sigma):
            out[use_sigma] = self._cauchy_log(self.sigma, self.g_sigma, k[use_sigma])
        if np.any(~use_sigma):
            out[~use_sigma] = self._cauchy_log(line, g_line, k[~use_sigma])
        return out

    def _by_side(self, k: ComplexLike, side: Optional[Side], fn) -> ComplexLike:
        arr = np.asarray(k, dtype=complex)
        flat = arr.ravel()
        if side is None:
            plus = flat.imag >= 0
        else:
            plus = np.full(flat.shape, side == "+")
        out = np.empty(flat.shape, dtype=complex)
        if np.any(plus):
            out[plus] = fn(flat[plus], "+")
        if np.any(~plus):
            out[~plus] = fn(flat[~plus], "-")
        return _scalar(out.reshape(arr.shape), k)

    def delta_hat(
        self,
        k: ComplexLike,
        side: Optional[Side] = None,
        contour: Literal["auto", "sigma", "line"] = "auto",
    ) -> ComplexLike:
        """Evaluate delta_hat(k); real k gets the boundary value from above by default."""
        return self._by_side(k, side, lambda z, s: np.exp(self.log_delta(z, s, contour)))

    # T and L

    def _transmission(self, k: np.ndarray, side: Side) -> np.ndarray:
        p = self.p
        delta = np.exp(self.log_delta(k, side))
        if side == "+":
            return delta * (k + 1j * p.kappa) / (k + 1j * p.a)
        # (1 - gamma e^{-k^2/2})/(k - i kappa) = (k + i kappa) E(k^2 + kappa^2)
        return (k + 1j * p.kappa) * e_ratio(k**2 + p.kappa**2) * delta * (k - 1j * p.a)

    def transmission(self, k: ComplexLike, side: Optional[Side] = None) -> ComplexLike:
        """Evaluate the entire function T(k); the side only picks the representation."""
        return self._by_side(k, side, self._transmission)

    def _left_reflection(self, k: np.ndarray, side: Side) -> np.ndarray:
        p = self.p
        w = k**2 + p.kappa**2
        if p.kappa > 0:
            distance = float(np.min(np.abs(k - 1j * p.kappa))) if k.size else math.inf
            if distance < self.guard:
                raise PoleProximity(
                    "L evaluated at its pole i*kappa", measured=distance, limit=self.guard
                )
            ratio = (k + 1j * p.kappa) / (k - 1j * p.kappa)
        else:
            ratio = np.ones_like(k)
        delta2 = np.exp(2 * self.log_delta(k, side))
        decay = np.exp(-w / 4)
        if side == "+":
            return decay * ratio / e_ratio(w) / (k + 1j * p.a) ** 2 * delta2
        return decay * ratio * e_ratio(w) * (k - 1j * p.a) ** 2 * delta2

    def left_reflection(self, k: ComplexLike, side: Optional[Side] = None) -> ComplexLike:
        """Evaluate L(k), meromorphic with a simple pole at i*kappa when gamma < 1."""
        return self._by_side(k, side, self._left_reflection)

    # constants

    def c_coeff(self, j: int) -> float:
        """Return c_j(gamma; a) from the Sigma_a integral of g/(s - i kappa)^(j+1)."""
        if j < 0:
            raise ParameterError(f"j must be non-negative, got {j}")
        nodes = self.sigma.nodes
        d = self.sigma.integrate(self.g_sigma / (nodes - 1j * self.p.kappa) ** (j + 1))
        d = d / (1j * math.pi)
        value = d if j % 2 == 0 else -1j * d
        scale = max(1.0, abs(value))
        if abs(value.imag) > self.config.realness_tol * scale:
            raise RealnessViolation(
                f"c_{j} is not real", measured=abs(value.imag) / scale, limit=self.config.realness_tol
            )
        return float(value.real)

    def t1_sigma(self) -> float:
        """T1 = (a - kappa) - (1/2pi) int_{Sigma_a} g ds."""
        integral = self.sigma.integrate(self.g_sigma)
        return float(self.p.a - self.p.kappa - integral.real / (2 * math.pi))

    def l_minus1_residue(self) -> float:
        """L_{-1} = 4 kappa e^{c_0}/(a + kappa)^2."""
        p = self.p
        return 4 * p.kappa * math.exp(self.c_coeff(0)) / (p.a + p.kappa) ** 2


@lru_cache(maxsize=128)
def scattering_data(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> ScatteringData:
    """Return the cached `ScatteringData` for (p, config)."""
    return ScatteringData(p, config)


# T1


def polylog_three_halves(gamma: float) -> tuple[float, float]:
    """Return Li_{3/2}(gamma) and a bound on the neglected series tail.

    The series is summed directly for gamma <= 0.99; closer to 1 it converges too
    slowly and mpmath evaluates the polylogarithm instead.
    """
    if gamma == 0.0:
        return 0.0, 0.0
    if gamma <= 0.99:
        count = min(100_000, int(math.ceil(math.log(1e-17) / math.log(gamma))) + 1)
        n = np.arange(1, count + 1, dtype=float)
        terms = np.exp(n * math.log(gamma)) / n**1.5
        tail = float(terms[-1] * gamma / (1 - gamma))
        return float(np.sum(terms[::-1])), tail
    with mpmath.workdps(30):
        return float(mpmath.polylog(1.5, gamma)), 1e-16


def _t1_on(grid: ContourGrid, gamma: float) -> tuple[float, float]:
    s = grid.nodes.real
    f = log_unit_gap(s, gamma)
    value = -grid.integrate(f).real / (2 * math.pi)
    scale = float(np.sum(np.abs(grid.weights * f))) / (2 * math.pi)
    return value, scale


def t1_with_error(
    p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG
) -> tuple[float, float]:
    """Return T1(gamma) by graded real-line quadrature and its error estimate.

    The estimate compares the rule with a rule of twice the panel order on the same
    breakpoints, floored at the rounding level of the sum.
    """
    if p.trivial:
        return 0.0, 0.0
    coarse, _ = _t1_on(real_line_grid(config, graded=True), p.gamma)
    fine, scale = _t1_on(real_line_grid(config, graded=True, order=2 * config.panel_order), p.gamma)
    return fine, max(abs(fine - coarse), 64 * np.finfo(float).eps * scale)


def t1_constant(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> float:
    """Return T1(gamma) = -(1/2pi) int ln(1 - gamma e^{-s^2/2}) ds.

    The quadrature value is returned after checking it against the polylogarithm
    route Li_{3/2}(gamma)/sqrt(2 pi).

    Raises:
        MethodDisagreement: The two routes differ by more than 100 error estimates.
    """
    value, error = t1_with_error(p, config)
    series, tail = polylog_three_halves(p.gamma)
    series /= SQRT_2PI
    allowed = 100 * max(error, tail / SQRT_2PI)
    if not abs(value - series) <= allowed:
        raise MethodDisagreement(
            f"T1({p.gamma}) quadrature and polylog routes disagree",
            measured=abs(value - series),
            limit=allowed,
        )
    return value


def t1_sigma_route(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> float:
    """Return T1(gamma) from the Sigma_a integral of the symbol."""
    return scattering_data(p, config).t1_sigma()


# delta_hat, c_j, T, L


def delta_hat(
    k: ComplexLike,
    p: GammaParam,
    side: Optional[Side] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
) -> ComplexLike:
    """Return delta_hat(k; gamma; a).

    Args:
        k: Point(s) inside the layer of the chosen side.
        p: Gamma parameter.
        side: '+' for the function analytic above the contour, '-' below. Defaults
            to '+' for Im k >= 0 and '-' otherwise.
        config: Numerical configuration.

    Raises:
        ContourClash: k within the guard distance of the contour or outside the layer.
    """
    return scattering_data(p, config).delta_hat(k, side)


def c_coeff(j: int, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> float:
    """Return c_j(gamma; a); raises RealnessViolation when the integral is not real."""
    return scattering_data(p, config).c_coeff(j)


def transmission_t(
    k: ComplexLike,
    p: GammaParam,
    side: Optional[Side] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
) -> ComplexLike:
    """Return T(k; gamma)."""
    return scattering_data(p, config).transmission(k, side)


def left_reflection_l(
    k: ComplexLike,
    p: GammaParam,
    side: Optional[Side] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
) -> ComplexLike:
    """Return L(k; gamma); raises PoleProximity near i*kappa."""
    return scattering_data(p, config).left_reflection(k, side)


def transmission_continuity(
    p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG, samples: int = 33
) -> float:
    """Return max |T(k+i0) - T(k-i0)| over real sample points in [-4, 4]."""
    data = scattering_data(p, config)
    k = np.linspace(-4.0, 4.0, samples).astype(complex)
    return float(np.max(np.abs(data.transmission(k, "+") - data.transmission(k, "-"))))


# L_{-1} and L1(1)


def lm1_routes(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> dict[str, float]:
    """Return L_{-1}(gamma) from three independent formulas.

    Keys:
        residue: 4 kappa e^{c_0}/(a + kappa)^2.
        transmission: T(i kappa)^2/kappa, with T(i kappa) a real-line Cauchy integral.
        rescaled: exp of (1/pi i) int ln(1 - e^{-kappa^2 (1+s^2)/2})/(s - i) ds, over kappa.
    """
    if p.trivial or p.is_one:
        raise ParameterError("L_{-1} is defined for gamma in (0, 1)")
    kappa = p.kappa
    graded = real_line_grid(config, graded=True)
    s = graded.nodes.real
    log_t = graded.integrate(log_unit_gap(s, p.gamma) / (s - 1j * kappa))
    log_t /= 2j * math.pi
    cut = max(config.truncation, config.truncation / kappa)
    wide = real_line_grid(config, truncation=min(cut, 1e4))
    t = wide.nodes.real
    rescaled = wide.integrate(np.log(-np.expm1(-(kappa**2) * (1 + t**2) / 2)) / (t - 1j))
    rescaled /= 1j * math.pi
    return {
        "residue": scattering_data(p, config).l_minus1_residue(),
        "transmission": float(np.exp(2 * log_t).real) / kappa,
        "rescaled": float(np.exp(rescaled).real) / kappa,
    }


def lm1_over_2kappa(
    p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG, *, check: bool = True
) -> float:
    """Return L_{-1}(gamma)/(2 kappa), which tends to 1 as gamma -> 1-.

    With `check` the residue formula is compared against T(i kappa)^2/kappa.

    Raises:
        MethodDisagreement: The two formulas differ by more than 1e-8 (relative).
    """
    if p.trivial or p.is_one:
        raise ParameterError("L_{-1}/(2 kappa) is defined for gamma in (0, 1)")
    if not check:
        return scattering_data(p, config).l_minus1_residue() / (2 * p.kappa)
    routes = lm1_routes(p, config)
    gap = abs(routes["residue"] - routes["transmission"]) / routes["residue"]
    if gap > 1e-8:
        raise MethodDisagreement(
            f"L_-1({p.gamma}) residue and transmission routes disagree", measured=gap, limit=1e-8
        )
    return routes["residue"] / (2 * p.kappa)


def l_taylor_at_zero(
    n_max: int = 4,
    config: BaseConfiguration = DEFAULT_CONFIG,
    radius: float = 0.5,
    points: int = 64,
) -> np.ndarray:
    """Taylor coefficients of L(k; 1) at k = 0 from a Cauchy integral on |k| = radius."""
    data = scattering_data(GammaParam(gamma=1.0), config)
    phi = 2 * math.pi * (np.arange(points) + 0.5) / points
    values = data.left_reflection(radius * np.exp(1j * phi))
    n = np.arange(n_max + 1)
    return (np.exp(-1j * np.outer(n, phi)) @ values) / points / radius**n


def l2_of_1(config: BaseConfiguration = DEFAULT_CONFIG) -> float:
    """Return L2(1) from L(k; 1) = -(1 + i L1(1) k + L2(1) k^2 + O(k^3)).

    It should equal -L1(1)^2/2 - 1/4.
    """
    coefficients = l_taylor_at_zero(2, config)
    return float(-coefficients[2].real)


def l1_routes(config: BaseConfiguration = DEFAULT_CONFIG) -> dict[str, float]:
    """Return L1(1) from the c_1 formula at a = 1 and a = 2 and from the Taylor route.

    At a = 1 the c_1 integral is the Sigma_{1/4} formula 2 - (1/pi) int g/s^2 ds.
    """
    one = GammaParam(gamma=1.0, a=1.0)
    two = GammaParam(gamma=1.0, a=2.0)
    coefficients = l_taylor_at_zero(1, config)
    # L(0; 1) = -1; the alternative normalization -i is only reported
    if abs(coefficients[0] + 1) > 1e-8:
        LOGGER.warning("L(0; 1) = %s, expected -1", complex(coefficients[0]))
    return {
        "sigma_a1": c_coeff(1, one, config) + 2.0,
        "sigma_a2": c_coeff(1, two, config) + 1.0,
        "taylor": float((1j * coefficients[1]).real),
    }


def l1_of_1(config: BaseConfiguration = DEFAULT_CONFIG) -> float:
    """Return L1(1), the linear Taylor coefficient of -L(k; 1) divided by i.

    Raises:
        MethodDisagreement: The a = 1 and a = 2 routes differ by more than 1e-10, or
            the Taylor route differs by more than 1e-8.
    """
    routes = l1_routes(config)
    gap = abs(routes["sigma_a1"] - routes["sigma_a2"])
    if gap > 1e-10:
        raise MethodDisagreement("L1(1) depends on a", measured=gap, limit=1e-10)
    taylor_gap = abs(routes["sigma_a1"] - routes["taylor"])
    if taylor_gap > 1e-8:
        raise MethodDisagreement(
            "L1(1) contour and Taylor routes disagree", measured=taylor_gap, limit=1e-8
        )
    return routes["sigma_a1"]


def scattering_constants(
    p: GammaParam, j_max: int = 4, config: BaseConfiguration = DEFAULT_CONFIG
) -> ScatteringConstants:
    """Collect T1, L_{-1} or L1(1) and c_0..c_{j_max} for one gamma."""
    if p.trivial:
        return ScatteringConstants(gamma=p.gamma, t1=0.0, t1_error=0.0, a=math.inf)
    t1 = t1_constant(p, config)
    _, error = t1_with_error(p, config)
    return ScatteringConstants(
        gamma=p.gamma,
        t1=t1,
        t1_error=error,
        l_minus1=None if p.is_one else scattering_data(p, config).l_minus1_residue(),
        l1_of_1=l1_of_1(config) if p.is_one else None,
        c=[c_coeff(j, p, config) for j in range(j_max + 1)],
        a=p.a,
    )
