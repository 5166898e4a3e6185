"""Gelfand-Levitan-Marchenko route to u(x, 0) and K(gamma).

For the Schrodinger operator -d^2/dx^2 + u(x, 0) the kernels solve

    K_+(x,y) + R_+(x+y) + int_x^inf  K_+(x,z) R_+(z+y) dz = 0,   y >= x,
    K_-(x,y) + R_-(x+y) + int_-inf^x K_-(x,z) R_-(z+y) dz = 0,   y <= x,

with K_+(x,x) = 1/2 int_x^inf u and K_-(x,x) = 1/2 int_-inf^x u. Each fixed-x equation
is solved in y by Gauss-Legendre Nystrom on a window outside of which the reflection
kernel is below 1e-14.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.linalg import LinAlgError, solve

from ginibre.models import GammaParam, GlmKernelTable, GlmSide, GlmTable, PotentialTable
from ginibre.scattering import scattering_data, t1_constant
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import (
    BlowUp,
    KernelTruncation,
    ParameterError,
    RealnessViolation,
    SingularSystem,
    SplitInconsistency,
    TruncationLeak,
)
from shared.quadrature import gauss_legendre_panels

LOGGER = logging.getLogger(__name__)

KERNEL_TOL = 1e-14
K_HALF_WIDTH = 16.0
K_STEP = 1.0 / 64
W_STEP = 0.01
SPLIT_TOL = 1e-5
PARSEVAL_TOL = 1e-6
RICCATI_BOUND = 1e3

Kernel = Callable[[np.ndarray], np.ndarray]


def r_plus(x: float | np.ndarray, p: GammaParam) -> float | np.ndarray:
    """Return R_+(x) = -sqrt(gamma/pi) e^{-x^2}."""
    return -math.sqrt(p.gamma / math.pi) * np.exp(-np.square(x))


def _k_grid() -> np.ndarray:
    count = int(round(K_HALF_WIDTH / K_STEP))
    return np.arange(-count, count + 1) * K_STEP


def _fourier(values: np.ndarray, k: np.ndarray, w: np.ndarray, chunk: int = 1024) -> np.ndarray:
    # trapezoid sum of (1/2pi) int L(k) e^{-ikw} dk; the end values are below the leak tolerance
    out = np.empty(w.size, dtype=complex)
    for start in range(0, w.size, chunk):
        block = w[start : start + chunk]
        out[start : start + chunk] = np.exp(-1j * np.outer(block, k)) @ values
    return out * K_STEP / (2 * math.pi)


@lru_cache(maxsize=16)
def _l_samples(p: GammaParam, config: BaseConfiguration) -> tuple[np.ndarray, np.ndarray]:
    k = _k_grid()
    values = np.asarray(scattering_data(p, config).left_reflection(k + 0j, "+"), dtype=complex)
    leak = float(max(abs(values[0]), abs(values[-1])))
    if leak > config.leak_tol:
        raise TruncationLeak("L does not decay at the ends of the k-grid", measured=leak, limit=config.leak_tol)
    return k, values


def r_minus(
    x: float | np.ndarray, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG
) -> float | np.ndarray:
    """Return R_-(x) = (1/2pi) int L(k) e^{-ikx} dk by a direct Fourier sum.

    Raises:
        RealnessViolation: The imaginary part exceeds the realness tolerance.
        TruncationLeak: |L| at the ends of the k-grid exceeds the leak tolerance.
    """
    if p.trivial:
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    k, values = _l_samples(p, config)
    result = _fourier(values, k, np.atleast_1d(np.asarray(x, dtype=float)))
    _check_real(result, config)
    return result.real if np.ndim(x) else float(result.real[0])


def _check_real(values: np.ndarray, config: BaseConfiguration) -> None:
    worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if worst > config.realness_tol:
        raise RealnessViolation("R_- has an imaginary part", measured=worst, limit=config.realness_tol)


class GlmKernels:
    """Prepared reflection kernels of one gamma.

    R_+ is the closed form. R_- is tabulated on a w-grid of step 0.01 from the Fourier
    sum of L and interpolated with a cubic spline; below `w_cut` it is treated as zero,
    and above the table it is summed directly.

    Attributes:
        w_cut: Largest w below which |R_-| < 1e-14 on the whole table.
        parseval_gap: |int |R_-|^2 dw - (1/2pi) int |L|^2 dk|.
    """

    def __init__(
        self,
        p: GammaParam,
        config: BaseConfiguration = DEFAULT_CONFIG,
        *,
        w_max: float = 16.0,
    ) -> None:
        self.p = p
        self.config = config
        self.w_max = w_max
        self.w_cut = -math.inf
        self.parseval_gap = 0.0
        self._spline: Optional[CubicSpline] = None
        if p.trivial:
            return
        if p.is_one:
            w_min = -40.0
        else:
            w_min = -(36.0 + max(0.0, math.log(2 * p.kappa))) / p.kappa - 2.0
        w = np.arange(w_min, w_max + W_STEP / 2, W_STEP)
        k, l_values = _l_samples(p, config)
        table = _fourier(l_values, k, w)
        _check_real(table, config)
        values = table.real
        significant = np.nonzero(np.abs(values) >= KERNEL_TOL)[0]
        if significant.size and significant[0] == 0:
            raise KernelTruncation(
                f"R_- is not negligible at the left end w={w_min:.2f} of its table",
                measured=float(abs(values[0])),
                limit=KERNEL_TOL,
            )
        self.w_cut = float(w[significant[0]]) if significant.size else w_max
        self._spline = CubicSpline(w, values, extrapolate=False)
        energy_l = float(np.sum(np.abs(l_values) ** 2) * K_STEP) / (2 * math.pi)
        self.parseval_gap = abs(simpson(values**2, x=w) - energy_l)
        LOGGER.debug(
            "gamma=%s: R_- table on [%.2f, %.2f], cut at %.2f, Parseval gap %.2e",
            p.gamma, w_min, w_max, self.w_cut, self.parseval_gap,
        )

    def check_parseval(self, limit: float = PARSEVAL_TOL) -> float:
        """Return the Parseval gap of the R_- table.

        Raises:
            KernelTruncation: int R_-^2 dw and (1/2pi) int |L|^2 dk differ by more than `limit`.
        """
        if not self.parseval_gap <= limit:
            raise KernelTruncation(
                f"R_- table of gamma={self.p.gamma} loses energy", measured=self.parseval_gap, limit=limit
            )
        return self.parseval_gap

    def plus(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(r_plus(w, self.p))

    def minus(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self._spline is None:
            return np.zeros_like(w)
        out = np.where(w < self.w_cut, 0.0, self._spline(np.clip(w, None, self.w_max)))
        above = w > self.w_max
        if np.any(above):
            out[above] = r_minus(w[above], self.p, self.config)
        return out


@lru_cache(maxsize=16)
def glm_kernels(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> GlmKernels:
    return GlmKernels(p, config)


def _nystrom(kernel: Kernel, x: float, lo: float, hi: float, order: int, width: float) -> float:
    nodes, weights = gauss_legendre_panels([lo, hi], [width], order)
    z, wt = nodes.real, weights.real
    matrix = np.eye(z.size) + kernel(z[:, None] + z[None, :]) * wt[None, :]
    rhs = -kernel(x + z)
    try:
        f = solve(matrix, rhs, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise SingularSystem(f"Nystrom system singular at x={x}: {exc}") from exc
    return float(-kernel(np.array([2 * x]))[0] - np.dot(wt * f, kernel(z + x)))


def solve_volterra(
    side: GlmSide | str,
    x: float,
    p: GammaParam,
    config: BaseConfiguration = DEFAULT_CONFIG,
    kernels: Optional[GlmKernels] = None,
) -> float:
    """Return the kernel diagonal K_+(x,x) or K_-(x,x).

    Raises:
        KernelTruncation: The reflection kernel is not negligible at the window edge.
    """
    side = GlmSide(side)
    if p.trivial:
        return 0.0
    kernels = kernels or glm_kernels(p, config)
    order, width = config.glm_panel_order, config.glm_panel_width
    if side is GlmSide.PLUS:
        hi = max(6.0 - x, x + 1.0)
        edge = abs(float(r_plus(x + hi, p)))
        if edge > KERNEL_TOL:
            raise KernelTruncation(f"R_+ not negligible at y={hi}", measured=edge, limit=KERNEL_TOL)
        return _nystrom(kernels.plus, x, x, hi, order, width)
    lo = kernels.w_cut - x
    if lo >= x:
        return float(-kernels.minus(np.array([2 * x]))[0])
    return _nystrom(kernels.minus, x, lo, x, order, width / 2)


def kernel_table(
    side: GlmSide | str,
    p: GammaParam,
    x_values: Sequence[float],
    config: BaseConfiguration = DEFAULT_CONFIG,
) -> GlmKernelTable:
    side = GlmSide(side)
    kernels = glm_kernels(p, config)
    xs = np.asarray(x_values, dtype=float)
    diag = np.array([solve_volterra(side, float(x), p, config, kernels) for x in xs])
    source = "closed form" if side is GlmSide.PLUS else "Fourier table"
    return GlmKernelTable(side=side, gamma=p.gamma, x_values=xs, kernel_diag=diag, r_kernel=source)


def glm_table(
    p: GammaParam,
    x_values: Sequence[float],
    config: BaseConfiguration = DEFAULT_CONFIG,
    degree: int = 96,
) -> GlmTable:
    """Tabulate both kernel diagonals and u = -2 d/dx K_+(x,x).

    The derivative is taken from a Chebyshev interpolant of K_+(x,x) of the given
    degree on the range of `x_values`.
    """
    xs = np.asarray(x_values, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ParameterError("x grid must be strictly increasing with at least two points")
    kernels = glm_kernels(p, config)

    def plus_diag(points: np.ndarray) -> np.ndarray:
        return np.array([solve_volterra(GlmSide.PLUS, float(x), p, config, kernels) for x in points])

    interpolant = Chebyshev.interpolate(plus_diag, degree, domain=[xs[0], xs[-1]])
    minus = np.array([solve_volterra(GlmSide.MINUS, float(x), p, config, kernels) for x in xs])
    return GlmTable(
        gamma=p.gamma,
        x=xs,
        k_plus_diag=plus_diag(xs),
        k_minus_diag=minus,
        u_glm=-2 * interpolant.deriv()(xs),
    )


def _gl_integral(fn: Callable[[float], float], lo: float, hi: float, config: BaseConfiguration) -> float:
    if hi <= lo:
        return 0.0
    nodes, weights = gauss_legendre_panels([lo, hi], [config.glm_panel_width / 2], config.glm_panel_order)
    return float(sum(w.real * fn(float(z.real)) for z, w in zip(nodes, weights)))


def _minus_integral(p: GammaParam, x0: float, config: BaseConfiguration, kernels: GlmKernels) -> float:
    # int_{-inf}^{x0} 2 K_-(x,x) dx; beyond x_m the left-tail model closes it in closed form
    if p.is_one:
        x_m, tail = -14.0, 0.0
    else:
        l_minus1 = scattering_data(p, config).l_minus1_residue()
        x_m = math.log(2 * p.kappa * 1e-8 / l_minus1) / (2 * p.kappa)
        x_m = min(x_m, x0)
        ratio = math.exp(2 * p.kappa * x_m) * l_minus1 / (2 * p.kappa)
        tail = -2 * math.log1p(ratio)
    body = _gl_integral(
        lambda x: 2 * solve_volterra(GlmSide.MINUS, x, p, config, kernels), x_m, x0, config
    )
    return body + tail


def _plus_integral(p: GammaParam, x0: float, config: BaseConfiguration, kernels: GlmKernels) -> float:
    hi = max(x0, 0.0) + 4.0
    return _gl_integral(
        lambda x: 2 * solve_volterra(GlmSide.PLUS, x, p, config, kernels), x0, hi, config
    )


def _split_value(p: GammaParam, x0: float, config: BaseConfiguration, kernels: GlmKernels) -> float:
    t1 = t1_constant(p, config)
    return (
        -_minus_integral(p, x0, config, kernels)
        + _plus_integral(p, x0, config, kernels)
        + x0 * 2 * t1
    )


def k_invariant_glm(
    p: GammaParam,
    x0: float = -1.0,
    config: BaseConfiguration = DEFAULT_CONFIG,
    *,
    check_x0: Optional[float] = 1.0,
) -> float:
    """Return K(gamma) = int x u(x, 0) dx by splitting the line at x0.

    K = -int_{-inf}^{x0} 2K_-(x,x) dx + int_{x0}^{inf} 2K_+(x,x) dx + 2 x0 T1(gamma).

    Args:
        p: Gamma parameter.
        x0: Split point.
        config: Numerical configuration.
        check_x0: Second split point; the two values must agree to 1e-5. None skips
            the comparison.

    Raises:
        SplitInconsistency: The value depends on the split point.
    """
    if p.trivial:
        return 0.0
    kernels = glm_kernels(p, config)
    value = _split_value(p, x0, config, kernels)
    if check_x0 is not None and check_x0 != x0:
        other = _split_value(p, check_x0, config, kernels)
        gap = abs(value - other)
        if gap > SPLIT_TOL:
            raise SplitInconsistency(
                f"K({p.gamma}) depends on the split point ({x0} vs {check_x0})",
                measured=gap,
                limit=SPLIT_TOL,
            )
        LOGGER.info("K(%s) split points %s/%s agree to %.2e", p.gamma, x0, check_x0, gap)
    return value


def riccati_q_from_u(u_table: PotentialTable, bound: float = RICCATI_BOUND) -> np.ndarray:
    """Recover q from u by integrating q' = q^2 - u from the right end of the table.

    The initial value at X = x[-1] >= 8 is the Gaussian tail 2 sqrt(gamma/pi) e^{-4X^2}.
    u is interpolated with a cubic Hermite spline when q_xx is available.

    Raises:
        BlowUp: |q| exceeds `bound`.
    """
    x = np.asarray(u_table.x, dtype=float)
    u = np.asarray(u_table.u, dtype=float)
    if x[-1] < 8.0:
        raise ParameterError(f"u must be resolved up to x >= 8, table ends at {x[-1]}")
    if not np.all(np.isfinite(u)):
        raise ParameterError("u table contains failed rows")
    if not np.any(u):
        return np.zeros_like(x)
    u_x = 2 * u_table.q * u_table.q_x - u_table.q_xx
    if np.all(np.isfinite(u_x)):
        interpolant = CubicHermiteSpline(x, u, u_x)
    else:
        interpolant = CubicSpline(x, u)
    start = 2 * math.sqrt(u_table.gamma / math.pi) * math.exp(-4 * x[-1] ** 2)

    def blow_up(_: float, q: np.ndarray) -> float:
        return abs(q[0]) - bound

    blow_up.terminal = True  # type: ignore[attr-defined]
    sol = solve_ivp(
        lambda s, q: q**2 - interpolant(s),
        (x[-1], x[0]),
        [start],
        method="DOP853",
        t_eval=x[::-1],
        rtol=1e-12,
        atol=1e-14,
        events=blow_up,
    )
    if sol.status == 1 or not sol.success:
        where = sol.t[-1] if sol.t.size else x[-1]
        raise BlowUp(f"Riccati solution escaped near x={where:.3f}", measured=bound, limit=bound)
    return sol.y[0][::-1]
