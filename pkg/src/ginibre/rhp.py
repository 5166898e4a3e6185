"""Riemann-Hilbert solver for the Gaussian reflection coefficient.

The jump M_- = M_+ J on the real line factors as J = b_l b_u with lower and upper
triangular factors. Writing mu = M_+ b_l = M_- b_u^{-1}, the first row of mu solves

    mu11 + C_-[rho C_+[rho* mu11]] = 1,      mu12 = -C_+[rho* mu11],

with rho = R e^{2i theta}, rho* = R e^{-2i theta}, theta = kx + 4k^3 t, and the
second row the mirrored system. The equations are discretised on the rational grid
s = -scale cot(theta/2), where C_+ and C_- are exact masks on the FFT of the samples,
and solved with GMRES (dense LU as a fallback). Derivatives in x come from the
differentiated equations with the same operator, never from finite differences.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any, Callable, Literal, Optional, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.sparse.linalg import LinearOperator, gmres

from ginibre.models import GammaParam, MatrixField, PotentialTable, RhpSolution
from ginibre.scattering import reflection_r
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import (
    GinibreError,
    HyperbolicViolation,
    ParameterError,
    ResidualTooLarge,
    SingularSystem,
    TruncationLeak,
)
from shared.quadrature import ContourGrid, ContourShape, rational_grid
from shared.settings import get_settings

LOGGER = logging.getLogger(__name__)

DENSE_LIMIT = 2048
TAIL_TOL = 1e-13
HYPERBOLIC_TOL = 1e-8

Operator = Callable[[np.ndarray], np.ndarray]


class CauchyProjector:
    """Boundary values of the Cauchy transform on a rational grid of size n.

    With f = sum_n c_n z^n on |z| = 1, z = (s - i scale)/(s + i scale), the boundary
    values are C_+ f = sum_{n>=1} c_n (z^n - 1) and C_- f = C_+ f - f.
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.freq = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(int)
        self.shift = np.exp(-1j * np.pi * self.freq / n)
        self.mask_plus = (self.freq >= 1) & (self.freq <= n // 2 - 1)
        self.mask_minus = (self.freq <= -1) & (self.freq >= -(n // 2 - 1))

    def _lift(self, arr: np.ndarray, f: np.ndarray) -> np.ndarray:
        return arr.reshape((-1,) + (1,) * (f.ndim - 1))

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """Return c_n (numpy FFT ordering) along axis 0."""
        return np.fft.fft(f, axis=0) * self._lift(self.shift, f) / self.n

    def plus(self, f: np.ndarray) -> np.ndarray:
        spectrum = np.fft.fft(f, axis=0) * self._lift(self.mask_plus, f)
        constant = np.sum(spectrum * self._lift(self.shift, f), axis=0) / self.n
        return np.fft.ifft(spectrum, axis=0) - constant

    def minus(self, f: np.ndarray) -> np.ndarray:
        return self.plus(f) - f

    def at_infinity(self, f: np.ndarray) -> np.ndarray:
        """Value of the trigonometric interpolant at s = inf (theta = 0)."""
        return np.sum(self.coefficients(f), axis=0)

    def tail(self, f: np.ndarray) -> float:
        """Relative size of the highest quarter of the spectrum."""
        c = np.abs(self.coefficients(f))
        if c.ndim > 1:
            c = c.reshape(self.n, -1).max(axis=1)
        peak = float(c.max())
        if peak == 0.0:
            return 0.0
        return float(c[np.abs(self.freq) >= 3 * self.n // 8].max()) / peak

    def refine(self, f: np.ndarray, factor: int = 2) -> np.ndarray:
        """Trigonometric interpolation of decaying samples onto the grid of size factor*n."""
        size = factor * self.n
        c = self.coefficients(f)
        spectrum = np.zeros((size,) + f.shape[1:], dtype=complex)
        spectrum[self.freq % size] = c * self._lift(np.exp(1j * np.pi * self.freq / size), c)
        return size * np.fft.ifft(spectrum, axis=0)


@lru_cache(maxsize=8)
def projector(n: int) -> CauchyProjector:
    return CauchyProjector(n)


def _require_rational(grid: ContourGrid) -> None:
    if grid.shape is not ContourShape.RATIONAL:
        raise ParameterError("the Riemann-Hilbert solver needs a rational real-line grid")


def _mobius(k: np.ndarray, scale: float) -> np.ndarray:
    return (k - 1j * scale) / (k + 1j * scale)


def build_jump(x: float, t: float, p: GammaParam, grid: ContourGrid) -> MatrixField:
    """Return the jump matrix J_M of the Riemann-Hilbert problem at the grid nodes."""
    s = grid.nodes.real
    r = np.real(reflection_r(s, p))
    phase = np.exp(2j * (s * x + 4 * s**3 * t))
    values = np.empty((s.size, 2, 2), dtype=complex)
    values[:, 0, 0] = 1.0
    values[:, 0, 1] = r / phase
    values[:, 1, 0] = -r * phase
    values[:, 1, 1] = 1.0 - r**2
    return MatrixField(grid=grid, values=values)


def cauchy_plus(f: MatrixField, config: BaseConfiguration = DEFAULT_CONFIG) -> MatrixField:
    """Return the upper boundary value C_+ f at the nodes of a rational grid.

    Raises:
        TruncationLeak: f does not decay at the ends of the grid, or its interpolant
            does not vanish at infinity.
    """
    _require_rational(f.grid)
    values = f.values.reshape(f.grid.size, 4)
    proj = projector(f.grid.size)
    leak = max(
        float(np.max(np.abs(values[[0, -1]]))),
        float(np.max(np.abs(proj.at_infinity(values)))),
    )
    if leak > config.leak_tol:
        raise TruncationLeak("function does not decay at infinity", measured=leak, limit=config.leak_tol)
    return MatrixField(grid=f.grid, values=proj.plus(values).reshape(f.grid.size, 2, 2))


class _System:
    """Sampled symbols and operators of one (x, t, gamma) on one grid."""

    def __init__(self, x: float, t: float, p: GammaParam, grid: ContourGrid) -> None:
        self.grid = grid
        self.p = p
        self.s = grid.nodes.real
        self.weights = grid.weights.real
        self.proj = projector(grid.size)
        r = np.real(reflection_r(self.s, p))
        phase = np.exp(2j * (self.s * x + 4 * self.s**3 * t))
        self.rho = r * phase
        self.rho_star = r / phase
        self.d = 2j * self.s

    def rho_d(self, m: int) -> np.ndarray:
        return self.d**m * self.rho

    def rho_star_d(self, m: int) -> np.ndarray:
        return (-self.d) ** m * self.rho_star

    @staticmethod
    def _col(a: np.ndarray, v: np.ndarray) -> np.ndarray:
        return a if v.ndim == 1 else a[:, None]

    def pair_first(self, a: np.ndarray, b: np.ndarray, v: np.ndarray) -> np.ndarray:
        """C_-[a C_+[b v]]."""
        P = self.proj
        return P.minus(self._col(a, v) * P.plus(self._col(b, v) * v))

    def pair_second(self, a: np.ndarray, b: np.ndarray, v: np.ndarray) -> np.ndarray:
        """C_+[b C_-[a v]]."""
        P = self.proj
        return P.plus(self._col(b, v) * P.minus(self._col(a, v) * v))

    def first_row(self, v: np.ndarray) -> np.ndarray:
        return v + self.pair_first(self.rho, self.rho_star, v)

    def second_row(self, v: np.ndarray) -> np.ndarray:
        return v + self.pair_second(self.rho, self.rho_star, v)


class _Solver:
    """GMRES with a dense LU fallback for one operator and several right-hand sides."""

    def __init__(self, apply: Operator, n: int, config: BaseConfiguration, method: str) -> None:
        self.apply = apply
        self.n = n
        self.config = config
        self.method = method
        self._lu: Optional[tuple[np.ndarray, np.ndarray]] = None

    def _dense(self, rhs: np.ndarray) -> np.ndarray:
        if self._lu is None:
            if self.n > DENSE_LIMIT:
                raise SingularSystem(f"GMRES failed and n={self.n} is too large for a dense solve")
            matrix = self.apply(np.eye(self.n, dtype=complex))
            try:
                self._lu = lu_factor(matrix, check_finite=True)
            except (ValueError, np.linalg.LinAlgError) as exc:
                raise SingularSystem(f"dense factorisation failed: {exc}") from exc
        return lu_solve(self._lu, rhs)

    def __call__(self, rhs: np.ndarray) -> np.ndarray:
        if self.method == "dense":
            return self._dense(rhs)
        op = LinearOperator((self.n, self.n), matvec=self.apply, dtype=complex)
        solution, info = gmres(op, rhs, rtol=1e-13, atol=0.0, restart=120, maxiter=20)
        if info != 0:
            LOGGER.debug("gmres returned info=%d at n=%d, switching to LU", info, self.n)
            return self._dense(rhs)
        return solution


def _moment(system: _System, f: np.ndarray) -> complex:
    return complex(np.dot(system.weights, f)) / (2j * math.pi)


def choose_size(x: float, t: float, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> int:
    """Smallest grid size, doubling from `rhp_nodes`, that resolves the symbol rho."""
    size = config.rhp_nodes
    while size < config.rhp_max_nodes:
        system = _System(x, t, p, rational_grid(size, config.rhp_scale))
        if system.proj.tail(system.rho) < TAIL_TOL:
            break
        size *= 2
    return size


def _residual(x: float, t: float, p: GammaParam, system: _System, mu11: np.ndarray, mu22: np.ndarray, config: BaseConfiguration) -> float:
    fine = _System(x, t, p, rational_grid(2 * system.grid.size, config.rhp_scale))
    row1 = 1.0 + system.proj.refine(mu11 - 1.0)
    row2 = 1.0 + system.proj.refine(mu22 - 1.0)
    return max(
        float(np.max(np.abs(fine.first_row(row1) - 1.0))),
        float(np.max(np.abs(fine.second_row(row2) - 1.0))),
    )


def _plus_at(coefficients: np.ndarray, freq: np.ndarray, mask: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = freq[mask]
    basis = z[:, None] ** n[None, :] - 1.0
    return np.einsum("kn,nij->kij", basis, coefficients[mask])


def solve_sie(
    x: float,
    t: float,
    p: GammaParam,
    grid: Optional[ContourGrid] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
    method: Literal["gmres", "dense"] = "gmres",
) -> RhpSolution:
    """Solve the singular integral equation at (x, t, gamma).

    Args:
        x: Spatial variable.
        t: Time, |t| <= 0.1.
        p: Gamma parameter.
        grid: Rational grid; chosen adaptively when omitted.
        config: Numerical configuration.
        method: 'gmres' (dense LU on failure) or 'dense'.

    Returns:
        RhpSolution: Z = M_+ - I, the moments A1, B1, q and its derivatives, and the
            k -> 0 data r, w with int_q = ln(r + w).

    Raises:
        ResidualTooLarge: The residual on the doubled check grid exceeds the tolerance.
        HyperbolicViolation: r^2 - w^2 differs from 1.
        SingularSystem: Neither GMRES nor LU produced a solution.
    """
    if abs(t) > 0.1 + 1e-12:
        raise ParameterError(f"time {t} outside the supported range |t| <= 0.1")
    if grid is None:
        grid = rational_grid(choose_size(x, t, p, config), config.rhp_scale)
    _require_rational(grid)
    while True:
        system = _System(x, t, p, grid)
        first = _Solver(system.first_row, grid.size, config, method)
        ones = np.ones(grid.size, dtype=complex)
        mu11 = first(ones)
        if system.proj.tail(mu11 - 1.0) < TAIL_TOL or grid.size >= config.rhp_max_nodes:
            break
        LOGGER.debug("refining rational grid to %d nodes at x=%s", 2 * grid.size, x)
        grid = rational_grid(2 * grid.size, config.rhp_scale)

    P = system.proj
    rho, rho_star = system.rho, system.rho_star
    mu12 = -P.plus(rho_star * mu11)
    second = _Solver(system.second_row, grid.size, config, method)
    mu22 = second(ones)
    mu21 = P.minus(rho * mu22)

    def a_x(v: np.ndarray) -> np.ndarray:
        return system.pair_first(system.rho_d(1), rho_star, v) + system.pair_first(
            rho, system.rho_star_d(1), v
        )

    def a_xx(v: np.ndarray) -> np.ndarray:
        return (
            system.pair_first(system.rho_d(2), rho_star, v)
            + 2 * system.pair_first(system.rho_d(1), system.rho_star_d(1), v)
            + system.pair_first(rho, system.rho_star_d(2), v)
        )

    mu11_x = -first(a_x(mu11))
    mu11_xx = -first(a_xx(mu11) + 2 * a_x(mu11_x))
    mu12_x = -P.plus(system.rho_star_d(1) * mu11 + rho_star * mu11_x)

    m12 = _moment(system, mu11 * rho_star)
    m12_x = _moment(system, mu11_x * rho_star + mu11 * system.rho_star_d(1))
    m12_xx = _moment(
        system,
        mu11_xx * rho_star + 2 * mu11_x * system.rho_star_d(1) + mu11 * system.rho_star_d(2),
    )
    m11 = -_moment(system, mu12 * rho)
    m11_x = -_moment(system, mu12_x * rho + mu12 * system.rho_d(1))

    h = np.empty((grid.size, 2, 2), dtype=complex)
    h[:, 0, 0] = mu12 * rho
    h[:, 0, 1] = -mu11 * rho_star
    h[:, 1, 0] = mu22 * rho
    h[:, 1, 1] = -mu21 * rho_star
    flat = h.reshape(grid.size, 4)
    coefficients = P.coefficients(flat).reshape(grid.size, 2, 2)
    z_values = P.plus(flat).reshape(grid.size, 2, 2)

    at_zero = np.eye(2) + _plus_at(coefficients, P.freq, P.mask_plus, np.array([-1.0 + 0j]))[0]
    r = at_zero[0, 0] + p.sqrt_gamma * at_zero[0, 1]
    w = at_zero[0, 1]
    hyperbolic = abs(r * r - w * w - 1.0)
    if hyperbolic > HYPERBOLIC_TOL:
        raise HyperbolicViolation(
            f"r^2 - w^2 != 1 at x={x}", measured=hyperbolic, limit=HYPERBOLIC_TOL
        )

    residual = _residual(x, t, p, system, mu11, mu22, config)
    if residual > config.residual_tol:
        raise ResidualTooLarge(
            f"singular integral equation residual at x={x}, gamma={p.gamma}",
            measured=residual,
            limit=config.residual_tol,
        )
    b1 = (m12 / 1j).real
    a1 = (m11 / 1j).real
    LOGGER.debug("x=%s t=%s gamma=%s: n=%d residual=%.2e", x, t, p.gamma, grid.size, residual)
    return RhpSolution(
        x=x,
        t=t,
        p=p,
        z_field=MatrixField(grid=grid, values=z_values),
        coefficients=coefficients,
        a1=a1,
        a1_x=(m11_x / 1j).real,
        b1=b1,
        q=2 * b1,
        q_x=2 * (m12_x / 1j).real,
        q_xx=2 * (m12_xx / 1j).real,
        int_q=float(np.log((r + w).real)),
        int_q2=-2 * a1,
        r=float(r.real),
        w=float(w.real),
        residual=residual,
    )


def eval_m(
    k: complex | np.ndarray, sol: RhpSolution, side: Optional[Literal["+", "-"]] = None
) -> np.ndarray:
    """Evaluate M(x; k) off the real line, or its boundary value on the given side.

    Returns an array of shape (2, 2), or (len(k), 2, 2) for array input.
    """
    k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
    grid = sol.z_field.grid
    P = projector(grid.size)
    z = _mobius(k_arr, grid.scale or 1.0)
    upper = k_arr.imag > 0 if side is None else np.full(k_arr.shape, side == "+")
    if side is None and np.any(k_arr.imag == 0):
        raise ParameterError("real k needs a boundary side")
    out = np.empty((k_arr.size, 2, 2), dtype=complex)
    if np.any(upper):
        out[upper] = _plus_at(sol.coefficients, P.freq, P.mask_plus, z[upper])
    if np.any(~upper):
        out[~upper] = -_plus_at(sol.coefficients, P.freq, P.mask_minus, z[~upper])
    out += np.eye(2)
    return out[0] if np.ndim(k) == 0 else out


def large_k_moment(sol: RhpSolution, radius: float = 1e3) -> complex:
    """Estimate lim k (M - I)_12 along the imaginary axis by Richardson extrapolation.

    Uses k = i*radius, 2i*radius, 4i*radius and eliminates the 1/k and 1/k^2 terms.
    """
    ks = 1j * radius * np.array([1.0, 2.0, 4.0])
    f = ks * (eval_m(ks, sol)[:, 0, 1])
    first = 2 * f[1:] - f[:-1]
    return complex((4 * first[1] - first[0]) / 3)


def int_q_from_zero(sol: RhpSolution) -> float:
    """Return the integral of q over (x, inf) from the upper boundary value M_+(0).

    r = (M_+)_11 + sqrt(gamma) (M_+)_12 and w = (M_+)_12 are the entries of M_+(0)
    times the lower triangular factor of the jump; the integral is ln(r + w).

    Raises:
        HyperbolicViolation: |r^2 - w^2 - 1| > 1e-8.
    """
    at_zero = eval_m(0.0, sol, side="+")
    r = at_zero[0, 0] + sol.p.sqrt_gamma * at_zero[0, 1]
    w = at_zero[0, 1]
    gap = abs(r * r - w * w - 1.0)
    if gap > HYPERBOLIC_TOL:
        raise HyperbolicViolation("r^2 - w^2 != 1", measured=gap, limit=HYPERBOLIC_TOL)
    if sol.p.is_one:
        LOGGER.debug("gamma=1: r-w=%.12g, 1/(r+w)=%.12g", (r - w).real, 1 / (r + w).real)
    return float(np.log((r + w).real))


def da1_dx_check(sol: RhpSolution) -> float:
    """Return |d A1/dx - 2 B1^2|."""
    return abs(sol.a1_x - 2 * sol.b1**2)


def _row(args: tuple[float, float, GammaParam, BaseConfiguration]) -> dict[str, Any]:
    x, t, p, config = args
    try:
        sol = solve_sie(x, t, p, config=config)
    except GinibreError as exc:
        return {"x": x, "error": getattr(exc, "check", type(exc).__name__), "message": str(exc)}
    return {
        "x": x,
        "q": sol.q,
        "q_x": sol.q_x,
        "q_xx": sol.q_xx,
        "u": sol.u,
        "a1": sol.a1,
        "int_q": sol.int_q,
        "int_q2": sol.int_q2,
        "int_u": sol.int_u,
        "residual": sol.residual,
    }


def potential_table(
    p: GammaParam,
    x_grid: Sequence[float],
    t: float = 0.0,
    config: BaseConfiguration = DEFAULT_CONFIG,
    workers: Optional[int] = None,
) -> PotentialTable:
    """Solve at every x of a strictly increasing grid and tabulate the potentials.

    Rows whose solve fails are kept as NaN and listed in `failures`.
    """
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or xs.size == 0 or np.any(np.diff(xs) <= 0):
        raise ParameterError("x grid must be a non-empty strictly increasing sequence")
    workers = workers or get_settings().workers
    jobs = [(float(x), t, p, config) for x in xs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_row(job) for job in jobs]
    columns = ("q", "q_x", "q_xx", "u", "a1", "int_q", "int_q2", "int_u", "residual")
    data = {name: np.full(xs.size, np.nan) for name in columns}
    failures = []
    for index, row in enumerate(rows):
        if "error" in row:
            LOGGER.warning("row x=%s failed: %s", row["x"], row["message"])
            failures.append({"index": index, "x": row["x"], "check": row["error"], "message": row["message"]})
            continue
        for name in columns:
            data[name][index] = row[name]
    return PotentialTable(gamma=p.gamma, t=t, x=xs, failures=failures, **data)
