"""Closed-form left-tail models of q and the series of L_{-1} near gamma = 1.

For gamma < 1 write E(x) = e^{2 kappa x} L_{-1} and D = 4 kappa^2 - E^2. Then

    q ~ 8 kappa^2 E / D,    int_x^inf q^2 ~ 2 T1 - 4 kappa E^2 / D,

and for gamma = 1, q ~ 2/(L1 - 2x) and int_x^inf q^2 ~ 2 T1 - 2/(L1 - 2x), all up to
errors that vanish faster than any exponential as x -> -inf.
"""

from __future__ import annotations

import logging
import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ginibre.models import GammaParam, LkappaFit, PotentialTable, ResidualTable, TailModel, TailRegime
from ginibre.scattering import L1_OF_1, lm1_over_2kappa, scattering_data, t1_constant
from shared.configuration import DEFAULT_CONFIG, BaseConfiguration
from shared.exceptions import IllConditionedFit, ModelPole, ParameterError

LOGGER = logging.getLogger(__name__)

FIT_TOL = 1e-6
FIT_DEGREE = 6
GAMMA_ONE_VALID_FROM = -5.0


@lru_cache(maxsize=32)
def tail_model(p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> TailModel:
    """Build the left-tail model of gamma.

    For gamma < 1, `valid_from` is the x where E^2/(4 kappa^2) = 1/4; for gamma = 1
    it is -5.
    """
    if p.trivial:
        raise ParameterError("gamma = 0 has no left tail, q vanishes identically")
    t1 = t1_constant(p, config)
    if p.is_one:
        return TailModel(regime=TailRegime.GAMMA_ONE, l1=L1_OF_1, t1=t1, valid_from=GAMMA_ONE_VALID_FROM)
    l_minus1 = scattering_data(p, config).l_minus1_residue()
    valid_from = math.log(p.kappa / l_minus1) / (2 * p.kappa)
    return TailModel(
        regime=TailRegime.GAMMA_LESS_ONE,
        kappa=p.kappa,
        l_minus1=l_minus1,
        t1=t1,
        valid_from=valid_from,
    )


def _pieces(x: float, m: TailModel) -> tuple[float, float]:
    # (E, D) for gamma < 1, (L1 - 2x, same) for gamma = 1
    if m.regime is TailRegime.GAMMA_ONE:
        assert m.l1 is not None
        gap = m.l1 - 2 * x
        if gap <= 0:
            raise ModelPole(f"L1 - 2x <= 0 at x={x}", measured=gap, limit=0.0)
        return gap, gap
    assert m.kappa is not None and m.l_minus1 is not None
    e = math.exp(2 * m.kappa * x) * m.l_minus1
    d = 4 * m.kappa**2 - e * e
    if d <= 0:
        raise ModelPole(f"4 kappa^2 - E^2 <= 0 at x={x}", measured=d, limit=0.0)
    return e, d


def q_model(x: float, m: TailModel) -> float:
    """Return the model value of q(x, 0).

    Raises:
        ModelPole: The model denominator is not positive at x.
    """
    e, d = _pieces(x, m)
    if m.regime is TailRegime.GAMMA_ONE:
        return 2.0 / d
    return 8 * m.kappa**2 * e / d  # type: ignore[operator]


def qx_model(x: float, m: TailModel) -> float:
    """Return the x-derivative of the model q."""
    e, d = _pieces(x, m)
    if m.regime is TailRegime.GAMMA_ONE:
        return 4.0 / d**2
    return 16 * m.kappa**3 * e * (d + 2 * e * e) / d**2  # type: ignore[operator]


def intq2_model(x: float, m: TailModel, t1: Optional[float] = None) -> float:
    """Return the model value of int_x^inf q^2, using `t1` instead of the model's T1 if given."""
    t1 = m.t1 if t1 is None else t1
    e, d = _pieces(x, m)
    if m.regime is TailRegime.GAMMA_ONE:
        return 2 * t1 - 2.0 / d
    return 2 * t1 - 4 * m.kappa * e * e / d  # type: ignore[operator]


def intq_model(x: float, m: TailModel) -> float:
    """Return int_x^inf q for gamma = 1, ln(L1 - 2x) + ln(2)/2."""
    if m.regime is not TailRegime.GAMMA_ONE:
        raise ParameterError("int q has a closed-form tail only for gamma = 1")
    gap, _ = _pieces(x, m)
    return math.log(gap) + 0.5 * math.log(2.0)


def intq_increment(x: float, anchor: float, m: TailModel) -> float:
    """Return the model value of int_x^anchor q for x <= anchor.

    The antiderivative of the gamma < 1 model is -ln((2 kappa + E)/(2 kappa - E)).
    """
    if m.regime is TailRegime.GAMMA_ONE:
        return intq_model(x, m) - intq_model(anchor, m)
    e_x, _ = _pieces(x, m)
    e_a, _ = _pieces(anchor, m)
    two_kappa = 2 * m.kappa  # type: ignore[operator]
    return math.log((two_kappa + e_a) / (two_kappa - e_a)) - math.log((two_kappa + e_x) / (two_kappa - e_x))


def model_alpha_beta(
    x: float, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG
) -> tuple[float, float]:
    """Return (alpha, beta) of the model matrix, with q ~ 2 beta and A1 ~ -T1 + alpha.

    Raises:
        ModelPole: The model denominator is not positive at x.
    """
    m = tail_model(p, config)
    e, d = _pieces(x, m)
    if m.regime is TailRegime.GAMMA_ONE:
        return 1.0 / d, 1.0 / d
    return 2 * m.kappa * e * e / d, 4 * m.kappa**2 * e / d  # type: ignore[operator]


def n_mod(k: complex, x: float, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> np.ndarray:
    """Return the model matrix at (x, k); poles at +-i kappa (at 0 for gamma = 1)."""
    alpha, beta = model_alpha_beta(x, p, config)
    kappa = 0.0 if p.is_one else p.kappa
    return np.array(
        [
            [1 + 1j * alpha / (k + 1j * kappa), 1j * beta / (k - 1j * kappa)],
            [-1j * beta / (k + 1j * kappa), 1 - 1j * alpha / (k - 1j * kappa)],
        ]
    )


def n_mod_det(k: complex, x: float, p: GammaParam, config: BaseConfiguration = DEFAULT_CONFIG) -> complex:
    """Return det of the model matrix, identically 1."""
    return complex(np.linalg.det(n_mod(k, x, p, config)))


def intq2_q_relation(
    x: float,
    m: TailModel,
    q: Optional[float] = None,
    int_q2: Optional[float] = None,
) -> float:
    """Return (int_x^inf q^2 - 2 T1) + q E/(2 kappa), or + q for gamma = 1.

    Model values are used for q and int_q2 when they are not supplied, in which case
    the result vanishes up to rounding.
    """
    q = q_model(x, m) if q is None else q
    int_q2 = intq2_model(x, m) if int_q2 is None else int_q2
    if m.regime is TailRegime.GAMMA_ONE:
        return int_q2 - 2 * m.t1 + q
    e, _ = _pieces(x, m)
    return int_q2 - 2 * m.t1 + q * e / (2 * m.kappa)  # type: ignore[operator]


def verify_table(table: PotentialTable, m: TailModel) -> ResidualTable:
    """Return solver-minus-model residuals on the rows of `table` with x <= valid_from."""
    keep = table.x <= m.valid_from
    xs = table.x[keep]
    q = np.array([q_model(x, m) for x in xs])
    int_q2 = np.array([intq2_model(x, m) for x in xs])
    if m.regime is TailRegime.GAMMA_ONE:
        int_q = np.array([intq_model(x, m) for x in xs])
        a1 = -m.t1 + 0.5 * q
    else:
        int_q = np.full(xs.size, np.nan)
        # alpha = q E/(4 kappa)
        e = np.exp(2 * m.kappa * xs) * m.l_minus1  # type: ignore[operator]
        a1 = -m.t1 + q * e / (4 * m.kappa)  # type: ignore[operator]
    relation = np.array(
        [intq2_q_relation(x, m, qv, iv) for x, qv, iv in zip(xs, table.q[keep], table.int_q2[keep])]
    )
    return ResidualTable(
        gamma=table.gamma,
        x=xs,
        q_residual=table.q[keep] - q,
        int_q2_residual=table.int_q2[keep] - int_q2,
        int_q_residual=table.int_q[keep] - int_q,
        a1_residual=table.a1[keep] - a1,
        relation_residual=relation,
    )


def default_kappas() -> np.ndarray:
    return np.linspace(0.02, 0.3, 24)


def fit_lkappa_series(
    kappas: Optional[Sequence[float]] = None,
    config: BaseConfiguration = DEFAULT_CONFIG,
    *,
    values: Optional[Sequence[float]] = None,
    degree: int = FIT_DEGREE,
) -> LkappaFit:
    """Fit L_{-1}/(2 kappa) = 1 - l1 kappa + l2 kappa^2 - l3 kappa^3 + ... by least squares.

    The constant term is fixed to 1 and the polynomial has the given degree.

    Args:
        kappas: Sample points in (0, 0.3]; defaults to 24 points on [0.02, 0.3].
        config: Numerical configuration for the L_{-1} evaluations.
        values: Precomputed L_{-1}/(2 kappa) at `kappas`; computed when omitted.
        degree: Polynomial degree.

    Raises:
        IllConditionedFit: The largest residual exceeds 1e-6.
    """
    ks = default_kappas() if kappas is None else np.asarray(kappas, dtype=float)
    if ks.size < max(6, degree + 1) or np.any(ks <= 0) or np.any(ks > 0.3):
        raise ParameterError(f"need at least {max(6, degree + 1)} kappas in (0, 0.3]")
    if values is None:
        ys = np.array([lm1_over_2kappa(GammaParam(gamma=math.exp(-(k**2) / 2)), config) for k in ks])
    else:
        ys = np.asarray(values, dtype=float)
    scale = float(ks.max())
    powers = np.arange(1, degree + 1)
    design = (ks[:, None] / scale) ** powers[None, :]
    coef, _, rank, _ = np.linalg.lstsq(design, ys - 1.0, rcond=None)
    if rank < degree:
        raise IllConditionedFit(f"design matrix has rank {rank} < {degree}", measured=rank, limit=degree)
    fitted = design @ coef
    residual = float(np.max(np.abs(fitted - (ys - 1.0))))
    if residual > FIT_TOL:
        raise IllConditionedFit("L_-1/(2 kappa) series fit residual too large", measured=residual, limit=FIT_TOL)
    dof = max(ks.size - degree, 1)
    sigma2 = float(np.sum((fitted - (ys - 1.0)) ** 2)) / dof
    covariance = sigma2 * np.linalg.pinv(design.T @ design)
    coef = coef / scale**powers
    errors = np.sqrt(np.abs(np.diag(covariance)))[:3] / scale ** powers[:3]
    fit = LkappaFit(
        l1=float(-coef[0]),
        l2=float(coef[1]),
        l3=float(-coef[2]),
        residual=residual,
        std_errors=[float(e) for e in errors],
        degree=degree,
        kappas=[float(k) for k in ks],
    )
    LOGGER.info("series fit: l1=%.10f l2=%.10f l3=%.10f residual=%.1e", fit.l1, fit.l2, fit.l3, residual)
    return fit


def intq2_increment(x: float, anchor: float, m: TailModel) -> float:
    """Return the model value of int_x^anchor (int_z^inf q^2) dz for x <= anchor."""
    _, d_x = _pieces(x, m)
    _, d_a = _pieces(anchor, m)
    return 2 * m.t1 * (anchor - x) - math.log(d_x / d_a)


def intu_increment(x: float, anchor: float, m: TailModel) -> float:
    """Return the model value of int_x^anchor (int_z^inf u) dz for x <= anchor."""
    return intq_increment(x, anchor, m) + intq2_increment(x, anchor, m)


def intu_left_model(x: float, m: TailModel) -> float:
    """Return int_-inf^x of the model u = q^2 - q_x, -4 kappa E/(2 kappa + E) for gamma < 1.

    The gamma = 1 model u vanishes identically.
    """
    if m.regime is TailRegime.GAMMA_ONE:
        return 0.0
    e, _ = _pieces(x, m)
    return -4 * m.kappa * e / (2 * m.kappa + e)  # type: ignore[operator]
