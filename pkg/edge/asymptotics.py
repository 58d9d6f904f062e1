"""
Closed-form right-hand sides of the large-gap and large-n expansions, and the
residual tables and least-squares fits that compare them with computed values.
"""
import logging
import math

import numpy as np

from numerics.exceptions import DomainError
from numerics.extprec import DDouble, LN2, as_dd, dd_ln
from numerics.specfun import DD_PI, PRECISION_DD, chi_constant, zeta_prime_minus1_dd

from .fredholm import airy_gap_log_det
from .painleve import hastings_mcleod, tw_log_cdf
from .schemas import ResidualRow, SlopeFit

logger = logging.getLogger(__name__)

SOURCE_PAINLEVE = 'painleve'
SOURCE_FREDHOLM = 'fredholm'
SOURCE_CHOICES = [
    (SOURCE_PAINLEVE, 'Hastings-McLeod integral representation'),
    (SOURCE_FREDHOLM, 'Nystrom determinant'),
]

RESIDUAL_NODES = 96
# below this distance from 1 the edge bracket is summed as a series
EDGE_SERIES_SWITCH = 0.1


def _check_unit_interval(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha={alpha} outside (0, 1)")


def thm1_rhs(s: float, chi: float = None) -> float:
    """
    -s**3/12 - ln(s)/8 + chi
    :param chi: override of the constant term, defaults to (ln 2)/24 + zeta'(-1)
    """
    if not s > 0.0:
        raise DomainError(f"s={s} must be positive")
    if chi is None:
        chi = chi_constant().chi
    return -s ** 3 / 12.0 - math.log(s) / 8.0 + chi


def lemma2_rhs(n: int, alpha: float) -> float:
    _check_unit_interval(alpha)
    return n * n * (1.0 - alpha) ** 2 / alpha + alpha / (4.0 * (1.0 - alpha * alpha))


def lemma2_rho(n: int, alpha: float) -> float:
    return n * abs(1.0 - alpha) ** 1.5


def lemma2_remainder(n: int, alpha: float, computed: float):
    """(r, |r| (1 - alpha) rho) for a computed d/dalpha ln D_n."""
    r = computed - lemma2_rhs(n, alpha)
    return r, abs(r) * (1.0 - alpha) * lemma2_rho(n, alpha)


def dal0_rhs(n: int, alpha: float) -> float:
    if n < 1 or not alpha > 0.0:
        raise DomainError(f"n={n}, alpha={alpha} must be positive")
    return (1.5 + math.log(alpha)) * n * n - math.log(n / 2.0) / 12.0 + chi_constant().zeta_prime_minus1


def _edge_bracket(alpha: float) -> float:
    """3/2 + ln(alpha) - 2 alpha + alpha**2/2, which equals -sum_{k>=3} (1 - alpha)**k / k."""
    eps = 1.0 - alpha
    if eps >= EDGE_SERIES_SWITCH:
        return 1.5 + math.log(alpha) - 2.0 * alpha + 0.5 * alpha * alpha
    total = 0.0
    power = eps * eps
    k = 3
    while True:
        power *= eps
        term = power / k
        total -= term
        if term <= 1e-17 * abs(total):
            return total
        k += 1


def intd2_rhs(n: int, alpha: float) -> float:
    if n < 1:
        raise DomainError(f"n={n} must be positive")
    _check_unit_interval(alpha)
    one_minus_sq = (1.0 - alpha) * (1.0 + alpha)
    return (n * n * _edge_bracket(alpha) - math.log(n) / 12.0 - math.log(one_minus_sq) / 8.0
            + math.log(2.0) / 12.0 + chi_constant().zeta_prime_minus1)


def intd_rhs(n: int, alpha: float, alpha0: float) -> float:
    """ln D_n(alpha) - ln D_n(alpha0) from the integrated differential identity."""
    _check_unit_interval(alpha)
    _check_unit_interval(alpha0)
    if not alpha0 < alpha:
        raise DomainError(f"alpha0={alpha0} must lie below alpha={alpha}")
    quadratic = math.log(alpha / alpha0) - 2.0 * (alpha - alpha0) + (alpha * alpha - alpha0 * alpha0) / 2.0
    return n * n * quadratic - math.log((1.0 - alpha * alpha) / (1.0 - alpha0 * alpha0)) / 8.0


def hm_tail(y: float) -> float:
    if not y < -1.0:
        raise DomainError(f"y={y} must lie below -1")
    return math.sqrt(-y / 2.0) * (1.0 + 1.0 / (8.0 * y ** 3))


def aas_rhs(n: int) -> DDouble:
    """-n**2 ln 2 + n ln(2 pi) - ln(n)/4 + ln(2)/12 + 3 zeta'(-1), in double-double."""
    if n < 1:
        raise DomainError(f"n={n} must be positive")
    ln_two_pi = dd_ln(DD_PI * 2.0)
    return (LN2 * float(-n * n) + ln_two_pi * float(n) - dd_ln(as_dd(float(n))) / 4.0
            + LN2 / 12.0 + zeta_prime_minus1_dd() * 3.0)


def cas_rhs(n: int) -> DDouble:
    """-(3/2 + ln 4) n**2 + n ln(2 pi) - ln(n)/6 + 2 zeta'(-1), in double-double."""
    if n < 1:
        raise DomainError(f"n={n} must be positive")
    n_sq = float(n * n)
    ln_two_pi = dd_ln(DD_PI * 2.0)
    return (-(LN2 * 2.0 + 1.5) * n_sq + ln_two_pi * float(n) - dd_ln(as_dd(float(n))) / 6.0
            + zeta_prime_minus1_dd() * 2.0)


def thm1_limit_check(s: float, n: float) -> float:
    """intd2_rhs at the edge point alpha = 1 - s/(2n)**(2/3), minus thm1_rhs(s)."""
    alpha = 1.0 - s / (2.0 * n) ** (2.0 / 3.0)
    return intd2_rhs(n, alpha) - thm1_rhs(s)


def residual_table(source: str, s_grid, nodes: int = RESIDUAL_NODES, precision: str = PRECISION_DD,
                   solution=None, chi_offset: float = 0.0):
    """
    Rows (s, ln det(I - K_s), thm1_rhs(s), residual) over s_grid
    :param source: 'painleve' (Hastings-McLeod table) or 'fredholm' (Nystrom)
    :param nodes: Nystrom node count for the fredholm source
    :param solution: Hastings-McLeod table to reuse for the painleve source
    :param chi_offset: added to the constant term of the right-hand side
    """
    if source not in dict(SOURCE_CHOICES):
        raise DomainError(f"Unknown source {source!r}")
    chi = chi_constant().chi + chi_offset
    if source == SOURCE_PAINLEVE and solution is None:
        solution = hastings_mcleod()
    rows = []
    for s in s_grid:
        s = float(s)
        if source == SOURCE_PAINLEVE:
            computed = tw_log_cdf(solution, -s).log_cdf
        else:
            computed = airy_gap_log_det(s, nodes, precision).log_det
        rows.append(ResidualRow.build(s, computed, thm1_rhs(s, chi)))
    logger.info(f"Residual table from {source} over {len(rows)} points")
    return rows


def _linear_fit(x, y) -> SlopeFit:
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(residuals ** 2)))
    return SlopeFit(slope=float(slope), intercept=float(intercept), rms=rms, used=len(x))


def slope_fit(rows) -> SlopeFit:
    """Least squares of ln|residual| against ln(param); zero residuals are skipped and counted."""
    kept = [row for row in rows if row.residual != 0.0 and math.isfinite(row.residual)]
    excluded = len(rows) - len(kept)
    if len(kept) < 2:
        raise DomainError(f"Need two non-zero residuals for a slope fit, got {len(kept)}")
    x = np.log([row.param for row in kept])
    y = np.log([abs(row.residual) for row in kept])
    fit = _linear_fit(x, y)
    if excluded:
        logger.warning(f"Slope fit skipped {excluded} zero residuals")
    return fit.model_copy(update={'excluded': excluded})


def constant_fit(rows) -> SlopeFit:
    """Fit ln det + s**3/12 + ln(s)/8 to c + a s; slope is a, intercept is c."""
    if len(rows) < 2:
        raise DomainError("Need at least two rows for a constant fit")
    s = np.array([row.param for row in rows])
    y = np.array([row.computed for row in rows]) + s ** 3 / 12.0 + np.log(s) / 8.0
    return _linear_fit(s, y)


def extrapolate_to_zero(points, values) -> float:
    """Value at 0 of the interpolating polynomial through (points, values), by Neville's scheme."""
    if len(points) != len(values) or not points:
        raise DomainError("points and values must be non-empty and of equal length")
    table = [float(v) for v in values]
    x = [float(p) for p in points]
    for level in range(1, len(x)):
        for i in range(len(x) - level):
            table[i] = (x[i + level] * table[i] - x[i] * table[i + 1]) / (x[i + level] - x[i])
    return table[0]
