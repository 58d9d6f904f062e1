"""
Exact normalisation products of the Laguerre gap probability:

    A_n = prod_{k<n} 2**(2k) (k!)**4 / ((2k)!)**2 * 2 / (2k + 1)
    C_n = (4n)**(-n**2) prod_{k<n} (k!)**2

Both are kept as logarithms in double-double, summed from a table of ln j.
"""
import logging
import threading

from numerics.exceptions import DomainError
from numerics.extprec import LN2, ZERO, as_dd, dd_ln

from edge.asymptotics import aas_rhs, cas_rhs

from .schemas import ExactProducts, ProductsReport

logger = logging.getLogger(__name__)

MAX_N = 10000


_LOG_FACTORIALS = [ZERO]
_table_lock = threading.Lock()


def log_factorials(k_max: int):
    """ln k! for k = 0..k_max (at least), accumulated from ln j and grown on demand."""
    with _table_lock:
        while len(_LOG_FACTORIALS) <= k_max:
            j = len(_LOG_FACTORIALS)
            _LOG_FACTORIALS.append(_LOG_FACTORIALS[-1] + dd_ln(as_dd(float(j))))
    return _LOG_FACTORIALS


def exact_products(n: int) -> ExactProducts:
    """
    ln A_n and ln C_n in double-double
    :param n: matrix size, 1 <= n <= MAX_N
    """
    if not 1 <= n <= MAX_N:
        raise DomainError(f"n={n} outside [1, {MAX_N}]")
    log_fact = log_factorials(2 * n)
    ln_a = ZERO
    sum_log_fact = ZERO
    for k in range(n):
        ln_a = (ln_a + LN2 * float(2 * k + 1) + log_fact[k] * 4.0 - log_fact[2 * k] * 2.0
                - dd_ln(as_dd(float(2 * k + 1))))
        sum_log_fact = sum_log_fact + log_fact[k]
    ln_four_n = LN2 * 2.0 + dd_ln(as_dd(float(n)))
    ln_c = sum_log_fact * 2.0 - ln_four_n * float(n * n)
    logger.debug(f"ln A_{n} = {float(ln_a)!r}, ln C_{n} = {float(ln_c)!r}")
    return ExactProducts(n=n, ln_A_n=ln_a, ln_C_n=ln_c)


def dint2_limit(n: int) -> float:
    """ln A_n - ln C_n, the alpha -> 0 limit of ln D_n(alpha) - n**2 ln(alpha/2)."""
    products = exact_products(n)
    return float(products.ln_A_n - products.ln_C_n)


def aas_residual(n: int) -> float:
    return float(exact_products(n).ln_A_n - aas_rhs(n))


def cas_residual(n: int) -> float:
    return float(exact_products(n).ln_C_n - cas_rhs(n))


def products_report(n: int) -> ProductsReport:
    products = exact_products(n)
    return ProductsReport(
        n=n,
        ln_A_n=float(products.ln_A_n),
        ln_C_n=float(products.ln_C_n),
        aas_residual=float(products.ln_A_n - aas_rhs(n)),
        cas_residual=float(products.ln_C_n - cas_rhs(n)),
    )
