import logging
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exceptions import DomainError, RangeError
from .extprec import (
    DDouble, LN2, ONE, ZERO, as_dd, dd_cbrt, dd_exp, dd_ln, dd_sqrt, dd_sum,
)
from .literals import EULER_GAMMA, GAMMA_ONE_THIRD, PI
from .schemas import Constants

logger = logging.getLogger(__name__)

PRECISION_NATIVE = 'native'
PRECISION_DD = 'dd'
PRECISION_CHOICES = [
    (PRECISION_NATIVE, 'binary64'),
    (PRECISION_DD, 'double-double'),
]

AIRY_DOMAIN = 40.0
# Maclaurin series window. At the upper switch the series cancellation
# (about exp(2 zeta) ulps) and the asymptotic remainder (about exp(-2 zeta))
# are both near 1e-16 relative; Ai itself is below 1e-9 there.
AIRY_SERIES_UPPER = 9.0
AIRY_SERIES_LOWER = -12.0
AIRY_MAX_TERMS = 400

ZETA_SUM_TERMS = 64
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
]
LEGENDRE_NEWTON_TOL = 1e-15

DD_PI = DDouble.from_string(PI)
DD_EULER_GAMMA = DDouble.from_string(EULER_GAMMA)
DD_GAMMA_ONE_THIRD = DDouble.from_string(GAMMA_ONE_THIRD)
_CBRT3 = dd_cbrt(3.0)
# Ai(0) = 3**(-1/6) Gamma(1/3) / (2 pi), Ai'(0) = -1 / (3**(1/3) Gamma(1/3))
AI_ZERO = DD_GAMMA_ONE_THIRD / (DD_PI * 2.0 * dd_sqrt(_CBRT3))
AIP_ZERO = -1.0 / (_CBRT3 * DD_GAMMA_ONE_THIRD)
_SQRT_PI = dd_sqrt(DD_PI)


def _airy_maclaurin(x: DDouble):
    x3 = x * x * x
    f_term, g_term, dg_term, df_term = ONE, x, ONE, ZERO
    sum_f, sum_g, sum_df, sum_dg = ONE, x, ZERO, ONE
    for k in range(1, AIRY_MAX_TERMS):
        f_term = f_term * x3 / float((3 * k - 1) * (3 * k))
        g_term = g_term * x3 / float((3 * k) * (3 * k + 1))
        dg_term = dg_term * x3 / float((3 * k) * (3 * k - 2))
        df_term = x * x * 0.5 if k == 1 else df_term * x3 / float((3 * k - 1) * (3 * k - 3))
        sum_f = sum_f + f_term
        sum_g = sum_g + g_term
        sum_df = sum_df + df_term
        sum_dg = sum_dg + dg_term
        scale = abs(sum_f.hi) + abs(sum_g.hi) + abs(sum_df.hi) + abs(sum_dg.hi)
        largest = max(abs(f_term.hi), abs(g_term.hi), abs(df_term.hi), abs(dg_term.hi))
        if k > 1 and largest <= 1e-34 * scale:
            break
    ai = AI_ZERO * sum_f + AIP_ZERO * sum_g
    aip = AI_ZERO * sum_df + AIP_ZERO * sum_dg
    return ai, aip


def _asymptotic_coefficients(count: int, number=float):
    """u_k and v_k of the exponential Airy expansions, u_0 = v_0 = 1."""
    u = [number(1.0)]
    v = [number(1.0)]
    for k in range(1, count):
        u_k = u[-1] * float((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) / float((2 * k - 1) * 216 * k)
        u.append(u_k)
        v.append(-u_k * float(6 * k + 1) / float(6 * k - 1))
    return u, v


@lru_cache(maxsize=2)
def _coefficient_table(precision: str):
    number = as_dd if precision == PRECISION_DD else float
    return _asymptotic_coefficients(AIRY_MAX_TERMS // 2, number)


def _airy_asymptotic_positive(x: DDouble):
    root = dd_sqrt(x)
    quarter = dd_sqrt(root)
    zeta = x * root * 2.0 / 3.0
    step = -1.0 / zeta
    u, v = _coefficient_table(PRECISION_DD)
    sum_u, sum_v, power = ONE, ONE, ONE
    previous = math.inf
    for k in range(1, len(u)):
        power = power * step
        term_u = u[k] * power
        term_v = v[k] * power
        size = abs(term_u.hi)
        if size > previous:
            break
        previous = size
        sum_u = sum_u + term_u
        sum_v = sum_v + term_v
        if size <= 1e-34 * abs(sum_u.hi) and abs(term_v.hi) <= 1e-34 * abs(sum_v.hi):
            break
    prefactor = dd_exp(-zeta) / (_SQRT_PI * 2.0)
    return prefactor * sum_u / quarter, -prefactor * quarter * sum_v


def _airy_asymptotic_negative(x: float):
    z = -x
    quarter = z ** 0.25
    zeta = 2.0 / 3.0 * z ** 1.5
    u, v = _coefficient_table(PRECISION_NATIVE)
    even_u = odd_u = even_v = odd_v = 0.0
    for k in range(0, len(u) - 3, 2):
        sign = -1.0 if (k // 2) % 2 else 1.0
        term_even = sign * zeta ** -k
        term_odd = sign * zeta ** -(k + 1)
        even_u += u[k] * term_even
        odd_u += u[k + 1] * term_odd
        even_v += v[k] * term_even
        odd_v += v[k + 1] * term_odd
        next_even = abs(u[k + 2]) * zeta ** -(k + 2)
        if next_even <= 1e-18 * abs(even_u) or next_even > abs(u[k] * term_even):
            break
    theta = zeta + math.pi / 4.0
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    root_pi = math.sqrt(math.pi)
    ai = (sin_t * even_u - cos_t * odd_u) / (root_pi * quarter)
    aip = -quarter * (cos_t * even_v + sin_t * odd_v) / root_pi
    return as_dd(ai), as_dd(aip)


def airy_ai_pair(x, precision: str = PRECISION_NATIVE):
    """
    Ai(x) and Ai'(x) on [-40, 40]
    :param x: float or DDouble argument
    :param precision: 'native' returns floats, 'dd' returns DDouble values
    """
    x = as_dd(x)
    if not -AIRY_DOMAIN <= x.hi <= AIRY_DOMAIN or math.isnan(x.hi):
        raise DomainError(f"Airy argument {x.hi} outside [-{AIRY_DOMAIN}, {AIRY_DOMAIN}]")
    if x.hi > AIRY_SERIES_UPPER:
        ai, aip = _airy_asymptotic_positive(x)
    elif x.hi < AIRY_SERIES_LOWER:
        ai, aip = _airy_asymptotic_negative(float(x))
    else:
        ai, aip = _airy_maclaurin(x)
    if precision == PRECISION_DD:
        return ai, aip
    return float(ai), float(aip)


def airy_arrays(points):
    """Vectorised native Ai, Ai' at every point of an array."""
    points = np.asarray(points, dtype=float)
    values = np.empty_like(points)
    derivatives = np.empty_like(points)
    for index, x in np.ndenumerate(points):
        values[index], derivatives[index] = airy_ai_pair(float(x))
    return values, derivatives


class QuadratureRule:
    """Gauss-Legendre nodes (ascending) and weights mapped to (a, b)."""

    def __init__(self, a: float, b: float, nodes, weights):
        self.a = a
        self.b = b
        self.nodes = nodes
        self.weights = weights

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


class DDQuadratureRule:
    """Same rule with nodes and weights held as tuples of DDouble."""

    def __init__(self, a: float, b: float, nodes, weights):
        self.a = a
        self.b = b
        self.nodes = nodes
        self.weights = weights

    def __len__(self):
        return len(self.nodes)


def _legendre_eval(m: int, x):
    p_prev, p = np.ones_like(x), x.copy()
    for k in range(1, m):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    derivative = m * (x * p - p_prev) / (x * x - 1.0)
    return p, derivative


@lru_cache(maxsize=64)
def _legendre_reference(m: int):
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (m + 0.5))
    for _ in range(100):
        p, derivative = _legendre_eval(m, x)
        dx = p / derivative
        x = x - dx
        if np.max(np.abs(dx)) <= LEGENDRE_NEWTON_TOL * max(1.0, np.max(np.abs(x))):
            break
    else:
        logger.warning(f"Legendre Newton iteration for m={m} did not reach tolerance")
    p, derivative = _legendre_eval(m, x)
    weights = 2.0 / ((1.0 - x * x) * derivative * derivative)
    order = np.argsort(x)
    return x[order], weights[order]


def gauss_legendre(m: int, a: float, b: float) -> QuadratureRule:
    """
    m-point Gauss-Legendre rule on (a, b), exact for polynomials of degree < 2m
    :param m: number of nodes, m >= 1
    """
    if m < 1 or not a < b:
        raise DomainError(f"Invalid quadrature request m={m} on ({a}, {b})")
    x, w = _legendre_reference(m)
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    nodes = half * x + mid
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(a, b, nodes, weights)


def _legendre_eval_dd(m: int, x: DDouble):
    p_prev, p = ONE, x
    for k in range(1, m):
        p_prev, p = p, ((x * p) * float(2 * k + 1) - p_prev * float(k)) / float(k + 1)
    derivative = (x * p - p_prev) * float(m) / (x * x - 1.0)
    return p, derivative


@lru_cache(maxsize=16)
def gauss_legendre_dd(m: int, a: float, b: float) -> DDQuadratureRule:
    """Double-double refinement of gauss_legendre by Newton steps from the binary64 nodes."""
    if m < 1 or not a < b:
        raise DomainError(f"Invalid quadrature request m={m} on ({a}, {b})")
    x_ref, _ = _legendre_reference(m)
    reference_nodes, reference_weights = [], []
    for i in range(m // 2):
        x = as_dd(float(x_ref[i]))
        for _ in range(2):
            p, derivative = _legendre_eval_dd(m, x)
            x = x - p / derivative
        _, derivative = _legendre_eval_dd(m, x)
        reference_nodes.append(x)
        reference_weights.append(2.0 / ((1.0 - x * x) * derivative * derivative))
    middle_nodes, middle_weights = [], []
    if m % 2:
        _, derivative = _legendre_eval_dd(m, ZERO)
        middle_nodes.append(ZERO)
        middle_weights.append(2.0 / (derivative * derivative))
    reference_nodes = reference_nodes + middle_nodes + [-x for x in reversed(reference_nodes)]
    reference_weights = reference_weights + middle_weights + list(reversed(reference_weights))
    half = (as_dd(b) - a) * 0.5
    mid = (as_dd(b) + a) * 0.5
    nodes = tuple(half * x + mid for x in reference_nodes)
    weights = tuple(half * w for w in reference_weights)
    return DDQuadratureRule(a, b, nodes, weights)


def _moment_series(k: int, z, alpha, decay, tol: float):
    term = 1.0 / (as_dd(k + 1) if isinstance(z, DDouble) else float(k + 1))
    total = term
    j = 1
    while True:
        term = term * z / float(k + j + 1)
        total = total + term
        if float(term) <= tol * float(total):
            break
        j += 1
    return alpha ** (k + 1) * decay * total


def exp_moments(k_max: int, c: float, alpha: float, precision: str = PRECISION_NATIVE):
    """
    mu_k = integral over (0, alpha) of x**k exp(-c x), k = 0..k_max.

    Upward recurrence is used while k + 1 <= c * alpha; above that the top
    moment comes from the convergent lower incomplete gamma series and the
    rest follow by downward recurrence, so no step subtracts nearly equal
    quantities.
    """
    if k_max < 0 or c <= 0.0 or alpha <= 0.0:
        raise DomainError(f"Invalid moment request k_max={k_max}, c={c}, alpha={alpha}")
    dd = precision == PRECISION_DD
    number = as_dd if dd else float
    exp = dd_exp if dd else math.exp
    tol = 1e-34 if dd else 1e-17
    c_, a_ = number(c), number(alpha)
    z = c_ * a_
    if float(z) > 700.0:
        raise RangeError(f"c * alpha = {float(z)} is too large for the moment recurrence")
    decay = exp(-z)
    k_up = min(k_max, int(math.floor(float(z))) - 1)
    moments = [None] * (k_max + 1)
    if k_up >= 0:
        moments[0] = (1.0 - decay) / c_
        power = a_
        for k in range(1, k_up + 1):
            moments[k] = (moments[k - 1] * float(k) - power * decay) / c_
            power = power * a_
    if k_up < k_max:
        moments[k_max] = _moment_series(k_max, z, a_, decay, tol)
        power = a_ ** k_max
        for k in range(k_max, k_up + 1, -1):
            moments[k - 1] = (c_ * moments[k] + power * decay) / float(k)
            power = power / a_
    return moments


def zeta_prime_two_dd() -> DDouble:
    """zeta'(2) = -sum ln k / k**2 by direct summation plus an Euler-Maclaurin tail."""
    n = ZETA_SUM_TERMS
    partial = dd_sum(dd_ln(k) / float(k * k) for k in range(2, n))
    log_n = dd_ln(n)
    tail = (log_n + 1.0) / float(n) + log_n / float(n * n) * 0.5
    # derivatives of ln(x) / x**2 have the form (a + b ln x) / x**p
    a, b, p = 0, 1, 2
    for j, bernoulli in enumerate(_BERNOULLI, start=1):
        for _ in range(1 if j == 1 else 2):
            a, b, p = b - p * a, -p * b, p + 1
        coefficient = DDouble.from_string(str(bernoulli / math.factorial(2 * j)))
        derivative = (log_n * float(b) + float(a)) / as_dd(n) ** p
        tail = tail - coefficient * derivative
    return -(partial + tail)


@lru_cache(maxsize=1)
def zeta_prime_minus1_dd() -> DDouble:
    log_glaisher = (dd_ln(DD_PI * 2.0) + DD_EULER_GAMMA) / 12.0 - zeta_prime_two_dd() / (DD_PI * DD_PI * 2.0)
    return 1.0 / as_dd(12.0) - log_glaisher


def chi_dd() -> DDouble:
    return zeta_prime_minus1_dd() + LN2 / 24.0


@lru_cache(maxsize=1)
def chi_constant() -> Constants:
    zeta = zeta_prime_minus1_dd()
    constants = Constants(zeta_prime_minus1=float(zeta), chi=float(chi_dd()))
    logger.debug(f"zeta'(-1) = {constants.zeta_prime_minus1!r}, chi = {constants.chi!r}")
    return constants
