"""
Gap probability D_n(alpha) of the scaled Laguerre ensemble: the probability
that no eigenvalue lies in (alpha, inf), for the weight exp(-4 n x) on (0, inf).

Three independent routes are provided:

* gram: det of G_jk = int_0^alpha psi_j psi_k by Gauss-Legendre sampling and QR;
* theta: leading coefficients of the polynomials orthonormal on (0, alpha),
  from a double-double Cholesky factor of the Hankel moment matrix (n <= 16);
* recurrence: the same leading coefficients from a Lanczos process on a
  discretised measure, carried as logarithms (large n inside the bulk).

Log-derivatives in alpha come from the rank-one form psi^T G^-1 psi, from the
Christoffel-Darboux form at alpha, and from the sum of squares of the
orthonormal polynomials at alpha.
"""
import logging
import math

import numpy as np
import scipy.linalg

from edge.asymptotics import lemma2_rho, lemma2_rhs
from edge.fredholm import airy_gap_log_det
from numerics.exceptions import DiscretizationError, DomainError, PrecisionExhaustedError
from numerics.extprec import DDouble, as_dd, dd_cholesky, dd_horner, dd_exp, dd_ln, dd_lower_inverse, dd_sum
from numerics.specfun import PRECISION_DD, airy_ai_pair, exp_moments, gauss_legendre

from .products import exact_products, log_factorials
from .schemas import DerivativeRoutes, EdgeGap, GapValue

logger = logging.getLogger(__name__)

ROUTE_GRAM = 'gram'
ROUTE_THETA = 'theta'
ROUTE_RECURRENCE = 'recurrence'
ROUTE_AUTO = 'auto'
ROUTE_CHOICES = [
    (ROUTE_AUTO, 'theta for n <= 16, recurrence inside the bulk, gram otherwise'),
    (ROUTE_GRAM, 'Gram determinant by quadrature'),
    (ROUTE_THETA, 'Hankel moments in double-double'),
    (ROUTE_RECURRENCE, 'Lanczos recurrence coefficients'),
]

MIN_NODES = 200
NODES_PER_DEGREE = 6
THETA_MAX_N = 16
RECURRENCE_MAX_N = 300
RECURRENCE_MAX_EXPONENT = 690.0
DIAGONAL_SWITCH = 1e-6
# ||R||^2 may exceed one by rounding when alpha is far beyond the support
GRAM_NORM_SLACK = 1e-8
GRAM_DOUBLING_TOL = 1e-10
EDGE_MIN_N = 20
EDGE_MAX_U = 3.0


def default_nodes(n: int) -> int:
    return max(MIN_NODES, NODES_PER_DEGREE * n)


def _check_nodes(n: int, m_nodes):
    if m_nodes is None:
        return default_nodes(n)
    if m_nodes < default_nodes(n):
        raise DomainError(f"m_nodes={m_nodes} below {default_nodes(n)} for n={n}")
    return m_nodes


def _check_request(n: int, alpha: float):
    if n < 1:
        raise DomainError(f"n={n} must be positive")
    if not alpha > 0.0 or not math.isfinite(alpha):
        raise DomainError(f"alpha={alpha} must be positive")


class LaguerreBasis:
    """
    omega_k(x) = 2 sqrt(n) exp(-2 n x) L_k(4 n x), orthonormal on (0, inf).
    Leading coefficients of p_k = omega_k exp(2 n x) are kept as ln|kappa_k| and sign (-1)**k.
    """

    def __init__(self, n: int):
        if n < 1:
            raise DomainError(f"n={n} must be positive")
        self.n = n
        self.scale = 2.0 * math.sqrt(n)
        log_fact = log_factorials(n)
        self.log_kappa = np.array([
            math.log(2.0) + 0.5 * math.log(n) - float(log_fact[k]) + k * math.log(4.0 * n)
            for k in range(n + 1)
        ])
        self.kappa_sign = np.array([(-1.0) ** k for k in range(n + 1)])

    def wavefunctions(self, x, k_max: int = None):
        """
        omega_k(x) and omega_k'(x) for k = 0..k_max, as arrays of shape (k_max + 1, len(x)).
        Uses the recurrence for exp(-t/2) L_k(t) so nothing overflows for large t.
        """
        k_max = self.n if k_max is None else k_max
        if not 0 <= k_max <= self.n:
            raise DomainError(f"k_max={k_max} outside [0, {self.n}]")
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0):
            raise DomainError("wavefunctions need x >= 0")
        t = 4.0 * self.n * x
        ell = np.empty((k_max + 1, len(x)))
        slope = np.empty_like(ell)
        ell[0] = np.exp(-0.5 * t)
        slope[0] = 0.0
        if k_max >= 1:
            ell[1] = ell[0] * (1.0 - t)
        for k in range(1, k_max):
            ell[k + 1] = ((2 * k + 1 - t) * ell[k] - k * ell[k - 1]) / (k + 1)
        # exp(-t/2) L_k'(t) from L_{k+1}' = L_k' - L_k
        for k in range(k_max):
            slope[k + 1] = slope[k] - ell[k]
        omega = self.scale * ell
        omega_prime = self.scale * 4.0 * self.n * (slope - 0.5 * ell)
        return omega, omega_prime


def wavefunction(basis: LaguerreBasis, k: int, x: float):
    """(omega_k(x), omega_k'(x))"""
    if not 0 <= k <= basis.n:
        raise DomainError(f"k={k} outside [0, {basis.n}]")
    omega, omega_prime = basis.wavefunctions([x], k)
    return float(omega[k, 0]), float(omega_prime[k, 0])


def cd_kernel(basis: LaguerreBasis, x: float, y: float) -> float:
    """Christoffel-Darboux form of K_n(x, y) = sum_{j<n} omega_j(x) omega_j(y)."""
    n = basis.n
    if abs(x - y) <= DIAGONAL_SWITCH:
        omega, omega_prime = basis.wavefunctions([x], n)
        return 0.25 * float(omega[n, 0] * omega_prime[n - 1, 0] - omega_prime[n, 0] * omega[n - 1, 0])
    omega = basis.wavefunctions([x, y], n)[0]
    numerator = omega[n, 0] * omega[n - 1, 1] - omega[n, 1] * omega[n - 1, 0]
    return 0.25 * float(numerator) / (y - x)


class GramSystem:
    """
    G_jk = int_0^alpha omega_j omega_k dx, j, k < n, held as its Cholesky factor R.
    R comes from a QR factorisation of the weighted samples, so G itself is never formed.
    """

    def __init__(self, n: int, alpha: float, m_nodes: int = None):
        _check_request(n, alpha)
        self.n = n
        self.alpha = alpha
        self.m_nodes = _check_nodes(n, m_nodes)
        self.basis = LaguerreBasis(n)
        rule = gauss_legendre(self.m_nodes, 0.0, alpha)
        omega = self.basis.wavefunctions(rule.nodes, n - 1)[0]
        samples = (np.sqrt(rule.weights)[None, :] * omega).T
        self.R = np.linalg.qr(samples, mode='r')
        diagonal = np.abs(np.diag(self.R))
        if np.any(diagonal == 0.0):
            raise DiscretizationError(f"Gram matrix singular for n={n}, alpha={alpha}")
        top = np.linalg.norm(self.R, 2) ** 2
        if top > 1.0 + GRAM_NORM_SLACK:
            raise DiscretizationError(f"Gram eigenvalue {top!r} above one for n={n}, alpha={alpha}; "
                                      f"increase m_nodes")
        self.log_det = 2.0 * float(np.sum(np.log(diagonal)))

    def rank1(self) -> float:
        """psi(alpha)^T G^-1 psi(alpha)"""
        psi = self.basis.wavefunctions([self.alpha], self.n - 1)[0][:, 0]
        z = scipy.linalg.solve_triangular(self.R, psi, trans='T')
        return float(z @ z)


def gap_log_det_gram(n: int, alpha: float, m_nodes: int = None) -> float:
    """
    ln det G(alpha) on m_nodes; the rule with twice as many nodes is evaluated alongside
    and a change above GRAM_DOUBLING_TOL (relative to max(1, |ln D_n|)) is logged as a warning.
    """
    coarse = GramSystem(n, alpha, m_nodes)
    fine = GramSystem(n, alpha, 2 * coarse.m_nodes).log_det
    change = abs(fine - coarse.log_det)
    logger.debug(f"Gram ln D_n for n={n}, alpha={alpha}: m={coarse.m_nodes} -> {coarse.log_det!r}, 2m -> {fine!r}")
    if change > GRAM_DOUBLING_TOL * max(1.0, abs(coarse.log_det)):
        logger.warning(f"Node doubling changes Gram ln D_n at n={n}, alpha={alpha} by {change:.3e}; increase m_nodes")
    return coarse.log_det


def dlog_gap_rank1(n: int, alpha: float, m_nodes: int = None) -> float:
    return GramSystem(n, alpha, m_nodes).rank1()


class OrthonormalBasis:
    """
    q_0..q_n orthonormal on (0, alpha) for exp(-4 n x), in the monomial basis.
    coeffs[j][k] is the x**k coefficient of q_j; theta[j] = coeffs[j][j] > 0.
    """

    def __init__(self, n: int, alpha: float, coeffs, lower):
        self.n = n
        self.alpha = alpha
        self.coeffs = coeffs
        self.lower = lower
        self.theta = [coeffs[j][j] for j in range(n + 1)]

    def value(self, j: int, x) -> DDouble:
        return dd_horner(self.coeffs[j][:j + 1], x)

    def derivative(self, j: int, x) -> DDouble:
        row = self.coeffs[j]
        return dd_horner([row[k] * float(k) for k in range(1, j + 1)], x)

    def log_theta_sum(self) -> DDouble:
        """sum_{j<n} ln theta_j"""
        return -dd_sum(dd_ln(self.lower[j][j]) for j in range(self.n))


def orthonormal_on_interval(n: int, alpha: float) -> OrthonormalBasis:
    """
    Cholesky H = L L^T of the Hankel moments mu_{j+k} of exp(-4 n x) on (0, alpha);
    the rows of L^-1 are the coefficient vectors of q_0..q_n.
    """
    _check_request(n, alpha)
    if n > THETA_MAX_N:
        raise DomainError(f"n={n} above {THETA_MAX_N}: Hankel moments exhaust double-double")
    moments = exp_moments(2 * n, 4.0 * n, alpha, PRECISION_DD)
    hankel = [[moments[j + k] for k in range(n + 1)] for j in range(n + 1)]
    try:
        lower = dd_cholesky(hankel)
    except PrecisionExhaustedError as e:
        logger.error(f"Hankel factorisation failed for n={n}, alpha={alpha} at pivot {e.pivot}")
        raise
    coeffs = dd_lower_inverse(lower)
    return OrthonormalBasis(n, alpha, coeffs, lower)


def gap_log_det_theta(n: int, alpha: float) -> float:
    basis = orthonormal_on_interval(n, alpha)
    products = exact_products(n)
    return float(basis.log_theta_sum() * -2.0 - products.ln_C_n)


def dlog_gap_cd(n: int, alpha: float) -> float:
    """(theta_{n-1} / theta_n) exp(-4 n alpha) (q_n' q_{n-1} - q_n q_{n-1}')(alpha)"""
    basis = orthonormal_on_interval(n, alpha)
    a = as_dd(alpha)
    wronskian = (basis.derivative(n, a) * basis.value(n - 1, a)
                 - basis.value(n, a) * basis.derivative(n - 1, a))
    ratio = basis.theta[n - 1] / basis.theta[n]
    return float(ratio * dd_exp(a * (-4.0 * n)) * wronskian)


class RecurrenceBasis:
    """
    Three-term recurrence x q_j = b_{j+1} q_{j+1} + a_j q_j + b_j q_{j-1} of the
    polynomials orthonormal on (0, alpha) for exp(-4 n x), with ln theta_j.
    """

    def __init__(self, n: int, alpha: float, a, b, log_mu0: float, log_theta):
        self.n = n
        self.alpha = alpha
        self.a = a
        self.b = b
        self.log_mu0 = log_mu0
        self.log_theta = log_theta

    def weighted_values(self, x: float):
        """q_j(x) exp(-2 n x) for j < n by forward recurrence."""
        values = np.empty(self.n)
        values[0] = math.exp(-2.0 * self.n * x - 0.5 * self.log_mu0)
        previous = 0.0
        for j in range(self.n - 1):
            nxt = ((x - self.a[j]) * values[j] - self.b[j] * previous) / self.b[j + 1]
            previous = values[j]
            values[j + 1] = nxt
        return values


def recurrence_on_interval(n: int, alpha: float, m_nodes: int = None) -> RecurrenceBasis:
    """
    Lanczos process with full reorthogonalisation on the Gauss-Legendre
    discretisation of exp(-4 n x) dx over (0, alpha).
    """
    _check_request(n, alpha)
    if n > RECURRENCE_MAX_N:
        raise DomainError(f"n={n} above {RECURRENCE_MAX_N}")
    if 2.0 * n * alpha > RECURRENCE_MAX_EXPONENT:
        raise DomainError(f"2 n alpha = {2.0 * n * alpha} above {RECURRENCE_MAX_EXPONENT}")
    m_nodes = _check_nodes(n, m_nodes)
    rule = gauss_legendre(m_nodes, 0.0, alpha)
    x = rule.nodes
    start = np.sqrt(rule.weights) * np.exp(-2.0 * n * x)
    norm = float(np.linalg.norm(start))
    log_mu0 = 2.0 * math.log(norm)
    vectors = np.zeros((n + 1, m_nodes))
    vectors[0] = start / norm
    a = np.zeros(n)
    # b[0] is unused; b[j] couples q_{j-1} and q_j
    b = np.zeros(n + 1)
    for j in range(n):
        v = x * vectors[j]
        if j:
            v -= b[j] * vectors[j - 1]
        a[j] = float(vectors[j] @ v)
        v -= a[j] * vectors[j]
        for _ in range(2):
            v -= vectors[:j + 1].T @ (vectors[:j + 1] @ v)
        b[j + 1] = float(np.linalg.norm(v))
        if b[j + 1] == 0.0:
            raise DiscretizationError(f"Lanczos breakdown at step {j} for n={n}, alpha={alpha}")
        vectors[j + 1] = v / b[j + 1]
    log_theta = np.empty(n)
    log_theta[0] = -0.5 * log_mu0
    for j in range(n - 1):
        log_theta[j + 1] = log_theta[j] - math.log(b[j + 1])
    logger.debug(f"Lanczos recurrence for n={n}, alpha={alpha} on {m_nodes} nodes")
    return RecurrenceBasis(n, alpha, a, b, log_mu0, log_theta)


def gap_log_det_recurrence(n: int, alpha: float, m_nodes: int = None) -> float:
    basis = recurrence_on_interval(n, alpha, m_nodes)
    ln_c = float(exact_products(n).ln_C_n)
    return -2.0 * float(np.sum(basis.log_theta)) - ln_c


def dlog_gap_recurrence(n: int, alpha: float, m_nodes: int = None) -> float:
    """exp(-4 n alpha) sum_{j<n} q_j(alpha)**2"""
    basis = recurrence_on_interval(n, alpha, m_nodes)
    values = basis.weighted_values(alpha)
    return float(values @ values)


def select_route(n: int, alpha: float) -> str:
    if n <= THETA_MAX_N:
        return ROUTE_THETA
    if alpha < 1.0 and 2.0 * n * alpha <= RECURRENCE_MAX_EXPONENT and n <= RECURRENCE_MAX_N:
        return ROUTE_RECURRENCE
    return ROUTE_GRAM


def gap_log_det(n: int, alpha: float, route: str = ROUTE_AUTO, m_nodes: int = None) -> GapValue:
    """
    ln D_n(alpha) by the requested route
    :param route: one of ROUTE_CHOICES; 'auto' picks by size
    :param m_nodes: quadrature nodes for the gram and recurrence routes
    """
    if route == ROUTE_AUTO:
        route = select_route(n, alpha)
    if route == ROUTE_GRAM:
        value = gap_log_det_gram(n, alpha, m_nodes)
    elif route == ROUTE_THETA:
        value = gap_log_det_theta(n, alpha)
    elif route == ROUTE_RECURRENCE:
        value = gap_log_det_recurrence(n, alpha, m_nodes)
    else:
        raise DomainError(f"Unknown route {route!r}")
    return GapValue(n=n, alpha=alpha, log_det=value, route=route)


def dlog_routes(n: int, alpha: float, m_nodes: int = None) -> DerivativeRoutes:
    """Every available route of d/dalpha ln D_n side by side, with the large-n leading term inside (0, 1)."""
    rank1 = dlog_gap_rank1(n, alpha, m_nodes)
    cd = dlog_gap_cd(n, alpha) if n <= THETA_MAX_N else None
    recurrence = None
    if n > THETA_MAX_N and select_route(n, alpha) == ROUTE_RECURRENCE:
        recurrence = dlog_gap_recurrence(n, alpha, m_nodes)
    leading = rho = None
    if 0.0 < alpha < 1.0:
        leading = lemma2_rhs(n, alpha)
        rho = lemma2_rho(n, alpha)
    return DerivativeRoutes(n=n, alpha=alpha, rank1=rank1, cd=cd, recurrence=recurrence,
                            lemma2_rhs=leading, rho=rho)


def edge_alpha(n: int, s: float, centered: bool = False) -> float:
    alpha = 1.0 - s / (2.0 * n) ** (2.0 / 3.0)
    if centered:
        alpha += 1.0 / (2.0 * n)
    return alpha


def edge_scaled_gap(n: int, s: float, m_nodes: int = None, centered: bool = False) -> float:
    """
    D_n at the soft-edge point alpha = 1 - s / (2n)**(2/3)
    :param centered: shift alpha by 1/(2n), the Plancherel-Rotach centring of the edge
    """
    if not s < (2.0 * n) ** (2.0 / 3.0):
        raise DomainError(f"s={s} must lie below (2n)**(2/3) for n={n}")
    return math.exp(gap_log_det_gram(n, edge_alpha(n, s, centered), m_nodes))


def edge_gap(n: int, s: float, m_nodes: int = None, centered: bool = False) -> EdgeGap:
    """Edge-scaled D_n next to det(I - K_s)."""
    gap = edge_scaled_gap(n, s, m_nodes, centered)
    limit = math.exp(airy_gap_log_det(s).log_det)
    return EdgeGap(n=n, s=s, alpha=edge_alpha(n, s, centered), centered=centered,
                   gap=gap, limit=limit, error=abs(gap - limit))


def plancherel_rotach_check(n: int, u: float, signed: bool = True) -> float:
    """|(-1)**n (2n)**(1/3) / (2 sqrt(n)) omega_n(1 + 1/(2n) + u/(2n)**(2/3)) - Ai(u)|"""
    if abs(u) > EDGE_MAX_U:
        raise DomainError(f"|u|={abs(u)} above {EDGE_MAX_U}")
    if n < EDGE_MIN_N:
        raise DomainError(f"n={n} below {EDGE_MIN_N}")
    x = 1.0 + 1.0 / (2.0 * n) + u / (2.0 * n) ** (2.0 / 3.0)
    omega = wavefunction(LaguerreBasis(n), n, x)[0]
    scaled = (2.0 * n) ** (1.0 / 3.0) / (2.0 * math.sqrt(n)) * omega
    if signed and n % 2:
        scaled = -scaled
    return abs(scaled - airy_ai_pair(u)[0])
