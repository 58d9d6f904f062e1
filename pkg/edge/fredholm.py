import logging
import math

import numpy as np
import scipy.linalg

from numerics.exceptions import DiscretizationError, DomainError, PrecisionExhaustedError
from numerics.extprec import dd_cholesky, dd_ln, dd_sqrt, dd_sum
from numerics.specfun import (
    PRECISION_DD, PRECISION_NATIVE, airy_ai_pair, airy_arrays, gauss_legendre, gauss_legendre_dd,
)

from .schemas import GapDeterminant

logger = logging.getLogger(__name__)

DEFAULT_NODES = 80
MIN_NODES = 20
MIN_S = -20.0
TRUNCATION_OFFSET = 14.0
DIAGONAL_SWITCH = 1e-6
FACTORISATION_AGREEMENT = 1e-6


def airy_kernel(x: float, y: float) -> float:
    """
    K(x, y) = (Ai(x) Ai'(y) - Ai(y) Ai'(x)) / (x - y)
    Near the diagonal the kernel is expanded about the midpoint.
    """
    d = x - y
    if abs(d) > DIAGONAL_SWITCH:
        ai_x, aip_x = airy_ai_pair(x)
        ai_y, aip_y = airy_ai_pair(y)
        return (ai_x * aip_y - ai_y * aip_x) / d
    mid = 0.5 * (x + y)
    ai, aip = airy_ai_pair(mid)
    diagonal = aip * aip - mid * ai * ai
    correction = d * d / 4.0 * (ai * aip + 2.0 * mid * diagonal) / 3.0
    return diagonal + correction


def truncation_point(s: float) -> float:
    return max(-s, 0.0) + TRUNCATION_OFFSET


class KernelMatrix:
    """A = sqrt(w_i) K(x_i, x_j) sqrt(w_j) on a Gauss-Legendre rule over (-s, T)."""

    def __init__(self, s: float, m: int, precision: str = PRECISION_NATIVE):
        self.s = s
        self.m = m
        self.precision = precision
        self.T = truncation_point(s)
        if precision == PRECISION_DD:
            self._build_dd()
        else:
            self._build_native()

    def _build_native(self):
        rule = gauss_legendre(self.m, -self.s, self.T)
        x, w = rule.nodes, rule.weights
        ai, aip = airy_arrays(x)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        kernel = (np.outer(ai, aip) - np.outer(aip, ai)) / diff
        np.fill_diagonal(kernel, aip * aip - x * ai * ai)
        root = np.sqrt(w)
        self.nodes = x
        self.weights = w
        self.A = root[:, None] * kernel * root[None, :]

    def _build_dd(self):
        rule = gauss_legendre_dd(self.m, -self.s, self.T)
        x = rule.nodes
        pairs = [airy_ai_pair(node, PRECISION_DD) for node in x]
        root = [dd_sqrt(weight) for weight in rule.weights]
        m = self.m
        A = [[None] * m for _ in range(m)]
        for i in range(m):
            ai_i, aip_i = pairs[i]
            A[i][i] = (aip_i * aip_i - x[i] * ai_i * ai_i) * root[i] * root[i]
            for j in range(i):
                ai_j, aip_j = pairs[j]
                entry = (ai_i * aip_j - ai_j * aip_i) / (x[i] - x[j]) * root[i] * root[j]
                A[i][j] = entry
                A[j][i] = entry
        self.nodes = np.array([float(node) for node in x])
        self.weights = np.array([float(weight) for weight in rule.weights])
        self.A_dd = A
        self.A = np.array([[float(entry) for entry in row] for row in A])

    def complement_dd(self):
        """I - A as DDouble rows."""
        return [[(1.0 if i == j else 0.0) - self.A_dd[i][j] for j in range(self.m)] for i in range(self.m)]


def airy_kernel_matrix(s: float, m: int = DEFAULT_NODES, precision: str = PRECISION_NATIVE) -> KernelMatrix:
    if s < MIN_S or math.isnan(s):
        raise DomainError(f"s={s} below {MIN_S}")
    if m < MIN_NODES:
        raise DomainError(f"m={m} below {MIN_NODES}")
    return KernelMatrix(s, m, precision)


def logdet_sym(matrix) -> float:
    """ln det of a symmetric positive definite matrix, 2 * sum(ln diag(L))."""
    try:
        lower = scipy.linalg.cholesky(np.asarray(matrix, dtype=float), lower=True)
    except np.linalg.LinAlgError as e:
        raise DomainError(f"Matrix is not positive definite: {e}") from e
    return 2.0 * float(np.sum(np.log(np.diag(lower))))


def logdet_lu(matrix) -> float:
    """ln det by LU with partial pivoting; the determinant must be positive."""
    lu, piv = scipy.linalg.lu_factor(np.asarray(matrix, dtype=float), check_finite=True)
    diagonal = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    negatives = int(np.sum(diagonal < 0.0))
    if np.any(diagonal == 0.0) or (swaps + negatives) % 2:
        raise DomainError("Determinant is not positive")
    return float(np.sum(np.log(np.abs(diagonal))))


def _log_det(s: float, m: int, precision: str) -> float:
    kernel = airy_kernel_matrix(s, m, precision)
    if precision == PRECISION_DD:
        try:
            lower = dd_cholesky(kernel.complement_dd())
        except PrecisionExhaustedError as e:
            raise DiscretizationError(f"I - A not positive definite for s={s}, m={m}") from e
        return float(dd_sum(dd_ln(lower[i][i]) for i in range(m)) * 2.0)
    complement = np.eye(m) - kernel.A
    try:
        cholesky = logdet_sym(complement)
    except DomainError as e:
        raise DiscretizationError(f"I - A not positive definite for s={s}, m={m}") from e
    log_det = logdet_lu(complement)
    if abs(log_det - cholesky) > FACTORISATION_AGREEMENT * max(1.0, abs(log_det)):
        logger.warning(f"LU and Cholesky disagree on ln det(I - A) at s={s}, m={m}: {log_det!r} vs {cholesky!r}")
    return log_det


def airy_gap_log_det(s: float, m: int = DEFAULT_NODES, precision: str = PRECISION_NATIVE) -> GapDeterminant:
    """
    ln det(I - K_s) on L2(-s, inf) by Nystrom discretisation
    :param s: left end of the excluded interval is -s
    :param m: Gauss-Legendre nodes; the rule with 2m nodes gives est_error
    :param precision: 'native' (LU in binary64) or 'dd' (double-double Cholesky)
    """
    if s < MIN_S or math.isnan(s):
        raise DomainError(f"s={s} below {MIN_S}")
    if m < MIN_NODES:
        raise DomainError(f"m={m} below {MIN_NODES}")
    coarse = _log_det(s, m, precision)
    fine = _log_det(s, 2 * m, precision)
    est_error = abs(fine - coarse)
    logger.debug(f"ln det(I - K_s) at s={s}: m={m} -> {coarse!r}, 2m -> {fine!r}")
    if est_error > 1e-8 * max(1.0, abs(coarse)):
        logger.warning(f"Node doubling changes ln det at s={s} by {est_error:.3e}; increase m")
    return GapDeterminant(s=s, log_det=coarse, node_count=m, est_error=est_error, precision=precision)


def trace_bound(s: float, m: int = DEFAULT_NODES) -> float:
    """Trace of A; -ln det(I - A) lies between tr A and tr A / (1 - lambda_max)."""
    return float(np.trace(airy_kernel_matrix(s, m).A))
