"""
Hastings-McLeod solution of u'' = y u + 2 u**3 and the Tracy-Widom log-CDF.

The solution is shot downward from an anchor y0 where u = Ai to double-double
precision. Downward integration is unstable for y < 0 (growth ~ sqrt(-2y)), so
every step uses a Taylor expansion whose truncation is pushed below the
double-double rounding level; v = int_y^inf u**2 and w = int_y^inf v are
carried along term by term from the same coefficients.
"""
import logging
import math
from functools import lru_cache

import numpy as np

from numerics.exceptions import DomainError, InstabilityError, RangeError
from numerics.extprec import DDouble, as_dd, dd_dot, dd_horner, dd_ln, dd_sum
from numerics.specfun import PRECISION_DD, airy_ai_pair, chi_dd, gauss_legendre

from .schemas import TWPoint

logger = logging.getLogger(__name__)

DEFAULT_Y_START = 16.0
DEFAULT_Y_END = -12.0
DEFAULT_STEP = 1.0 / 128.0
MIN_Y_START = 8.0
# below this anchor the Airy seed misses the solution by more than a double-double ulp
ACCURATE_Y_START = 14.0
MIN_Y_END = -14.0
MAX_STEP = 1e-2

TAYLOR_TOL = 1e-33
TAYLOR_MAX_ORDER = 60
BLOWUP_LIMIT = 1e6
TAIL_NODES = 40
TAIL_LENGTH = 4.0


def _taylor_coefficients(y_c: float, u: DDouble, up: DDouble, h: float):
    """
    Taylor coefficients a_k of u(y_c + t) and p_k of u(y_c + t)**2, truncated
    once the terms at |t| = h drop below TAYLOR_TOL of the leading ones.
    """
    a = [u, up]
    p = []
    cube = []
    scale_a = max(abs(u.hi), abs(up.hi) * h)
    for k in range(TAYLOR_MAX_ORDER):
        p.append(dd_dot(a[:k + 1], a[k::-1]))
        cube.append(dd_dot(p[:k + 1], a[k::-1]))
        # (k+1)(k+2) a_{k+2} = y_c a_k + a_{k-1} + 2 (u^3)_k
        rhs = a[k] * y_c + cube[k] * 2.0
        if k:
            rhs = rhs + a[k - 1]
        a.append(rhs / float((k + 1) * (k + 2)))
        if k < 3:
            continue
        tail_a = max(abs(a[-1].hi) * h ** (k + 2), abs(a[-2].hi) * h ** (k + 1))
        tail_p = abs(p[-1].hi) * h ** (k + 1)
        if tail_a <= TAYLOR_TOL * scale_a and tail_p <= TAYLOR_TOL * abs(p[0].hi):
            break
    else:
        logger.warning(f"Taylor series at y={y_c} not converged after {TAYLOR_MAX_ORDER} terms")
    return a, p


def _advance(a, p, v_c: DDouble, w_c: DDouble, t: float):
    u = dd_horner(a, t)
    up = dd_horner([a[k] * float(k) for k in range(1, len(a))], t)
    v_series = dd_horner([p[k] / float(k + 1) for k in range(len(p))], t) * t
    w_series = dd_horner([p[k] / float((k + 1) * (k + 2)) for k in range(len(p))], t) * (t * t)
    v = v_c - v_series
    w = w_c - v_c * t + w_series
    return u, up, v, w


def _seed(y0: float):
    u, up = airy_ai_pair(y0, PRECISION_DD)
    v = up * up - u * u * y0
    rule = gauss_legendre(TAIL_NODES, y0, y0 + TAIL_LENGTH)
    ai = np.array([airy_ai_pair(float(x))[0] for x in rule.nodes])
    w = as_dd(rule.integrate((rule.nodes - y0) * ai * ai))
    return u, up, v, w


class HMSolution:
    """
    Tabulated Hastings-McLeod solution on a descending grid.
    States are (u, u', v, w) as DDouble, one per grid node.
    """

    def __init__(self, y_start: float, y_end: float, step: float, grid, states, orders):
        self.y_start = y_start
        self.y_end = y_end
        self.step = step
        self.grid = grid
        self.states = states
        self.orders = orders

    def __len__(self):
        return len(self.grid)

    @property
    def u(self):
        return [state[0] for state in self.states]

    @property
    def up(self):
        return [state[1] for state in self.states]

    @property
    def v(self):
        return [state[2] for state in self.states]

    @property
    def w(self):
        return [state[3] for state in self.states]

    def values(self, index: int):
        """Native arrays of one state component (0=u, 1=u', 2=v, 3=w) over the grid."""
        return np.array([float(state[index]) for state in self.states])

    def nearest_index(self, y: float) -> int:
        if not self.y_end <= y <= self.y_start:
            raise RangeError(f"y={y} outside the tabulated range [{self.y_end}, {self.y_start}]")
        index = int(round((self.y_start - y) / self.step))
        return min(max(index, 0), len(self.grid) - 1)

    def state_at(self, y: float):
        """(u, u', v, w) at y by re-expanding the Taylor series at the nearest node."""
        index = self.nearest_index(y)
        y_c = float(self.grid[index])
        u, up, v, w = self.states[index]
        t = y - y_c
        if t == 0.0:
            return u, up, v, w
        a, p = _taylor_coefficients(y_c, u, up, abs(t))
        return _advance(a, p, v, w, t)


def solve_hastings_mcleod(y_start: float = DEFAULT_Y_START, y_end: float = DEFAULT_Y_END,
                          step: float = DEFAULT_STEP) -> HMSolution:
    """
    Shoot the Hastings-McLeod solution from y_start down to y_end
    :param y_start: anchor where u = Ai(y_start), at least MIN_Y_START
    :param y_end: lower end of the table, not below MIN_Y_END
    :param step: fixed step; the last step is shortened to land on y_end
    """
    if y_start < MIN_Y_START:
        raise DomainError(f"y_start={y_start} below {MIN_Y_START}")
    if y_end < MIN_Y_END or y_end >= y_start:
        raise DomainError(f"y_end={y_end} must lie in [{MIN_Y_END}, {y_start})")
    if not 0.0 < step <= MAX_STEP:
        raise DomainError(f"step={step} outside (0, {MAX_STEP}]")
    if y_start < ACCURATE_Y_START:
        logger.warning(f"Anchor y_start={y_start} < {ACCURATE_Y_START}: Airy seed limits accuracy")

    count = int(math.ceil((y_start - y_end) / step - 1e-9))
    grid = np.array([y_start - i * step for i in range(count)] + [y_end])
    u, up, v, w = _seed(y_start)
    states = [(u, up, v, w)]
    orders = []
    for i in range(count):
        y_c = float(grid[i])
        h = y_c - float(grid[i + 1])
        a, p = _taylor_coefficients(y_c, u, up, h)
        u, up, v, w = _advance(a, p, v, w, -h)
        orders.append(len(a))
        if not math.isfinite(u.hi) or abs(u.hi) > BLOWUP_LIMIT or u.hi <= 0.0:
            raise InstabilityError(f"Solution left the Hastings-McLeod branch near y={grid[i + 1]} (u={u.hi})")
        states.append((u, up, v, w))
    logger.info(f"Hastings-McLeod table on [{y_end}, {y_start}] with {len(grid)} nodes, "
                f"Taylor orders {min(orders)}..{max(orders)}")
    return HMSolution(y_start, y_end, step, grid, states, orders)


@lru_cache(maxsize=4)
def hastings_mcleod(y_start: float = DEFAULT_Y_START, y_end: float = DEFAULT_Y_END,
                    step: float = DEFAULT_STEP) -> HMSolution:
    """Process-wide cache of solve_hastings_mcleod; tables are never mutated."""
    return solve_hastings_mcleod(y_start, y_end, step)


def tw_log_cdf(solution: HMSolution, x: float) -> TWPoint:
    w = solution.state_at(x)[3]
    log_cdf = -float(w)
    return TWPoint(x=x, log_cdf=log_cdf, cdf=math.exp(log_cdf))


def tw_cdf_grid(solution: HMSolution, lo: float, hi: float, step: float):
    if step <= 0.0 or hi < lo:
        raise DomainError(f"Invalid grid {lo}:{hi}:{step}")
    count = int(math.floor((hi - lo) / step + 0.5))
    return [tw_log_cdf(solution, lo + i * step) for i in range(count + 1)]


def asb_residual(solution: HMSolution, s: float) -> float:
    """-w(-s) + s**3/12 + ln(s)/8 - chi, which vanishes as s grows."""
    if s <= 0.0:
        raise DomainError(f"s={s} must be positive")
    w = solution.state_at(-s)[3]
    s_dd = as_dd(s)
    residual = -w + s_dd * s_dd * s_dd / 12.0 + dd_ln(s_dd) / 8.0 - chi_dd()
    return float(residual)


SECOND_DIFFERENCE_STENCIL = (1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0)


def ode_residual(solution: HMSolution) -> float:
    """Largest |u'' - y u - 2 u**3| over interior nodes, u'' by a sixth-order second difference."""
    u = solution.u
    grid = solution.grid
    h2 = solution.step * solution.step
    worst = 0.0
    # the final node may sit after a shortened step, so stop one short of it
    for i in range(3, len(grid) - 4):
        second = dd_sum(u[i + j - 3] * c for j, c in enumerate(SECOND_DIFFERENCE_STENCIL)) / h2
        residual = second - u[i] * float(grid[i]) - u[i] * u[i] * u[i] * 2.0
        worst = max(worst, abs(float(residual)))
    return worst
