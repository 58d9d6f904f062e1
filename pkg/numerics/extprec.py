"""
Double-double ("DD") arithmetic.

A DDouble is an unevaluated sum hi + lo of two binary64 numbers with
|lo| <= ulp(hi) / 2, which carries about 106 bits of significand. The
error-free transformations below follow the classical Dekker/Knuth scheme;
when ``math.fma`` is available the product error is taken from it directly.
"""
import logging
import math
from fractions import Fraction

from .exceptions import DomainError, PrecisionExhaustedError, RangeError
from .literals import LN2 as LN2_TEXT

logger = logging.getLogger(__name__)

_SPLITTER = 134217729.0  # 2**27 + 1
_fma = getattr(math, 'fma', None)

EXP_LIMIT = 700.0
DD_EPSILON = 4.93038065763132e-32  # 2**-104

OP_ADD = 'add'
OP_SUB = 'sub'
OP_MUL = 'mul'
OP_DIV = 'div'
OP_SQRT = 'sqrt'
OP_CHOICES = [OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_SQRT]


def two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a: float, b: float):
    """Requires |a| >= |b|."""
    s = a + b
    return s, b - (s - a)


def _split(a: float):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a: float, b: float):
    p = a * b
    if _fma is not None:
        return p, _fma(a, b, -p)
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def _make(hi, lo):
    value = object.__new__(DDouble)
    value.hi = hi
    value.lo = lo
    return value


def _add_parts(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


def _mul_parts(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


def _div_parts(ah, al, bh, bl):
    if bh == 0.0:
        raise DomainError("division by zero")
    q1 = ah / bh
    rh, rl = _add_parts(ah, al, *_neg(*_mul_parts(q1, 0.0, bh, bl)))
    q2 = rh / bh
    rh, rl = _add_parts(rh, rl, *_neg(*_mul_parts(q2, 0.0, bh, bl)))
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return _add_parts(q1, q2, q3, 0.0)


def _neg(h, l):
    return -h, -l


class DDouble:
    __slots__ = ('hi', 'lo')

    def __init__(self, hi=0.0, lo=0.0):
        if isinstance(hi, DDouble):
            self.hi, self.lo = hi.hi, hi.lo
            return
        self.hi, self.lo = two_sum(float(hi), float(lo))

    @classmethod
    def from_string(cls, text: str):
        """Round a decimal literal exactly once into hi + lo."""
        exact = Fraction(text)
        hi = float(exact)
        lo = float(exact - Fraction(hi))
        return _make(hi, lo)

    def to_fraction(self) -> Fraction:
        return Fraction(self.hi) + Fraction(self.lo)

    def __float__(self):
        return self.hi + self.lo

    def __repr__(self):
        return f"DDouble({self.hi!r}, {self.lo!r})"

    def __neg__(self):
        return _make(-self.hi, -self.lo)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.hi < 0.0 or (self.hi == 0.0 and self.lo < 0.0) else self

    def __add__(self, other):
        if isinstance(other, DDouble):
            return _make(*_add_parts(self.hi, self.lo, other.hi, other.lo))
        if isinstance(other, (int, float)):
            return _make(*_add_parts(self.hi, self.lo, float(other), 0.0))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DDouble):
            return _make(*_add_parts(self.hi, self.lo, -other.hi, -other.lo))
        if isinstance(other, (int, float)):
            return _make(*_add_parts(self.hi, self.lo, -float(other), 0.0))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float)):
            return _make(*_add_parts(float(other), 0.0, -self.hi, -self.lo))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, DDouble):
            return _make(*_mul_parts(self.hi, self.lo, other.hi, other.lo))
        if isinstance(other, (int, float)):
            return _make(*_mul_parts(self.hi, self.lo, float(other), 0.0))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DDouble):
            return _make(*_div_parts(self.hi, self.lo, other.hi, other.lo))
        if isinstance(other, (int, float)):
            return _make(*_div_parts(self.hi, self.lo, float(other), 0.0))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, float)):
            return _make(*_div_parts(float(other), 0.0, self.hi, self.lo))
        return NotImplemented

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return 1.0 / (self ** -exponent)
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def _key(self, other):
        other = as_dd(other)
        return (self.hi, self.lo), (other.hi, other.lo)

    def __eq__(self, other):
        if not isinstance(other, (DDouble, int, float)):
            return NotImplemented
        a, b = self._key(other)
        return a == b

    def __lt__(self, other):
        a, b = self._key(other)
        return a < b

    def __le__(self, other):
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._key(other)
        return a >= b

    def __hash__(self):
        return hash((self.hi, self.lo))

    def ldexp(self, k: int):
        return _make(math.ldexp(self.hi, k), math.ldexp(self.lo, k))

    def sqrt(self):
        return dd_sqrt(self)


ZERO = _make(0.0, 0.0)
ONE = _make(1.0, 0.0)
LN2 = DDouble.from_string(LN2_TEXT)


def as_dd(value) -> DDouble:
    if isinstance(value, DDouble):
        return value
    if isinstance(value, str):
        return DDouble.from_string(value)
    return _make(float(value), 0.0)


def dd_arith(a, b, op: str) -> DDouble:
    """
    Apply one of the basic operations to double-double operands
    :param a: left operand (DDouble or float)
    :param b: right operand (DDouble or float), ignored for sqrt
    :param op: one of OP_CHOICES
    """
    if op == OP_SQRT:
        return dd_sqrt(a)
    a, b = as_dd(a), as_dd(b)
    if op == OP_ADD:
        return a + b
    if op == OP_SUB:
        return a - b
    if op == OP_MUL:
        return a * b
    if op == OP_DIV:
        return a / b
    raise DomainError(f"Unknown operation {op!r}")


def dd_sqrt(a) -> DDouble:
    a = as_dd(a)
    if a.hi < 0.0:
        raise DomainError(f"sqrt of negative value {a.hi}")
    if a.hi == 0.0:
        return ZERO
    x = 1.0 / math.sqrt(a.hi)
    ax = a.hi * x
    p, e = two_prod(ax, ax)
    diff = _add_parts(a.hi, a.lo, -p, -e)[0]
    return _make(*two_sum(ax, diff * x * 0.5))


def dd_cbrt(a) -> DDouble:
    """Real cube root by Newton refinement of the binary64 estimate."""
    a = as_dd(a)
    if a.hi == 0.0:
        return ZERO
    sign = -1.0 if a.hi < 0.0 else 1.0
    a = abs(a)
    y = as_dd(a.hi ** (1.0 / 3.0))
    for _ in range(2):
        y = y - (y * y * y - a) / (3.0 * (y * y))
    return y * sign


def dd_exp(x) -> DDouble:
    x = as_dd(x)
    if abs(x.hi) > EXP_LIMIT:
        raise RangeError(f"exp argument {x.hi} outside [-{EXP_LIMIT}, {EXP_LIMIT}]")
    if x.hi == 0.0 and x.lo == 0.0:
        return ONE
    k = int(round(x.hi / LN2.hi))
    # |r| <= ln2 / 2, scaled back by 2**k
    r = x - LN2 * k
    term = ONE
    total = ONE
    j = 1
    while True:
        term = term * r / j
        total = total + term
        if abs(term.hi) <= 1e-34 * abs(total.hi):
            break
        j += 1
    return total.ldexp(k)


def dd_ln(x) -> DDouble:
    x = as_dd(x)
    if x.hi <= 0.0:
        raise DomainError(f"log of non-positive value {x.hi}")
    # ln x = ln(x / 2**e) + e ln2 keeps the Newton step inside the range of dd_exp
    _, e = math.frexp(x.hi)
    scaled = x.ldexp(-e)
    y = as_dd(math.log(scaled.hi))
    for _ in range(2):
        y = y + scaled * dd_exp(-y) - 1.0
    return y + LN2 * e


def dd_sum(values) -> DDouble:
    total = ZERO
    for value in values:
        total = total + value
    return total


def dd_dot(xs, ys) -> DDouble:
    """Inner product of two DDouble sequences with a fused accumulator."""
    sh = sl = 0.0
    for a, b in zip(xs, ys):
        p, e = two_prod(a.hi, b.hi)
        e += a.hi * b.lo + a.lo * b.hi
        s, t = two_sum(sh, p)
        t += sl + e
        sh, sl = quick_two_sum(s, t)
    return _make(sh, sl)


def dd_horner(coefficients, x) -> DDouble:
    """Evaluate sum(c_k x**k) with the coefficients given lowest order first."""
    total = ZERO
    for c in reversed(coefficients):
        total = total * x + c
    return total


def dd_cholesky(matrix):
    """
    Lower Cholesky factor of a symmetric matrix given as a list of DDouble rows.
    Raises PrecisionExhaustedError at the first non-positive pivot.
    """
    n = len(matrix)
    lower = [[ZERO] * n for _ in range(n)]
    for j in range(n):
        row_j = lower[j]
        pivot = matrix[j][j] - dd_dot(row_j[:j], row_j[:j])
        if pivot.hi <= 0.0:
            raise PrecisionExhaustedError(f"non-positive pivot {pivot.hi!r} at index {j}", pivot=j)
        diagonal = dd_sqrt(pivot)
        row_j[j] = diagonal
        for i in range(j + 1, n):
            row_i = lower[i]
            row_i[j] = (matrix[i][j] - dd_dot(row_i[:j], row_j[:j])) / diagonal
    return lower


def dd_lower_inverse(lower):
    """Inverse of a lower-triangular DDouble matrix by forward substitution."""
    n = len(lower)
    inverse = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        inverse[i][i] = 1.0 / lower[i][i]
        for j in range(i):
            acc = dd_dot(lower[i][j:i], [inverse[k][j] for k in range(j, i)])
            inverse[i][j] = -acc / lower[i][i]
    return inverse
