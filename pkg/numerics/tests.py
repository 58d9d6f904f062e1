import math
from fractions import Fraction

import mpmath
import numpy as np
from django.test import SimpleTestCase
from scipy import special

from .exceptions import DomainError, PrecisionExhaustedError, RangeError
from .extprec import (
    DDouble, LN2, OP_ADD, OP_DIV, OP_MUL, OP_SQRT, OP_SUB, as_dd, dd_arith, dd_cholesky,
    dd_dot, dd_exp, dd_ln, dd_lower_inverse, dd_sqrt,
)
from .schemas import CONSTANTS_METHOD
from .specfun import (
    AIRY_SERIES_UPPER, PRECISION_DD, airy_ai_pair, airy_arrays, chi_constant,
    exp_moments, gauss_legendre, gauss_legendre_dd, zeta_prime_minus1_dd,
)

mpmath.mp.prec = 200


def to_mp(value: DDouble):
    return mpmath.mpf(value.hi) + mpmath.mpf(value.lo)


def relative_error(value: DDouble, exact) -> float:
    exact = mpmath.mpf(exact)
    if exact == 0:
        return float(abs(to_mp(value)))
    return float(abs((to_mp(value) - exact) / exact))


class DDArithmeticTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        rng = np.random.default_rng(20240601)
        cls.pairs = []
        for _ in range(10000):
            a = rng.uniform(-1e3, 1e3) * 10.0 ** rng.integers(-8, 8)
            b = rng.uniform(-1e3, 1e3) * 10.0 ** rng.integers(-8, 8)
            cls.pairs.append((
                DDouble(a, a * rng.uniform(-1.0, 1.0) * 2.0 ** -54),
                DDouble(b, b * rng.uniform(-1.0, 1.0) * 2.0 ** -54),
            ))

    def test_basic_operations_match_big_float(self):
        operations = {
            OP_ADD: lambda x, y: x + y,
            OP_SUB: lambda x, y: x - y,
            OP_MUL: lambda x, y: x * y,
            OP_DIV: lambda x, y: x / y,
        }
        for a, b in self.pairs:
            for op, exact_op in operations.items():
                exact = exact_op(to_mp(a), to_mp(b))
                result = dd_arith(a, b, op)
                scale = abs(exact) if op in (OP_MUL, OP_DIV) else abs(to_mp(a)) + abs(to_mp(b))
                error = abs(to_mp(result) - exact) / scale
                self.assertLessEqual(float(error), 2.0 ** -100, f"{op} {a!r} {b!r}")
            root = dd_arith(abs(a), None, OP_SQRT)
            self.assertLessEqual(relative_error(root, mpmath.sqrt(abs(to_mp(a)))), 2.0 ** -100)

    def test_addition_nearly_associative(self):
        for a, b in self.pairs[:2000]:
            c = a * 0.75
            left, right = (a + b) + c, a + (b + c)
            scale = abs(to_mp(a)) + abs(to_mp(b)) + abs(to_mp(c))
            self.assertLessEqual(float(abs(to_mp(left) - to_mp(right)) / scale), 1e-30)

    def test_cancellation_recovers_small_addend(self):
        small = as_dd(math.pi * 1e-20)
        recovered = (as_dd(1.0) + small) - 1.0
        self.assertLessEqual(relative_error(recovered, mpmath.mpf(math.pi * 1e-20)), 2.0 ** -100)

    def test_unknown_operation(self):
        with self.assertRaises(DomainError):
            dd_arith(1.0, 2.0, 'pow')

    def test_division_by_zero(self):
        with self.assertRaises(DomainError):
            as_dd(1.0) / 0.0

    def test_from_string_rounds_once(self):
        value = DDouble.from_string("0.1")
        self.assertLessEqual(abs(value.to_fraction() - Fraction(1, 10)), Fraction(1, 10) * Fraction(1, 2 ** 105))
        self.assertEqual(value.hi, 0.1)

    def test_sqrt(self):
        for x in (2.0, 1e-20, 3.5e7, 0.75):
            self.assertLessEqual(relative_error(dd_sqrt(x), mpmath.sqrt(x)), 2.0 ** -100)
        self.assertEqual(dd_sqrt(0.0), 0.0)
        with self.assertRaises(DomainError):
            dd_sqrt(-1.0)

    def test_exp_and_log(self):
        for x in (-650.5, -30.25, -1.0, -1e-9, 0.5, 1.0, 12.125, 699.0):
            self.assertLessEqual(relative_error(dd_exp(x), mpmath.exp(x)), 1e-30, x)
        for x in (1e-300, 0.3, 1.0 + 2.0 ** -40, 2.0, 1e250):
            self.assertLessEqual(float(abs(to_mp(dd_ln(x)) - mpmath.log(x))), 1e-30 * max(1.0, abs(math.log(x))), x)
        self.assertLessEqual(relative_error(LN2, mpmath.log(2)), 1e-32)
        for x in np.linspace(-20.0, 20.0, 401):
            self.assertLessEqual(abs(float(dd_ln(dd_exp(x)) - x)), 1e-29 * max(1.0, abs(x)), x)

    def test_log_of_tiny_and_huge_values(self):
        for x in (1e-310, 5e-324, 1.7e308):
            self.assertLessEqual(float(abs(to_mp(dd_ln(x)) - mpmath.log(x))), 1e-30 * abs(math.log(x)), x)

    def test_exp_range(self):
        with self.assertRaises(RangeError):
            dd_exp(701.0)
        with self.assertRaises(RangeError):
            dd_exp(-701.0)
        with self.assertRaises(DomainError):
            dd_ln(0.0)

    def test_cholesky_and_inverse(self):
        size = 6
        hilbert = [[as_dd(1.0) / float(i + j + 1) for j in range(size)] for i in range(size)]
        lower = dd_cholesky(hilbert)
        for i in range(size):
            for j in range(i + 1):
                product = dd_dot(lower[i][:j + 1], lower[j][:j + 1])
                self.assertLessEqual(abs(float(product - hilbert[i][j])), 1e-28)
        inverse = dd_lower_inverse(lower)
        for i in range(size):
            for j in range(size):
                entry = dd_dot([lower[i][k] for k in range(size)], [inverse[k][j] for k in range(size)])
                self.assertAlmostEqual(float(entry), 1.0 if i == j else 0.0, places=20)

    def test_cholesky_rejects_indefinite(self):
        matrix = [[as_dd(1.0), as_dd(2.0)], [as_dd(2.0), as_dd(1.0)]]
        with self.assertRaises(PrecisionExhaustedError) as ctx:
            dd_cholesky(matrix)
        self.assertEqual(ctx.exception.pivot, 1)


class AiryTests(SimpleTestCase):

    def test_native_matches_scipy(self):
        grid = np.linspace(-40.0, 40.0, 801)
        ai, aip = airy_arrays(grid)
        ref_ai, ref_aip, _, _ = special.airy(grid)
        np.testing.assert_allclose(ai, ref_ai, rtol=0, atol=2e-13)
        np.testing.assert_allclose(aip, ref_aip, rtol=0, atol=2e-12)

    def test_values_at_origin(self):
        ai, aip = airy_ai_pair(0.0, PRECISION_DD)
        self.assertLessEqual(relative_error(ai, mpmath.airyai(0)), 1e-30)
        self.assertLessEqual(relative_error(aip, mpmath.airyai(0, derivative=1)), 1e-30)

    def test_double_double_accuracy(self):
        # series cancellation costs about exp(|2/3 x**1.5|) ulps away from the origin
        cases = ((-11.5, 1e-18), (-3.0, 1e-28), (-0.25, 1e-30), (1.5, 1e-29), (5.0, 1e-23), (16.0, 1e-28), (25.0, 1e-28))
        for x, tol in cases:
            ai, aip = airy_ai_pair(x, PRECISION_DD)
            self.assertLessEqual(relative_error(ai, mpmath.airyai(x)), tol, x)
            self.assertLessEqual(relative_error(aip, mpmath.airyai(x, derivative=1)), tol, x)

    def test_branches_agree_at_switch(self):
        below = airy_ai_pair(AIRY_SERIES_UPPER - 1e-9, PRECISION_DD)[0]
        above = airy_ai_pair(AIRY_SERIES_UPPER + 1e-9, PRECISION_DD)[0]
        self.assertLessEqual(relative_error(below, mpmath.airyai(AIRY_SERIES_UPPER - 1e-9)), 1e-15)
        self.assertLessEqual(relative_error(above, mpmath.airyai(AIRY_SERIES_UPPER + 1e-9)), 1e-15)

    def test_decay_identity(self):
        grid = np.linspace(-10.0, 10.0, 2001)
        ai, aip = airy_arrays(grid)
        v = aip * aip - grid * ai * ai
        self.assertTrue(np.all(v > 0.0))
        self.assertTrue(np.all(np.diff(v) < 0.0))

    def test_decay_identity_derivative(self):
        def v(x):
            ai, aip = airy_ai_pair(x)
            return aip * aip - x * ai * ai

        h = 1e-4
        difference = (v(1.0 + h) - v(1.0 - h)) / (2.0 * h)
        self.assertAlmostEqual(difference, -airy_ai_pair(1.0)[0] ** 2, delta=1e-8)

    def test_outside_domain(self):
        with self.assertRaises(DomainError):
            airy_ai_pair(40.5)
        with self.assertRaises(DomainError):
            airy_ai_pair(float('nan'))


class QuadratureTests(SimpleTestCase):

    def test_polynomial_exactness(self):
        rule = gauss_legendre(12, -1.5, 3.0)
        self.assertTrue(np.all(np.diff(rule.nodes) > 0))
        self.assertTrue(np.all((rule.nodes > -1.5) & (rule.nodes < 3.0)))
        self.assertAlmostEqual(float(np.sum(rule.weights)), 4.5, places=13)
        for k in range(24):
            exact = (3.0 ** (k + 1) - (-1.5) ** (k + 1)) / (k + 1)
            self.assertAlmostEqual(rule.integrate(rule.nodes ** k) / exact, 1.0, places=12, msg=k)

    def test_single_node(self):
        rule = gauss_legendre(1, 0.0, 2.0)
        self.assertAlmostEqual(rule.nodes[0], 1.0, places=15)
        self.assertAlmostEqual(rule.weights[0], 2.0, places=15)

    def test_two_point_rule(self):
        rule = gauss_legendre(2, -1.0, 1.0)
        np.testing.assert_allclose(rule.nodes, [-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)], rtol=0, atol=1e-15)
        np.testing.assert_allclose(rule.weights, [1.0, 1.0], rtol=0, atol=1e-15)

    def test_exponential_converges(self):
        coarse, fine = (gauss_legendre(m, 0.0, 1.0) for m in (20, 40))
        values = [rule.integrate(np.exp(-4.0 * rule.nodes)) for rule in (coarse, fine)]
        self.assertLessEqual(abs(values[0] - values[1]), 1e-14 * values[1])
        self.assertAlmostEqual(values[1], -math.expm1(-4.0) / 4.0, delta=1e-15)

    def test_invalid_requests(self):
        with self.assertRaises(DomainError):
            gauss_legendre(0, 0.0, 1.0)
        with self.assertRaises(DomainError):
            gauss_legendre(4, 1.0, 1.0)

    def test_double_double_rule(self):
        for m in (7, 8):
            rule = gauss_legendre_dd(m, 0.0, 1.0)
            total = sum(rule.weights[i] * rule.nodes[i] ** (2 * m - 1) for i in range(m))
            self.assertLessEqual(relative_error(total, mpmath.mpf(1) / (2 * m)), 1e-29)
            self.assertLessEqual(abs(float(sum(rule.weights) - 1.0)), 1e-30)


class MomentTests(SimpleTestCase):

    def exact(self, k, c, alpha):
        return mpmath.gammainc(k + 1, 0, c * alpha) / mpmath.mpf(c) ** (k + 1)

    def test_native_moments(self):
        for c, alpha in ((4.0, 0.001), (8.0, 0.5), (40.0, 1.0), (64.0, 0.9)):
            moments = exp_moments(20, c, alpha)
            for k, value in enumerate(moments):
                self.assertLessEqual(abs(value / float(self.exact(k, c, alpha)) - 1.0), 1e-13, (k, c, alpha))

    def test_double_double_moments(self):
        for c, alpha in ((4.0, 1e-4), (16.0, 0.3), (64.0, 1.0)):
            moments = exp_moments(32, c, alpha, PRECISION_DD)
            for k, value in enumerate(moments):
                self.assertLessEqual(relative_error(value, self.exact(k, c, alpha)), 1e-28, (k, c, alpha))

    def test_positive_and_shrinking(self):
        for c, alpha in ((4.0, 1e-3), (4.0, 1.0), (16.0, 0.3), (64.0, 1.0)):
            moments = exp_moments(20, c, alpha)
            self.assertGreater(moments[0], 0.0)
            for k in range(1, len(moments)):
                self.assertGreater(moments[k], 0.0, (k, c, alpha))
                self.assertLess(moments[k], moments[k - 1] * alpha, (k, c, alpha))

    def test_large_interval_limit(self):
        moments = exp_moments(3, 4.0, 50.0)
        for k, value in enumerate(moments):
            self.assertAlmostEqual(value, math.factorial(k) / 4.0 ** (k + 1), places=15)

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            exp_moments(3, 4.0, 0.0)
        with self.assertRaises(DomainError):
            exp_moments(-1, 4.0, 1.0)


class ConstantTests(SimpleTestCase):

    def test_zeta_prime_minus_one(self):
        constants = chi_constant()
        exact = mpmath.zeta(-1, derivative=1)
        self.assertAlmostEqual(constants.zeta_prime_minus1, float(exact), places=15)
        self.assertLessEqual(float(abs(to_mp(zeta_prime_minus1_dd()) - exact)), 1e-28)

    def test_chi(self):
        constants = chi_constant()
        self.assertAlmostEqual(constants.chi - constants.zeta_prime_minus1, math.log(2.0) / 24.0, places=15)
        self.assertAlmostEqual(constants.chi, -0.13654001117712, places=13)
        self.assertEqual(constants.method, CONSTANTS_METHOD)
