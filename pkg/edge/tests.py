import math
from unittest import mock

import mpmath
import numpy as np
from django.test import SimpleTestCase
from pydantic import ValidationError

from numerics.exceptions import DomainError, RangeError
from numerics.extprec import dd_sum
from numerics.specfun import PRECISION_DD, AIP_ZERO, airy_ai_pair, chi_constant

from .asymptotics import (
    SOURCE_PAINLEVE, _edge_bracket, aas_rhs, cas_rhs, constant_fit, dal0_rhs, extrapolate_to_zero,
    hm_tail, intd2_rhs, intd_rhs, lemma2_remainder, lemma2_rho, lemma2_rhs, residual_table,
    slope_fit, thm1_limit_check, thm1_rhs,
)
from . import fredholm
from .fredholm import airy_gap_log_det, airy_kernel, airy_kernel_matrix, logdet_lu, logdet_sym, trace_bound
from .painleve import (
    SECOND_DIFFERENCE_STENCIL, asb_residual, hastings_mcleod, ode_residual, solve_hastings_mcleod,
    tw_cdf_grid, tw_log_cdf,
)
from .schemas import GapDeterminant, ResidualRow, TWPoint

mpmath.mp.prec = 200


class PainleveTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.solution = hastings_mcleod()

    def test_anchor_is_airy(self):
        ai, aip = airy_ai_pair(self.solution.y_start, PRECISION_DD)
        self.assertEqual(self.solution.u[0], ai)
        self.assertEqual(self.solution.up[0], aip)

    def test_left_tail(self):
        u = float(self.solution.state_at(-8.0)[0])
        self.assertAlmostEqual(hm_tail(-8.0), 2.0 * (1.0 - 1.0 / 4096.0), places=14)
        self.assertLessEqual(abs(u - hm_tail(-8.0)), 5e-5)
        gaps = [abs(float(self.solution.state_at(y)[0]) / hm_tail(y) - 1.0) for y in range(-4, -13, -1)]
        self.assertTrue(all(b < a for a, b in zip(gaps, gaps[1:])), gaps)

    def test_step_halving(self):
        coarse = solve_hastings_mcleod(step=1.0 / 64.0)
        fine = float(self.solution.state_at(-10.0)[0])
        self.assertLessEqual(abs(float(coarse.state_at(-10.0)[0]) - fine), 1e-12)

    def test_monotone_and_positive(self):
        u = self.solution.values(0)
        v = self.solution.values(2)
        w = self.solution.values(3)
        self.assertTrue(np.all(u > 0.0))
        # the grid descends, so every component grows along it
        self.assertTrue(np.all(np.diff(u) > 0.0))
        self.assertTrue(np.all(np.diff(v) > 0.0))
        self.assertTrue(np.all(np.diff(w) > 0.0))

    def test_ode_residual(self):
        self.assertLessEqual(ode_residual(self.solution), 1e-10)

    def test_w_second_difference(self):
        u, w = self.solution.u, self.solution.w
        h2 = self.solution.step ** 2
        for i in range(64, len(self.solution) - 64, 64):
            second = dd_sum(w[i + j - 3] * c for j, c in enumerate(SECOND_DIFFERENCE_STENCIL)) / h2
            self.assertLessEqual(abs(float(second - u[i] * u[i])), 1e-8, self.solution.grid[i])

    def test_log_cdf(self):
        top = tw_log_cdf(self.solution, self.solution.y_start)
        self.assertLess(abs(top.log_cdf), 1e-8)
        self.assertAlmostEqual(top.cdf, 1.0, places=8)
        h = 1e-3
        values = [tw_log_cdf(self.solution, -2.0 + k * h).log_cdf for k in (-1, 0, 1)]
        second = (values[0] - 2.0 * values[1] + values[2]) / (h * h)
        u = float(self.solution.state_at(-2.0)[0])
        self.assertLessEqual(abs(second + u * u), 1e-6)

    def test_cdf_grid(self):
        points = tw_cdf_grid(self.solution, -4.0, 2.0, 0.5)
        self.assertEqual(len(points), 13)
        self.assertEqual(points[-1].x, 2.0)
        cdf = [point.cdf for point in points]
        self.assertTrue(all(b > a for a, b in zip(cdf, cdf[1:])))

    def test_out_of_range(self):
        with self.assertRaises(RangeError):
            tw_log_cdf(self.solution, -13.0)
        with self.assertRaises(RangeError):
            tw_log_cdf(self.solution, 17.0)

    def test_invalid_configuration(self):
        with self.assertRaises(DomainError):
            solve_hastings_mcleod(y_start=5.0)
        with self.assertRaises(DomainError):
            solve_hastings_mcleod(y_end=-15.0)
        with self.assertRaises(DomainError):
            solve_hastings_mcleod(step=0.05)

    def test_large_gap_residual(self):
        self.assertLessEqual(abs(asb_residual(self.solution, 10.0)), 1e-2)
        scaled = [abs(asb_residual(self.solution, s)) * s ** 1.5 for s in (6.0, 8.0, 10.0, 12.0)]
        self.assertLessEqual(max(scaled), 3.0 * min(scaled), scaled)
        with self.assertRaises(DomainError):
            asb_residual(self.solution, 0.0)

    def test_matches_nystrom_determinant(self):
        for s in (4.0, 6.0):
            log_cdf = tw_log_cdf(self.solution, -s).log_cdf
            log_det = airy_gap_log_det(s, 96, PRECISION_DD).log_det
            self.assertLessEqual(abs(log_cdf - log_det), 1e-8, s)


class FredholmTests(SimpleTestCase):

    def test_kernel_values(self):
        self.assertAlmostEqual(airy_kernel(0.0, 0.0), float(AIP_ZERO) ** 2, places=16)
        self.assertEqual(airy_kernel(0.3, -1.1), airy_kernel(-1.1, 0.3))
        self.assertLessEqual(abs(airy_kernel(1.0, 1.0 + 1e-6) - airy_kernel(1.0, 1.0)), 1e-8)

    def test_near_diagonal_expansion(self):
        def exact(x, y):
            numerator = mpmath.airyai(x) * mpmath.airyai(y, derivative=1) - mpmath.airyai(x, derivative=1) * mpmath.airyai(y)
            return float(numerator / (mpmath.mpf(x) - y))

        # widen the expansion branch so it covers a separation of 1e-2
        with mock.patch.object(fredholm, 'DIAGONAL_SWITCH', 0.1):
            for x, tol in ((1.0, 1e-8), (-2.0, 1e-7)):
                self.assertLessEqual(abs(airy_kernel(x, x + 0.01) - exact(x, x + 0.01)), tol, x)

    def test_kernel_matrix_precisions_agree(self):
        native = airy_kernel_matrix(2.0, 24)
        dd = airy_kernel_matrix(2.0, 24, PRECISION_DD)
        np.testing.assert_allclose(native.A, native.A.T, rtol=0.0, atol=1e-15)
        np.testing.assert_allclose(dd.A, native.A, rtol=0.0, atol=1e-14)
        self.assertEqual(native.T, 14.0)
        with self.assertRaises(DomainError):
            airy_kernel_matrix(1.0, 5)

    def test_decay_region_trace_bound(self):
        result = airy_gap_log_det(-6.0)
        trace = trace_bound(-6.0)
        self.assertLess(trace, 1e-6)
        self.assertLessEqual(abs(result.log_det + trace), 1e-14)

    def test_large_gap_against_leading_terms(self):
        result = airy_gap_log_det(10.0, 96, PRECISION_DD)
        self.assertLessEqual(abs(result.log_det - thm1_rhs(10.0)), 1e-2)
        self.assertEqual(result.precision, PRECISION_DD)

    def test_node_doubling(self):
        coarse = airy_gap_log_det(2.0, 60)
        fine = airy_gap_log_det(2.0, 120)
        self.assertLessEqual(abs(coarse.log_det - fine.log_det), 1e-10)
        self.assertLessEqual(coarse.est_error, 1e-10)
        self.assertEqual(coarse.node_count, 60)

    def test_monotone_in_s(self):
        values = [airy_gap_log_det(s, 60).log_det for s in (-4.0, -2.0, 0.0, 2.0, 4.0, 6.0)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])), values)
        self.assertTrue(all(v < 0.0 for v in values))

    def test_invalid_requests(self):
        with self.assertRaises(DomainError):
            airy_gap_log_det(-25.0)
        with self.assertRaises(DomainError):
            airy_gap_log_det(0.0, 10)

    def test_symmetric_log_det(self):
        self.assertEqual(logdet_sym(np.eye(4)), 0.0)
        self.assertAlmostEqual(logdet_sym(np.diag([0.5, 0.5])), 2.0 * math.log(0.5), places=15)
        rng = np.random.default_rng(7)
        b = rng.standard_normal((5, 5))
        spd = b @ b.T + 5.0 * np.eye(5)
        self.assertAlmostEqual(logdet_sym(spd), logdet_lu(spd), delta=1e-12)
        with self.assertRaises(DomainError):
            logdet_sym(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with self.assertRaises(DomainError):
            logdet_lu(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_factorisations_cross_checked(self):
        with mock.patch.object(fredholm.logger, 'warning') as warning:
            airy_gap_log_det(2.0, 60)
        warning.assert_not_called()
        with mock.patch.object(fredholm, 'logdet_sym', return_value=0.5), \
                mock.patch.object(fredholm.logger, 'warning') as warning:
            result = airy_gap_log_det(2.0, 60)
        self.assertLess(result.log_det, 0.0)
        warning.assert_called()


class AsymptoticsTests(SimpleTestCase):

    def setUp(self):
        self.chi = chi_constant().chi
        self.zeta = chi_constant().zeta_prime_minus1

    def test_thm1_rhs(self):
        self.assertAlmostEqual(thm1_rhs(1.0), self.chi - 1.0 / 12.0, places=15)
        self.assertAlmostEqual(thm1_rhs(10.0), -1000.0 / 12.0 - math.log(10.0) / 8.0 + self.chi, places=12)
        self.assertAlmostEqual(thm1_rhs(1.0, chi=0.0), -1.0 / 12.0, places=15)
        with self.assertRaises(DomainError):
            thm1_rhs(0.0)

    def test_lemma2(self):
        n, alpha = 60, 0.5
        self.assertAlmostEqual(lemma2_rhs(n, alpha) * alpha - n * n * (1.0 - alpha) ** 2,
                               alpha ** 2 / (4.0 * (1.0 - alpha ** 2)), places=10)
        self.assertAlmostEqual(lemma2_rho(n, alpha), 60.0 * 0.5 ** 1.5, places=12)
        r, scaled = lemma2_remainder(n, alpha, lemma2_rhs(n, alpha) + 0.1)
        self.assertAlmostEqual(r, 0.1, places=10)
        self.assertAlmostEqual(scaled, 0.1 * 0.5 * lemma2_rho(n, alpha), places=10)
        with self.assertRaises(DomainError):
            lemma2_rhs(n, 1.0)

    def test_small_alpha_and_integrated_formulas(self):
        n, alpha = 5, 0.3
        difference = intd2_rhs(n, alpha) - dal0_rhs(n, alpha)
        expected = n * n * (-2.0 * alpha + alpha ** 2 / 2.0) - math.log(1.0 - alpha ** 2) / 8.0
        self.assertAlmostEqual(difference, expected, places=12)
        root = math.exp(-1.5)
        self.assertAlmostEqual(dal0_rhs(7, root), -math.log(3.5) / 12.0 + self.zeta, places=12)
        with self.assertRaises(DomainError):
            intd2_rhs(n, 1.2)

    def test_edge_bracket(self):
        for alpha in (0.5, 0.9, 0.95, 0.999):
            a = mpmath.mpf(alpha)
            exact = mpmath.mpf(3) / 2 + mpmath.log(a) - 2 * a + a * a / 2
            self.assertLessEqual(abs(_edge_bracket(alpha) - float(exact)), 1e-15 * abs(float(exact)), alpha)

    def test_integrated_identity_is_additive(self):
        n = 20
        whole = intd_rhs(n, 0.5, 0.1)
        parts = intd_rhs(n, 0.5, 0.3) + intd_rhs(n, 0.3, 0.1)
        self.assertAlmostEqual(whole, parts, delta=1e-12 * abs(whole))
        with self.assertRaises(DomainError):
            intd_rhs(n, 0.3, 0.5)

    def test_edge_limit(self):
        near = thm1_limit_check(4.0, 1e3)
        far = thm1_limit_check(4.0, 1e6)
        self.assertLess(abs(far), abs(near))
        self.assertLess(abs(far), 5e-3)

    def test_tail_formula(self):
        self.assertAlmostEqual(hm_tail(-2.0), 1.0 - 1.0 / 64.0, places=15)
        with self.assertRaises(DomainError):
            hm_tail(-0.5)

    def test_product_expansions(self):
        n = 50
        zeta = mpmath.zeta(-1, derivative=1)
        ln2, ln2pi = mpmath.log(2), mpmath.log(2 * mpmath.pi)
        exact_a = -n * n * ln2 + n * ln2pi - mpmath.log(n) / 4 + ln2 / 12 + 3 * zeta
        exact_c = -(mpmath.mpf(3) / 2 + 2 * ln2) * n * n + n * ln2pi - mpmath.log(n) / 6 + 2 * zeta
        for value, exact in ((aas_rhs(n), exact_a), (cas_rhs(n), exact_c)):
            mp_value = mpmath.mpf(value.hi) + mpmath.mpf(value.lo)
            self.assertLessEqual(float(abs(mp_value - exact)), 1e-24)

    def test_slope_fit(self):
        rows = [ResidualRow.build(s, 7.0 * s ** -1.5, 0.0) for s in (2.0, 4.0, 8.0, 16.0)]
        rows.append(ResidualRow.build(32.0, 1.0, 1.0))
        fit = slope_fit(rows)
        self.assertAlmostEqual(fit.slope, -1.5, delta=1e-10)
        self.assertAlmostEqual(fit.intercept, math.log(7.0), delta=1e-10)
        self.assertEqual(fit.used, 4)
        self.assertEqual(fit.excluded, 1)
        self.assertLess(fit.rms, 1e-12)
        with self.assertRaises(DomainError):
            slope_fit(rows[:1])

    def test_constant_fit(self):
        rows = []
        for s in (6.0, 7.0, 8.0, 9.0):
            computed = -s ** 3 / 12.0 - math.log(s) / 8.0 + 0.25 + 0.01 * s
            rows.append(ResidualRow.build(s, computed, thm1_rhs(s)))
        fit = constant_fit(rows)
        self.assertAlmostEqual(fit.slope, 0.01, delta=1e-9)
        self.assertAlmostEqual(fit.intercept, 0.25, delta=1e-9)

    def test_extrapolation(self):
        points = [0.1, 0.2, 0.3]
        values = [3.0 + 2.0 * x - x * x for x in points]
        self.assertAlmostEqual(extrapolate_to_zero(points, values), 3.0, places=12)
        with self.assertRaises(DomainError):
            extrapolate_to_zero([], [])

    def test_painleve_residual_table(self):
        rows = residual_table(SOURCE_PAINLEVE, [6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0])
        self.assertEqual([row.param for row in rows], [6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0])
        self.assertLessEqual(slope_fit(rows).slope, -1.2)
        fit = constant_fit(rows)
        self.assertLessEqual(abs(fit.slope), 1e-3)
        self.assertLessEqual(abs(fit.intercept - self.chi), 1e-3)
        with self.assertRaises(DomainError):
            residual_table('spline', [6.0])


class SchemaTests(SimpleTestCase):

    def test_residual_row_consistency(self):
        row = ResidualRow.build(2.0, 1.5, 1.25, rho=3.0)
        self.assertEqual(row.residual, 0.25)
        with self.assertRaises(ValidationError):
            ResidualRow(param=1.0, computed=1.0, rhs=0.0, residual=2.0)

    def test_probability_bounds(self):
        with self.assertRaises(ValidationError):
            TWPoint(x=0.0, log_cdf=0.5, cdf=math.exp(0.5))
        with self.assertRaises(ValidationError):
            GapDeterminant(s=0.0, log_det=0.1, node_count=20, est_error=0.0, precision='native')
