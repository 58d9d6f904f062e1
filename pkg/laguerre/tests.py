import math
from unittest import mock

import mpmath
import numpy as np
from django.test import SimpleTestCase

from edge.asymptotics import lemma2_remainder
from numerics.exceptions import DomainError
from numerics.extprec import dd_dot
from numerics.specfun import PRECISION_DD, exp_moments, gauss_legendre

from . import ensemble
from .ensemble import (
    ROUTE_GRAM, ROUTE_RECURRENCE, ROUTE_THETA, GramSystem, LaguerreBasis, cd_kernel, dlog_gap_cd, dlog_gap_rank1,
    dlog_gap_recurrence, dlog_routes, edge_gap, edge_scaled_gap, gap_log_det, gap_log_det_gram,
    gap_log_det_recurrence, gap_log_det_theta, orthonormal_on_interval, plancherel_rotach_check, wavefunction,
)
from .products import aas_residual, cas_residual, dint2_limit, exact_products, products_report

mpmath.mp.prec = 200


def one_point_log_gap(alpha):
    return math.log(-math.expm1(-4.0 * alpha))


def one_point_dlog(alpha):
    return 4.0 * math.exp(-4.0 * alpha) / -math.expm1(-4.0 * alpha)


class BasisTests(SimpleTestCase):

    def test_low_order_closed_forms(self):
        n, x = 5, 0.3
        basis = LaguerreBasis(n)
        scale = 2.0 * math.sqrt(n) * math.exp(-2.0 * n * x)
        self.assertAlmostEqual(wavefunction(basis, 0, x)[0] / scale, 1.0, places=14)
        self.assertAlmostEqual(wavefunction(basis, 1, x)[0] / scale, 1.0 - 4.0 * n * x, places=13)
        with self.assertRaises(DomainError):
            wavefunction(basis, 6, x)

    def test_orthonormal_on_half_line(self):
        n = 8
        basis = LaguerreBasis(n)
        rule = gauss_legendre(200, 0.0, 3.0)
        omega = basis.wavefunctions(rule.nodes)[0]
        gram = (omega * rule.weights) @ omega.T
        np.testing.assert_allclose(gram, np.eye(n + 1), rtol=0, atol=1e-10)
        self.assertTrue(np.all(basis.kappa_sign == [(-1.0) ** k for k in range(n + 1)]))
        exact = mpmath.log(2 * mpmath.sqrt(8) * mpmath.mpf(32) ** 3 / 6)
        self.assertAlmostEqual(basis.log_kappa[3], float(exact), places=13)

    def test_derivatives(self):
        n, h = 6, 1e-6
        basis = LaguerreBasis(n)
        for x in (0.05, 0.2, 0.9):
            plus = basis.wavefunctions([x + h])[0][:, 0]
            minus = basis.wavefunctions([x - h])[0][:, 0]
            derivative = basis.wavefunctions([x])[1][:, 0]
            np.testing.assert_allclose(derivative, (plus - minus) / (2.0 * h), rtol=0, atol=1e-6)
        at_zero = basis.wavefunctions([0.0])[1][:, 0]
        expected = [2.0 * math.sqrt(n) * 4.0 * n * (-k - 0.5) for k in range(n + 1)]
        np.testing.assert_allclose(at_zero, expected, rtol=1e-14)

    def test_christoffel_darboux(self):
        n = 6
        basis = LaguerreBasis(n)
        self.assertAlmostEqual(cd_kernel(basis, 0.2, 0.7), cd_kernel(basis, 0.7, 0.2), places=13)
        for x, y in ((0.2, 0.7), (0.4, 0.4)):
            omega = basis.wavefunctions([x, y], n - 1)[0]
            direct = float(omega[:, 0] @ omega[:, 1])
            self.assertAlmostEqual(cd_kernel(basis, x, y), direct, delta=1e-10 * max(1.0, abs(direct)))
        rule = gauss_legendre(200, 0.0, 3.0)
        trace = sum(w * cd_kernel(basis, x, x) for x, w in zip(rule.nodes, rule.weights))
        self.assertAlmostEqual(trace, n, delta=1e-8)


class GapRouteTests(SimpleTestCase):

    def test_single_point_ensemble(self):
        for alpha in (0.5, 1.0):
            exact = one_point_log_gap(alpha)
            self.assertAlmostEqual(gap_log_det_gram(1, alpha), exact, delta=1e-12)
            self.assertAlmostEqual(gap_log_det_theta(1, alpha), exact, delta=1e-13)
            self.assertAlmostEqual(gap_log_det_recurrence(1, alpha), exact, delta=1e-12)
        basis = orthonormal_on_interval(1, 0.5)
        self.assertAlmostEqual(float(basis.theta[0]), math.sqrt(4.0 / -math.expm1(-2.0)), places=13)

    def test_full_space_limit(self):
        self.assertLessEqual(abs(gap_log_det_gram(4, 50.0)), 1e-12)

    def test_gram_matches_theta(self):
        for n, alpha in ((2, 0.5), (4, 0.3), (6, 0.2), (6, 0.5), (6, 0.8)):
            theta = gap_log_det_theta(n, alpha)
            self.assertAlmostEqual(gap_log_det_gram(n, alpha), theta, delta=1e-10 * max(1.0, abs(theta)),
                                   msg=(n, alpha))

    def test_gram_node_doubling(self):
        coarse = gap_log_det_gram(6, 0.5)
        fine = gap_log_det_gram(6, 0.5, m_nodes=400)
        self.assertAlmostEqual(coarse, fine, delta=1e-10 * abs(coarse))
        with mock.patch.object(ensemble.logger, 'warning') as warning:
            gap_log_det_gram(8, 0.3)
            edge_scaled_gap(100, 2.0)
        warning.assert_not_called()

    def test_gram_node_doubling_warns(self):
        with mock.patch.object(ensemble, 'GRAM_DOUBLING_TOL', -1.0), \
                mock.patch.object(ensemble.logger, 'warning') as warning:
            value = gap_log_det_gram(4, 0.5)
        warning.assert_called_once()
        self.assertAlmostEqual(value, gap_log_det_theta(4, 0.5), delta=1e-10 * abs(value))

    def test_gram_eigenvalues_in_unit_interval(self):
        for n in (1, 4, 8):
            for alpha in (0.1, 0.5, 0.8):
                eigenvalues = np.linalg.svd(GramSystem(n, alpha).R, compute_uv=False) ** 2
                self.assertGreater(eigenvalues.min(), 0.0, (n, alpha))
                # the top eigenvalue may round to one
                self.assertLess(eigenvalues.max(), 1.0 + 1e-12, (n, alpha))

    def test_route_triangle(self):
        for n in range(1, 9):
            for alpha in (0.1, 0.3, 0.5, 0.8):
                with self.subTest(n=n, alpha=alpha):
                    theta = gap_log_det_theta(n, alpha)
                    self.assertAlmostEqual(gap_log_det_gram(n, alpha), theta, delta=1e-10 * max(1.0, abs(theta)))
                    rank1 = dlog_gap_rank1(n, alpha)
                    self.assertAlmostEqual(dlog_gap_cd(n, alpha), rank1, delta=1e-10 * max(1.0, abs(rank1)))

    def test_recurrence_matches_theta(self):
        theta = gap_log_det_theta(12, 0.5)
        self.assertAlmostEqual(gap_log_det_recurrence(12, 0.5), theta, delta=1e-9 * max(1.0, abs(theta)))

    def test_monotone_in_alpha(self):
        values = [gap_log_det_gram(5, alpha) for alpha in (0.2, 0.4, 0.6, 0.9)]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])), values)
        self.assertTrue(all(v < 0.0 for v in values))

    def test_orthonormality_on_interval(self):
        n, alpha = 6, 0.5
        basis = orthonormal_on_interval(n, alpha)
        moments = exp_moments(2 * n, 4.0 * n, alpha, PRECISION_DD)
        for j in range(n + 1):
            for k in range(n + 1):
                row = [dd_dot(basis.coeffs[j][:j + 1], moments[b:b + j + 1]) for b in range(k + 1)]
                inner = dd_dot(row, basis.coeffs[k][:k + 1])
                self.assertLessEqual(abs(float(inner - (1.0 if j == k else 0.0))), 1e-20, (j, k))

    def test_small_interval_limit(self):
        n, alpha = 3, 1e-3
        value = gap_log_det_theta(n, alpha) - n * n * math.log(alpha / 2.0)
        self.assertAlmostEqual(value, dint2_limit(n), delta=1e-2)

    def test_route_selection(self):
        self.assertEqual(gap_log_det(4, 0.5).route, ROUTE_THETA)
        self.assertEqual(gap_log_det(40, 0.5).route, ROUTE_RECURRENCE)
        self.assertEqual(gap_log_det(40, 1.2).route, ROUTE_GRAM)
        with self.assertRaises(DomainError):
            gap_log_det(4, 0.5, route='monte-carlo')

    def test_invalid_requests(self):
        with self.assertRaises(DomainError):
            gap_log_det_theta(17, 0.5)
        with self.assertRaises(DomainError):
            gap_log_det_gram(4, 0.5, m_nodes=50)
        with self.assertRaises(DomainError):
            gap_log_det_gram(4, 0.0)
        with self.assertRaises(DomainError):
            gap_log_det_recurrence(301, 0.5)
        with self.assertRaises(DomainError):
            gap_log_det_recurrence(100, 4.0)


class DerivativeTests(SimpleTestCase):

    def test_single_point_ensemble(self):
        exact = one_point_dlog(0.7)
        self.assertAlmostEqual(dlog_gap_cd(1, 0.7), exact, delta=1e-13 * exact)
        self.assertAlmostEqual(dlog_gap_rank1(1, 0.7), exact, delta=1e-12 * exact)
        self.assertAlmostEqual(dlog_gap_recurrence(1, 0.7), exact, delta=1e-12 * exact)

    def test_christoffel_darboux_matches_rank_one(self):
        cd = dlog_gap_cd(5, 0.4)
        self.assertAlmostEqual(dlog_gap_rank1(5, 0.4), cd, delta=1e-10 * max(1.0, abs(cd)))

    def test_finite_difference(self):
        h = 1e-5
        difference = (gap_log_det_gram(4, 0.5 + h) - gap_log_det_gram(4, 0.5 - h)) / (2.0 * h)
        self.assertAlmostEqual(dlog_gap_rank1(4, 0.5), difference, delta=1e-6)

    def test_recurrence_matches_rank_one(self):
        rank1 = dlog_gap_rank1(20, 0.7)
        self.assertAlmostEqual(dlog_gap_recurrence(20, 0.7), rank1, delta=1e-8 * rank1)

    def test_positive(self):
        for n, alpha in ((2, 0.1), (7, 0.6), (12, 0.6)):
            self.assertGreater(dlog_gap_rank1(n, alpha), 0.0)

    def test_routes_report(self):
        small = dlog_routes(5, 0.4)
        self.assertIsNotNone(small.cd)
        self.assertIsNone(small.recurrence)
        large = dlog_routes(20, 0.7)
        self.assertIsNone(large.cd)
        self.assertIsNotNone(large.recurrence)
        self.assertAlmostEqual(large.rho, 20 * 0.3 ** 1.5, places=12)
        _, scaled = lemma2_remainder(60, 0.5, dlog_gap_recurrence(60, 0.5))
        self.assertLess(scaled, 10.0)


class ProductsTests(SimpleTestCase):

    def test_small_cases(self):
        self.assertAlmostEqual(float(exact_products(1).ln_A_n), math.log(2.0), places=15)
        self.assertAlmostEqual(float(exact_products(2).ln_A_n), math.log(4.0 / 3.0), places=15)
        self.assertAlmostEqual(float(exact_products(1).ln_C_n), math.log(0.25), places=15)
        self.assertAlmostEqual(dint2_limit(1), math.log(8.0), places=14)

    def test_against_big_float(self):
        n = 7
        products = exact_products(n)
        fact = [mpmath.factorial(k) for k in range(2 * n)]
        ln_a = mpmath.log(mpmath.fprod(
            mpmath.mpf(2) ** (2 * k) * fact[k] ** 4 / fact[2 * k] ** 2 * 2 / (2 * k + 1) for k in range(n)
        ))
        ln_c = -n * n * mpmath.log(4 * n) + 2 * mpmath.fsum(mpmath.log(fact[k]) for k in range(n))
        for value, exact in ((products.ln_A_n, ln_a), (products.ln_C_n, ln_c)):
            self.assertLessEqual(float(abs(mpmath.mpf(value.hi) + mpmath.mpf(value.lo) - exact)), 1e-25)

    def test_large_n_expansions(self):
        a = [abs(aas_residual(n)) for n in (50, 200, 1000)]
        c = [abs(cas_residual(n)) for n in (50, 200, 1000)]
        self.assertTrue(a[0] > a[1] > a[2], a)
        self.assertTrue(c[0] > c[1] > c[2], c)
        self.assertLessEqual(max(a[2], c[2]), 1e-2)
        report = products_report(50)
        self.assertAlmostEqual(abs(report.aas_residual), a[0], places=15)

    def test_bounds(self):
        with self.assertRaises(DomainError):
            exact_products(0)
        with self.assertRaises(DomainError):
            exact_products(10001)


class EdgeTests(SimpleTestCase):

    def test_plancherel_rotach(self):
        self.assertLessEqual(plancherel_rotach_check(200, 0.0), 0.05)
        ratio = plancherel_rotach_check(50, 1.0) / plancherel_rotach_check(200, 1.0)
        self.assertTrue(1.5 <= ratio <= 4.5, ratio)
        self.assertGreater(plancherel_rotach_check(51, 0.0, signed=False), 0.5)
        with self.assertRaises(DomainError):
            plancherel_rotach_check(10, 0.0)
        with self.assertRaises(DomainError):
            plancherel_rotach_check(50, 3.5)

    def test_edge_gap_monotone(self):
        values = [edge_scaled_gap(100, s) for s in (1.0, 2.0, 3.0)]
        self.assertTrue(values[0] > values[1] > values[2], values)
        with self.assertRaises(DomainError):
            edge_scaled_gap(10, 8.0)

    def test_centered_edge_converges(self):
        coarse = edge_gap(50, 2.0, centered=True)
        fine = edge_gap(200, 2.0, centered=True)
        self.assertLess(fine.error, coarse.error)
        self.assertAlmostEqual(coarse.limit, fine.limit, places=15)
        self.assertTrue(fine.centered)
