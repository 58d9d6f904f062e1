import json
import math
import os
import tempfile
from io import StringIO
from unittest import mock

from django.core.management import CommandError, call_command
from django.conf import settings
from django.test import SimpleTestCase

from edge.painleve import tw_log_cdf

from .acceptance import (
    CROSS_ORACLE_S, EDGE_RATIO_RANGE, EXPANSION_ALPHA_QUICK, EXPANSION_N, CriterionResult, VerificationReport,
    cross_oracle_determinant, derivative_expansion, edge_universality, identity_web, integrated_formula,
    large_gap_constant, product_asymptotics, small_alpha_constant,
)
from .base import DOMAIN_EXIT, USAGE_EXIT, VERIFY_EXIT
from .renderers import format_float, render_csv, render_record, render_table
from .serializers import GapConfigSerializer, LaguerreConfigSerializer, TWConfigSerializer
from .sweeps import parse_grid, run_sweep, tw_solution
from .tasks import laguerre_gap_task


def run(*args, **options):
    stdout = StringIO()
    call_command(*args, stdout=stdout, stderr=StringIO(), verbosity=0, **options)
    return stdout.getvalue()


class GridTests(SimpleTestCase):

    def test_inclusive_upper_end(self):
        self.assertEqual(parse_grid('0:1:0.25').points, [0.0, 0.25, 0.5, 0.75, 1.0])
        self.assertEqual(len(parse_grid('0:1.1:0.25').points), 5)
        self.assertEqual(len(parse_grid('0:1.2:0.25').points), 6)
        self.assertEqual(parse_grid('2:2:1').points, [2.0])

    def test_invalid(self):
        for text in ('0:1', '1:0:0.1', '0:1:0', '0:1:-1', 'a:1:0.1', '0:inf:1', '0:1:nan'):
            with self.subTest(text=text), self.assertRaises(ValueError):
                parse_grid(text)


class SerializerTests(SimpleTestCase):

    def test_defaults_and_echo(self):
        serializer = GapConfigSerializer(data={'s': '2', 'threads': '3'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['nodes'], 80)
        self.assertEqual(serializer.validated_data['format'], 'json')
        echo = serializer.echo()
        self.assertNotIn('threads', echo)
        self.assertEqual(echo['s'], 2.0)
        self.assertEqual(echo['precision'], 'native')

    def test_grid_echoed_as_text(self):
        serializer = TWConfigSerializer(data={'x_grid': '-2:0:0.5'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['format'], 'csv')
        self.assertEqual(serializer.echo()['x_grid'], '-2:0:0.5')

    def test_rejects_non_finite(self):
        for value in ('nan', 'inf', 'abc'):
            with self.subTest(value=value):
                self.assertFalse(GapConfigSerializer(data={'s': value}).is_valid())

    def test_laguerre_cross_field_rules(self):
        self.assertFalse(LaguerreConfigSerializer(data={'n': '3'}).is_valid())
        self.assertFalse(LaguerreConfigSerializer(data={'n': '3', 'alpha': '0.5', 'alpha_grid': '0.1:0.5:0.1'}).is_valid())
        self.assertFalse(LaguerreConfigSerializer(data={'n': '3', 'alpha': '0'}).is_valid())
        self.assertFalse(LaguerreConfigSerializer(data={'n': '3', 'action': 'edge'}).is_valid())
        self.assertTrue(LaguerreConfigSerializer(data={'n': '3', 'action': 'exact'}).is_valid())


class RendererTests(SimpleTestCase):

    def test_seventeen_digits(self):
        self.assertEqual(format_float(1.0), '1.0000000000000000e+00')
        self.assertEqual(float(format_float(0.1)), 0.1)
        self.assertEqual(float(format_float(-math.pi)), -math.pi)

    def test_csv_layout(self):
        text = render_csv(['x', 'label', 'flag', 'missing'], [{'x': 0.5, 'label': 'dd', 'flag': True}])
        self.assertEqual(text, 'x,label,flag,missing\n5.0000000000000000e-01,dd,true,\n')

    def test_json_config_last(self):
        payload = json.loads(render_record({'b': 1.5, 'a': 2}, 'json', {'s': 1.0}))
        self.assertEqual(list(payload), ['b', 'a', 'config'])
        self.assertEqual(payload['config'], {'s': 1.0})

    def test_table_summaries(self):
        rows = [{'s': 1.0, 'r': 0.25}]
        text = render_table(['s', 'r'], rows, 'csv', {}, {'fit': {'slope': -3.0}, 'skipped': None})
        self.assertEqual(text.splitlines()[-1], '# fit {"slope":-3.0}')
        payload = json.loads(render_table(['s', 'r'], rows, 'json', {'k': 1}, {'fit': None}))
        self.assertEqual(list(payload), ['rows', 'fit', 'config'])
        self.assertIsNone(payload['fit'])


class SweepTests(SimpleTestCase):

    def test_order_independent_of_threads(self):
        points = [(3, alpha, 'theta', None) for alpha in (0.7, 0.2, 0.5, 0.9, 0.1)]
        serial = run_sweep(laguerre_gap_task, points, 1)
        threaded = run_sweep(laguerre_gap_task, points, 4)
        self.assertEqual(serial, threaded)
        self.assertEqual([row['alpha'] for row in serial], [0.7, 0.2, 0.5, 0.9, 0.1])


class CommandTests(SimpleTestCase):

    def test_constants(self):
        payload = json.loads(run('constants'))
        self.assertEqual(payload['method'], 'zeta2-euler-maclaurin')
        self.assertAlmostEqual(payload['zeta_prime_minus1'], -0.16542114370045092, places=15)
        self.assertAlmostEqual(payload['chi'] - payload['zeta_prime_minus1'], math.log(2.0) / 24.0, places=15)
        self.assertEqual(payload['config'], {'format': 'json'})

    def test_gap_matches_painleve(self):
        payload = json.loads(run('gap', s='0', nodes='80'))
        self.assertEqual(list(payload), ['s', 'log_det', 'est_error', 'nodes', 'precision', 'config'])
        self.assertLessEqual(abs(payload['log_det'] - tw_log_cdf(tw_solution(), 0.0).log_cdf), 1e-8)

    def test_tw_deterministic_across_threads(self):
        serial = run('tw', x_grid='-2:0:0.5', threads='1')
        threaded = run('tw', x_grid='-2:0:0.5', threads='3')
        self.assertEqual(serial, threaded)
        lines = serial.split('\n')
        self.assertEqual(lines[0], 'x,log_cdf,cdf')
        self.assertEqual(len(lines), 7)
        self.assertEqual(lines[-1], '')

    def test_residual_with_fits(self):
        text = run('residual', s_grid='6:9:1')
        lines = text.splitlines()
        self.assertEqual(lines[0], 'param,computed,rhs,residual')
        self.assertEqual(len(lines), 7)
        self.assertTrue(lines[5].startswith('# fit {'))
        constant = json.loads(lines[6][len('# constant_fit '):])
        self.assertLessEqual(abs(constant['slope']), 1e-2)

    def test_laguerre_actions(self):
        exact = json.loads(run('laguerre', 'exact', n='3'))
        self.assertAlmostEqual(exact['dint2_limit'], exact['ln_A_n'] - exact['ln_C_n'], places=12)
        table = run('laguerre', 'gap', n='4', alpha_grid='0.2:0.8:0.2', route='theta', format='csv')
        self.assertEqual(table.splitlines()[0], 'n,alpha,log_det,route')
        self.assertEqual(len(table.splitlines()), 5)
        derivative = json.loads(run('laguerre', 'ddlog', n='4', alpha='0.5'))
        self.assertLessEqual(abs(derivative['cd'] - derivative['rank1']), 1e-10 * max(1.0, abs(derivative['rank1'])))

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'constants.csv')
            self.assertEqual(run('constants', format='csv', output=path), '')
            with open(path, encoding='utf-8', newline='') as handle:
                content = handle.read()
        self.assertTrue(content.startswith('zeta_prime_minus1,chi,method\n'))
        self.assertNotIn('\r', content)

    def test_usage_errors(self):
        cases = [
            (('gap',), {}),
            (('gap',), {'s': 'abc'}),
            (('gap',), {'s': '1', 'nodes': '5'}),
            (('tw',), {'x_grid': '1:0:1'}),
            (('residual',), {'s_grid': '0:2:1'}),
            (('laguerre', 'bogus'), {'n': '3'}),
            (('constants',), {'format': 'xml'}),
            (('gap', '--bogus'), {}),
        ]
        for args, options in cases:
            with self.subTest(args=args, options=options):
                with self.assertRaises(CommandError) as raised:
                    run(*args, **options)
                self.assertEqual(raised.exception.returncode, USAGE_EXIT)

    def test_domain_errors(self):
        for args, options in ((('gap',), {'s': '-30'}), (('laguerre', 'gap'), {'n': '20', 'alpha': '0.5', 'route': 'theta'})):
            with self.subTest(args=args), self.assertRaises(CommandError) as raised:
                run(*args, **options)
            self.assertEqual(raised.exception.returncode, DOMAIN_EXIT)

    def test_threads_from_settings(self):
        with self.settings(TRACY={**settings.TRACY, 'THREADS': 2}):
            serializer = TWConfigSerializer(data={'x_grid': '0:1:1'})
            self.assertTrue(serializer.is_valid())
            self.assertEqual(serializer.validated_data['threads'], 2)


class AcceptanceTests(SimpleTestCase):

    def test_large_gap_constant(self):
        result = large_gap_constant()
        self.assertTrue(result.passed, result.measured)
        self.assertLessEqual(result.measured['residual_slope'], -1.2)

    def test_tampered_chi_fails(self):
        result = large_gap_constant(chi_offset=1e-2)
        self.assertFalse(result.passed)
        self.assertAlmostEqual(result.measured['c_minus_chi'], -1e-2, delta=1e-3)

    def test_identity_web(self):
        result = identity_web([1, 3], [0.3, 0.7])
        self.assertTrue(result.passed, result.measured)
        self.assertEqual(len(result.rows), 4)

    def test_cross_oracle_determinant(self):
        result = cross_oracle_determinant()
        self.assertTrue(result.passed, result.measured)
        self.assertEqual([row['s'] for row in result.rows], CROSS_ORACLE_S)
        self.assertLessEqual(result.measured['max_difference'], 1e-8)

    def test_derivative_expansion(self):
        result = derivative_expansion(EXPANSION_ALPHA_QUICK)
        self.assertTrue(result.passed, result.rows)
        self.assertTrue(result.measured['non_growing'])
        self.assertEqual(len(result.rows), len(EXPANSION_ALPHA_QUICK) * len(EXPANSION_N))

    def test_growing_remainder_fails(self):
        def remainder(n, alpha, computed):
            return 0.0, 1e-3 * (1.0 + n / 1200.0)

        with mock.patch('console.acceptance.dlog_gap_recurrence', return_value=0.0), \
                mock.patch('console.acceptance.lemma2_remainder', side_effect=remainder):
            result = derivative_expansion([0.5])
        self.assertFalse(result.passed)
        self.assertFalse(result.measured['non_growing'])

    def test_integrated_formula(self):
        result = integrated_formula()
        self.assertTrue(result.passed, result.measured)

    def test_edge_universality(self):
        result = edge_universality()
        self.assertTrue(result.passed, result.measured)
        low, high = EDGE_RATIO_RANGE
        for ratio in result.measured['error_ratios']:
            self.assertTrue(low <= ratio <= high, ratio)
        for row in result.rows:
            self.assertAlmostEqual(row['alpha'], 1.0 - row['s'] / (2.0 * row['n']) ** (2.0 / 3.0), places=15)
            self.assertIn('centered_error', row)

    def test_product_asymptotics(self):
        result = product_asymptotics()
        self.assertTrue(result.passed, result.measured)

    def test_small_alpha_constant(self):
        result = small_alpha_constant()
        self.assertTrue(result.passed, result.rows)

    def test_failed_report_still_emitted(self):
        report = VerificationReport(suite='quick', passed=False, criteria=[
            CriterionResult(name='large_gap_constant', passed=False, measured={'c_minus_chi': -1e-2}, thresholds={'abs_c_minus_chi': 1e-3}),
        ])
        stdout = StringIO()
        with mock.patch('console.management.commands.verify.run_suite', return_value=report):
            with self.assertRaises(CommandError) as raised:
                call_command('verify', chi_offset='1e-2', stdout=stdout, stderr=StringIO(), verbosity=0)
        self.assertEqual(raised.exception.returncode, VERIFY_EXIT)
        payload = json.loads(stdout.getvalue())
        self.assertFalse(payload['passed'])
        self.assertEqual(payload['config'], {'format': 'json', 'suite': 'quick', 'chi_offset': 0.01})
