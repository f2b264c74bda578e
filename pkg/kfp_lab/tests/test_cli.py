"""kfp 관리 명령 테스트.

call_command로 출력과 종료 코드를 확인합니다.
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from kfp_lab import operators
from kfp_lab.management.commands.kfp import (
    EXIT_NO_INPUT,
    EXIT_TOLERANCE,
    EXIT_USAGE,
    EXIT_VALIDATION,
    Command,
)
from kfp_lab.perimeter import SWEEP_HEADER


def run_kfp(*args) -> str:
    stdout = io.StringIO()
    call_command('kfp', *args, stdout=stdout)
    return stdout.getvalue()


class OperatorCommandTest(SimpleTestCase):
    """operator 하위 명령 테스트."""

    def test_info_json(self):
        document = json.loads(run_kfp('operator', 'info', '--catalog', 'kramers'))
        self.assertEqual(set(document), {'metadata', 'result'})
        self.assertEqual(document['result']['dimensions']['regime'], 'crossing')
        self.assertEqual(document['metadata']['config']['operator'], 'kramers')

    def test_seed_accepts_hex(self):
        document = json.loads(run_kfp('operator', 'info', '--catalog', 'laplace:2', '--seed', '0xB5EED'))
        self.assertEqual(document['metadata']['config']['seed'], 0xB5EED)

    def test_operator_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'operator.json'
            path.write_text(json.dumps({'dim': 1, 'Q': [[1.0]], 'B': [[0.0]], 'name': 'line'}), encoding='utf-8')
            document = json.loads(run_kfp('operator', 'validate', '--operator', str(path)))
        self.assertTrue(document['result']['hypoelliptic'])
        self.assertEqual(document['result']['operator'], 'line')

    def test_writes_out_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            with override_settings(KFP_OUTPUT_DIR=Path(tmp)):
                output = run_kfp('operator', 'info', '--catalog', 'kolmogorov', '--out', 'info.json')
            target = Path(tmp) / 'info.json'
            self.assertIn(str(target), output)
            self.assertEqual(json.loads(target.read_text(encoding='utf-8'))['result']['dim'], 2)


class PerimeterCommandTest(SimpleTestCase):
    """perimeter, sweep 명령 테스트."""

    def test_csv_by_default(self):
        lines = run_kfp('perimeter', '--catalog', 'laplace:1', '--region', 'interval:0,1', '--s', '0.25',
                        '--method', 'exact').splitlines()
        self.assertTrue(lines[0].startswith('# config: '))
        self.assertTrue(lines[1].startswith('# generated: '))
        rows = list(csv.DictReader(lines[2:]))
        self.assertEqual(tuple(rows[0]), SWEEP_HEADER)
        self.assertEqual(float(rows[0]['s']), 0.25)

    def test_config_file_with_flag_override(self):
        """설정 파일 값보다 명령행 플래그가 우선합니다."""
        config = {'operator': 'laplace:1', 'samples': 500,
                  'params': {'region': 'interval:0,2', 's': 0.25, 'method': 'exact'}}
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'run.json'
            path.write_text(json.dumps(config), encoding='utf-8')
            lines = run_kfp('perimeter', '--config', str(path), '--s', '0.3').splitlines()
        used = json.loads(lines[0][len('# config: '):])
        self.assertEqual(used['samples'], 500)
        self.assertEqual(used['params']['s'], 0.3)
        row = next(csv.DictReader(lines[2:]))
        self.assertAlmostEqual(float(row['measure']), 2.0)

    def test_sweep_rows(self):
        lines = run_kfp('sweep', 'iso', '--catalog', 'laplace:1', '--region', 'interval:0,1', '--s', '0.25',
                        '--method', 'exact', '--lams', '0.5,1,2').splitlines()
        rows = list(csv.DictReader(lines[2:]))
        self.assertEqual([float(row['measure']) for row in rows], [0.5, 1.0, 2.0])

    def test_kolmogorov_ball_csv(self):
        lines = run_kfp('perimeter', '--catalog', 'kolmogorov', '--region', 'ball:1', '--s', '0.25',
                        '--samples', '2000').splitlines()
        row = next(csv.DictReader(lines[2:]))
        self.assertGreater(float(row['per_value']), 0.0)

    def test_sweep_weights_override(self):
        document = json.loads(run_kfp('sweep', 'iso', '--catalog', 'kolmogorov', '--region', 'ball:1', '--s', '0.25',
                                      '--samples', '1000', '--weights', '1,1', '--format', 'json'))
        self.assertFalse(document['result']['adapted'])
        self.assertEqual(document['metadata']['config']['params']['weights'], '1,1')


class DeterminismTest(SimpleTestCase):
    """같은 시드와 작업자 수의 재현성 테스트."""

    def test_semigroup_csv_body(self):
        args = ('semigroup', 'apply', '--catalog', 'kolmogorov', '--field', 'bump:1', '--t', '0.5',
                '--x', '0.1,0.2', '--samples', '4000', '--workers', '2', '--seed', '7', '--format', 'csv')
        first = run_kfp(*args).splitlines()
        second = run_kfp(*args).splitlines()
        self.assertEqual(first[0], second[0])
        self.assertEqual(first[2:], second[2:])

    def test_different_seed_changes_estimate(self):
        base = ('semigroup', 'apply', '--catalog', 'kolmogorov', '--field', 'bump:1', '--samples', '2000')
        first = json.loads(run_kfp(*base, '--seed', '1'))['result']['value']
        second = json.loads(run_kfp(*base, '--seed', '2'))['result']['value']
        self.assertNotEqual(first, second)


class ExitCodeTest(SimpleTestCase):
    """종료 코드 테스트."""

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            run_kfp(*args)
        self.assertEqual(ctx.exception.returncode, code)

    def test_validation_error(self):
        self.assertExitCode(EXIT_VALIDATION, 'perimeter', '--catalog', 'laplace:1', '--region', 'interval:0,1',
                            '--s', '0.7')

    def test_invalid_config_value(self):
        self.assertExitCode(EXIT_VALIDATION, 'operator', 'info', '--catalog', 'laplace', '--samples', '0')

    def test_missing_operator(self):
        self.assertExitCode(EXIT_VALIDATION, 'operator', 'info')

    def test_unknown_catalog(self):
        self.assertExitCode(EXIT_VALIDATION, 'operator', 'info', '--catalog', 'heisenberg')

    def test_missing_config_file(self):
        missing = os.path.join(tempfile.gettempdir(), 'kfp-missing-config.json')
        self.assertExitCode(EXIT_NO_INPUT, 'perimeter', '--config', missing)

    def test_missing_operator_file(self):
        missing = os.path.join(tempfile.gettempdir(), 'kfp-missing-operator.json')
        self.assertExitCode(EXIT_NO_INPUT, 'operator', 'info', '--operator', missing)

    def test_tampered_kernel_constant(self):
        """c_N을 1% 틀리게 하면 핵 질량 검사가 실패합니다."""
        original = operators.kernel_constant
        with mock.patch('kfp_lab.operators.kernel_constant', side_effect=lambda N: 1.01 * original(N)):
            self.assertExitCode(EXIT_TOLERANCE, 'verify', '--checks', 'kernel_mass_forward', '--workers', '2')

    def test_usage_error(self):
        """argparse 사용법 오류는 64로 끝납니다."""
        with mock.patch('sys.stderr', new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as ctx:
                Command().run_from_argv(['manage.py', 'kfp', 'perimeter', '--bogus'])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)

    def test_tolerance_exit_from_command_line(self):
        """명령 실행 중 실패는 64로 바뀌지 않습니다."""
        original = operators.kernel_constant
        with mock.patch('kfp_lab.operators.kernel_constant', side_effect=lambda N: 1.01 * original(N)), \
                mock.patch('sys.stderr', new_callable=io.StringIO), \
                mock.patch('sys.stdout', new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as ctx:
                Command().run_from_argv(['manage.py', 'kfp', 'verify', '--checks', 'kernel_mass_forward'])
        self.assertEqual(ctx.exception.code, EXIT_TOLERANCE)


class VerifyCommandTest(SimpleTestCase):
    """verify 명령 테스트."""

    def test_subset_passes(self):
        lines = run_kfp('verify', '--checks', 'covariance_golden,volume_laplace,dimensions_laplace').splitlines()
        rows = list(csv.DictReader(lines[2:]))
        self.assertEqual([row['name'] for row in rows], ['covariance_golden', 'volume_laplace', 'dimensions_laplace'])
        self.assertTrue(all(row['passed'] == 'True' for row in rows))

    def test_unknown_check(self):
        with self.assertRaises(CommandError) as ctx:
            run_kfp('verify', '--checks', 'no_such_check')
        self.assertEqual(ctx.exception.returncode, EXIT_VALIDATION)

    def test_json_format(self):
        document = json.loads(run_kfp('verify', '--checks', 'covariance_golden', '--format', 'json'))
        self.assertTrue(document['result']['passed'])
        self.assertEqual(document['result']['failures'], [])
