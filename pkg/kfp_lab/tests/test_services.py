"""실험 설정, 결과 기록, 실행 서비스, 입력 직렬화 테스트."""

import json
import math
import tempfile
from datetime import datetime, timezone as dt_timezone
from pathlib import Path

from django.test import SimpleTestCase, override_settings
from rest_framework import serializers as drf_serializers

from kfp_lab.fields import BumpField, GaussianField, IndicatorField, LinearField
from kfp_lab.perimeter import SWEEP_HEADER
from kfp_lab.regions import Ball, Box
from kfp_lab.serializers import (
    ExperimentConfigSerializer,
    build_field,
    build_operator,
    build_region,
    parse_field,
    parse_region,
)
from kfp_lab.services import ExperimentConfig, ExperimentResult, ExperimentService, ResultWriter
from kfp_lab.validators import ValidationError

FIXED_CLOCK = lambda: datetime(2026, 1, 2, 3, 4, 5, tzinfo=dt_timezone.utc)  # noqa: E731


class ExperimentConfigTest(SimpleTestCase):
    """ExperimentConfig 테스트."""

    @override_settings(KFP_SEED=7, KFP_SAMPLES=123, KFP_WORKERS=3, KFP_TOLERANCE=0.5)
    def test_from_settings(self):
        """Django 설정의 기본값을 읽고 None이 아닌 값만 덮어씁니다."""
        config = ExperimentConfig.from_settings('perimeter', samples=99, workers=None)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.samples, 99)
        self.assertEqual(config.workers, 3)
        self.assertEqual(config.tol, 0.5)
        self.assertEqual(config.format, 'json')

    def test_to_dict_drops_empty_params(self):
        config = ExperimentConfig(task='perimeter', operator='laplace:1', params={'s': 0.25, 'region': None, 'a': 1})
        data = config.to_dict()
        self.assertEqual(list(data['params']), ['a', 's'])
        self.assertEqual(data['operator'], 'laplace:1')


class ResultWriterTest(SimpleTestCase):
    """ResultWriter 테스트."""

    def setUp(self):
        self.result = ExperimentResult(
            payload={'value': 0.1, 'nested': {'b': 2, 'a': 1}},
            rows=[{'sigma': 0.5, 'measure': 1.0, 'per_value': 2.0}],
            header=('sigma', 'measure', 'per_value'),
        )

    def _writer(self, **overrides):
        values = {'task': 'besov', 'action': 'coarea', 'operator': 'laplace:1', 'format': 'csv', 'seed': 1}
        values.update(overrides)
        return ResultWriter(ExperimentConfig(**values), clock=FIXED_CLOCK)

    def test_csv_header_lines(self):
        lines = self._writer().render(self.result).splitlines()
        self.assertTrue(lines[0].startswith('# config: '))
        config = json.loads(lines[0][len('# config: '):])
        self.assertEqual(config['task'], 'besov')
        self.assertEqual(config['seed'], 1)
        self.assertEqual(lines[1], '# generated: 2026-01-02T03:04:05Z')
        self.assertEqual(lines[2], 'sigma,measure,per_value')
        self.assertEqual(lines[3], '0.5,1.0,2.0')

    def test_csv_flattens_payload_without_rows(self):
        """행이 없으면 payload 한 행을 정렬된 열로 씁니다."""
        body = self._writer().body(ExperimentResult(payload={'value': 0.1, 'nested': {'b': 2, 'a': 1}}))
        header, row = body.splitlines()
        self.assertEqual(header, 'nested,value')
        self.assertIn('0.1', row)
        self.assertIn('""a"": 1', row)

    def test_json_document(self):
        document = json.loads(self._writer(format='json').render(self.result))
        self.assertEqual(set(document), {'metadata', 'result'})
        self.assertEqual(document['metadata']['package'], 'kfp_lab')
        self.assertEqual(document['metadata']['config']['operator'], 'laplace:1')
        self.assertEqual(document['result']['nested'], {'a': 1, 'b': 2})

    def test_body_excludes_timestamp(self):
        first = ResultWriter(self._writer().config, clock=FIXED_CLOCK).body(self.result)
        second = ResultWriter(self._writer().config).body(self.result)
        self.assertEqual(first, second)

    def test_write_to_stdout_when_no_out(self):
        self.assertIsNone(self._writer().write(self.result))

    def test_write_relative_path(self):
        """상대 경로는 KFP_OUTPUT_DIR 아래에 씁니다."""
        with tempfile.TemporaryDirectory() as tmp:
            with override_settings(KFP_OUTPUT_DIR=Path(tmp)):
                path = self._writer(out='runs/levels.csv').write(self.result)
            self.assertEqual(path, Path(tmp) / 'runs' / 'levels.csv')
            self.assertTrue(path.read_text(encoding='utf-8').startswith('# config: '))


class ExperimentServiceTest(SimpleTestCase):
    """ExperimentService 테스트."""

    def _run(self, **values):
        values.setdefault('samples', 2000)
        values.setdefault('workers', 2)
        values.setdefault('seed', 3)
        return ExperimentService(ExperimentConfig(**values)).run()

    def test_operator_info(self):
        payload = self._run(task='operator', action='info', operator='kramers').payload
        self.assertEqual(payload['dimensions']['regime'], 'crossing')
        self.assertEqual(payload['kalman_rank'], 2)
        self.assertTrue(payload['hypoelliptic'])

    def test_operator_validate_rejects_degenerate(self):
        operator = {'dim': 2, 'Q': [[1.0, 0.0], [0.0, 0.0]], 'B': [[0.0, 0.0], [0.0, 0.0]]}
        with self.assertRaises(ValidationError):
            self._run(task='operator', action='validate', operator=operator)

    def test_unknown_action(self):
        with self.assertRaises(ValidationError):
            self._run(task='kernel', action='mass', operator='laplace:1')

    def test_kernel_eval(self):
        payload = self._run(task='kernel', action='eval', operator='laplace:1', params={'t': 1.0}).payload
        self.assertAlmostEqual(payload['density'], 1.0 / math.sqrt(4.0 * math.pi), places=12)
        self.assertNotIn('forward_mass', payload)

    def test_semigroup_apply_reports_closed_form(self):
        payload = self._run(task='semigroup', action='apply', operator='kolmogorov',
                            params={'field': 'gaussian', 't': 0.5, 'x': '0.1,0.2'}).payload
        self.assertIn('closed_form', payload)
        self.assertLess(abs(payload['value'] - payload['closed_form']), 5.0 * payload['std_error'] + 1e-12)

    def test_perimeter_exact(self):
        result = self._run(task='perimeter', operator='laplace:1',
                           params={'region': 'interval:0,1', 's': 0.25, 'method': 'exact'})
        self.assertEqual(tuple(result.header), tuple(SWEEP_HEADER))
        self.assertEqual(len(result.rows), 1)
        self.assertGreater(result.payload['per_value'], 0.0)
        self.assertTrue(math.isfinite(result.payload['ratio']))
        self.assertTrue(result.payload['interpolation']['holds'])

    def test_missing_order(self):
        with self.assertRaises(ValidationError):
            self._run(task='perimeter', operator='laplace:1', params={'region': 'interval:0,1'})

    def test_verify_subset(self):
        result = self._run(task='verify', params={'checks': 'covariance_golden,volume_laplace'})
        self.assertFalse(result.failed)
        self.assertEqual(result.payload['count'], 2)
        self.assertEqual([row['name'] for row in result.rows], ['covariance_golden', 'volume_laplace'])


class ParseShorthandTest(SimpleTestCase):
    """명령행 짧은 표기 테스트."""

    def test_regions(self):
        self.assertEqual(parse_region('ball:2'), {'shape': 'ball', 'radius': 2.0})
        self.assertEqual(parse_region('box:0.5'), {'shape': 'box', 'half_width': 0.5})
        self.assertEqual(parse_region('box:0,0:1,2'), {'shape': 'box', 'lo': [0.0, 0.0], 'hi': [1.0, 2.0]})
        self.assertEqual(parse_region('interval:-1,1'), {'shape': 'interval', 'lo': [-1.0], 'hi': [1.0]})

    def test_fields(self):
        self.assertEqual(parse_field('gaussian:0.5'), {'kind': 'gaussian', 'sigma': 0.5})
        self.assertEqual(parse_field('bump:2:4'), {'kind': 'bump', 'radius': 2.0, 'order': 4})
        self.assertEqual(parse_field('constant'), {'kind': 'constant', 'value': 1.0})
        self.assertEqual(parse_field('linear:1,2'), {'kind': 'linear', 'coeffs': [1.0, 2.0]})
        self.assertEqual(parse_field('indicator:box:1'), {'kind': 'indicator', 'region': 'box:1'})

    def test_unknown_shorthand(self):
        with self.assertRaises(drf_serializers.ValidationError):
            parse_region('torus:1')
        with self.assertRaises(drf_serializers.ValidationError):
            parse_field('wavelet')
        with self.assertRaises(drf_serializers.ValidationError):
            parse_region('interval:1')


class BuildInputTest(SimpleTestCase):
    """직렬화기를 거친 도메인 객체 생성 테스트."""

    def test_operator_from_catalog_and_matrices(self):
        self.assertEqual(build_operator('laplace:3').dim, 3)
        spec = build_operator({'dim': 1, 'Q': [[2.0]], 'B': [[0.0]], 'name': 'scaled'})
        self.assertEqual(spec.name, 'scaled')
        self.assertEqual(float(spec.Q[0, 0]), 2.0)

    def test_operator_errors(self):
        for data in ('nonexistent', {'dim': 2, 'Q': [[1.0, 0.0], [0.0, 1.0]]},
                     {'dim': 2, 'Q': [[1.0, 2.0], [0.0, 1.0]], 'B': [[0.0, 0.0], [0.0, 0.0]]}):
            with self.subTest(data=data):
                with self.assertRaises(ValidationError):
                    build_operator(data)

    def test_missing_operator_file(self):
        with self.assertRaises(OSError):
            build_operator('/nonexistent/operator.json')

    def test_regions(self):
        self.assertIsInstance(build_region('ball:1', 2), Ball)
        box = build_region('box:0.5', 2)
        self.assertIsInstance(box, Box)
        self.assertAlmostEqual(box.measure, 1.0)
        self.assertAlmostEqual(build_region('interval:0,3', 1).measure, 3.0)

    def test_region_errors(self):
        with self.assertRaises(ValidationError):
            build_region('interval:0,1', 2)
        with self.assertRaises(ValidationError):
            build_region({'shape': 'box', 'lo': [0.0], 'hi': [1.0]}, 2)
        with self.assertRaises(ValidationError):
            build_region({'shape': 'ball', 'radius': -1.0}, 2)

    def test_fields(self):
        self.assertIsInstance(build_field('gaussian:0.5', 2), GaussianField)
        self.assertIsInstance(build_field('bump', 1), BumpField)
        self.assertIsInstance(build_field('constant:2', 3), LinearField)
        indicator = build_field({'kind': 'indicator', 'region': 'box:0.5'}, 2)
        self.assertIsInstance(indicator, IndicatorField)
        self.assertAlmostEqual(indicator.l1_norm, 1.0)

    def test_field_errors(self):
        with self.assertRaises(ValidationError):
            build_field('linear:1,2', 3)
        with self.assertRaises(ValidationError):
            build_field('bump:1:1', 1)
        with self.assertRaises(ValidationError):
            build_field({'kind': 'gaussian', 'covariance': [[1.0, 0.0], [0.0, -1.0]]}, 2)


class ExperimentConfigSerializerTest(SimpleTestCase):
    """ExperimentConfigSerializer 테스트."""

    def _data(self, **overrides):
        data = {'task': 'perimeter', 'operator': 'laplace:1', 'seed': 1, 'samples': 100, 'workers': 1,
                'tol': 0.01}
        data.update(overrides)
        return data

    def test_valid(self):
        serializer = ExperimentConfigSerializer(data=self._data(params={'s': 0.25}))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['format'], 'json')

    def test_operator_required_except_verify(self):
        serializer = ExperimentConfigSerializer(data=self._data(operator=None))
        self.assertFalse(serializer.is_valid())
        self.assertIn('operator', serializer.errors)
        serializer = ExperimentConfigSerializer(data=self._data(task='verify', operator=None))
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_invalid_values(self):
        for key, value in (('task', 'plot'), ('samples', 0), ('workers', 0), ('format', 'xml'), ('seed', -1)):
            with self.subTest(key=key):
                serializer = ExperimentConfigSerializer(data=self._data(**{key: value}))
                self.assertFalse(serializer.is_valid())
                self.assertIn(key, serializer.errors)
