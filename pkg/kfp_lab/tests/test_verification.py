"""검증 모음 등록과 선택 테스트."""

from django.test import SimpleTestCase

from kfp_lab import verification
from kfp_lab.validators import ValidationError


class SelectTest(SimpleTestCase):
    """검사 선택 테스트."""

    def test_every_criterion_registered(self):
        criteria = {check.criterion for check in verification.REGISTRY.values()}
        self.assertEqual(criteria, set(range(1, 16)))

    def test_full_contains_core(self):
        core = {check.name for check in verification.select('core')}
        full = {check.name for check in verification.select('full')}
        self.assertLess(core, full)
        self.assertIn('coarea_kolmogorov', full - core)

    def test_names_keep_registry_order(self):
        checks = verification.select('core', 'volume_laplace, covariance_golden')
        self.assertEqual([check.name for check in checks], ['covariance_golden', 'volume_laplace'])

    def test_unknown_inputs(self):
        with self.assertRaises(ValidationError):
            verification.select('nightly')
        with self.assertRaises(ValidationError):
            verification.select('core', ['covariance_golden', 'missing'])


class RunSuiteTest(SimpleTestCase):
    """run_suite 테스트."""

    def test_report(self):
        report = verification.run_suite('core', seed=1, workers=1, names=['covariance_golden', 'dimensions_kramers'])
        self.assertTrue(report.passed)
        data = report.to_dict()
        self.assertEqual(data['count'], 2)
        self.assertEqual(data['failures'], [])
        self.assertEqual(tuple(report.to_rows()[0]), verification.REPORT_HEADER)

    def test_failure_is_recorded_not_raised(self):
        """검사 안의 예외는 실패 행으로 남습니다."""
        broken = verification.Check(name='broken', criterion=1, statement='',
                                    run=lambda ctx: 1 / 0)
        original = dict(verification.REGISTRY)
        verification.REGISTRY['broken'] = broken
        try:
            report = verification.run_suite('core', names=['broken'])
        finally:
            verification.REGISTRY.clear()
            verification.REGISTRY.update(original)
        self.assertFalse(report.passed)
        self.assertIn('ZeroDivisionError', report.results[0].detail)
