"""베소프 반노름, 여면적 공식, 층 케이크, 소볼레프 매장 테스트."""

import math

import numpy as np
from django.test import SimpleTestCase

from kfp_lab import besov
from kfp_lab.fields import GaussianField, LinearField, constant
from kfp_lab.operators import catalog
from kfp_lab.regions import interval
from kfp_lab.validators import DomainError, PreconditionError, RangeError

from .factories import BumpFieldFactory, GaussianFieldFactory

Z_LIMIT = 5.0


class SeminormTest(SimpleTestCase):
    """𝒩_{α,1} 추정 테스트."""

    def test_matches_explicit_kernel(self):
        """1차원 라플라시안에서 명시적 핵의 이중 적분과 일치합니다."""
        f = GaussianField([0.0], [[1.0]])
        estimate = besov.besov_seminorm(catalog('laplace', 1), f, 0.5, n=20000, seed=3, workers=2)
        oracle = besov.gagliardo_oracle(f, 0.5)
        tolerance = max(0.02, 4.0 * estimate.std_error / oracle)
        self.assertLess(abs(estimate.value - oracle) / oracle, tolerance)

    def test_constant_field_is_zero(self):
        estimate = besov.besov_seminorm(catalog('laplace', 2), constant(2, 3.0), 0.5, n=100)
        self.assertEqual(estimate.value, 0.0)
        self.assertEqual(estimate.std_error, 0.0)

    def test_order_out_of_range(self):
        f = GaussianFieldFactory(dim=1)
        for alpha in (0.0, 1.0, 1.5):
            with self.subTest(alpha=alpha):
                with self.assertRaises(RangeError):
                    besov.besov_seminorm(catalog('laplace', 1), f, alpha, n=100)

    def test_only_p_one(self):
        with self.assertRaises(DomainError):
            besov.besov_seminorm(catalog('laplace', 1), GaussianFieldFactory(dim=1), 0.5, p=2, n=100)

    def test_contracting_drift_rejected(self):
        with self.assertRaises(PreconditionError):
            besov.besov_seminorm(catalog('ornstein_uhlenbeck', 1), GaussianFieldFactory(dim=1), 0.5, n=100)

    def test_deterministic_for_seed(self):
        spec = catalog('kolmogorov', 1)
        f = GaussianFieldFactory(dim=2)
        first = besov.besov_seminorm(spec, f, 0.5, n=2000, seed=11, workers=2)
        second = besov.besov_seminorm(spec, f, 0.5, n=2000, seed=11, workers=2)
        self.assertEqual(first.value, second.value)

    def test_norm_adds_l1(self):
        """‖f‖_B = ‖f‖₁ + 𝒩 이므로 반노름보다 큽니다."""
        spec = catalog('laplace', 1)
        f = GaussianField([0.0], [[1.0]])
        norm = besov.besov_norm(spec, f, 0.25, n=4000, seed=2)
        seminorm = besov.besov_seminorm(spec, f, 0.5, n=4000, seed=2)
        self.assertGreater(norm.value, seminorm.value)
        self.assertLess(abs(norm.value - seminorm.value - math.sqrt(2.0 * math.pi)), 0.1)

    def test_oracle_requires_one_dimensional_gaussian(self):
        with self.assertRaises(PreconditionError):
            besov.gagliardo_oracle(GaussianFieldFactory(dim=2), 0.5)
        with self.assertRaises(PreconditionError):
            besov.gagliardo_oracle(BumpFieldFactory(dim=1), 0.5)


class IndicatorConsistencyTest(SimpleTestCase):
    """지시함수의 반노름과 분수 둘레의 일치 테스트."""

    def test_interval(self):
        report = besov.indicator_consistency(catalog('laplace', 1), interval(0.0, 1.0), 0.25,
                                             n=10000, seed=5, workers=2)
        self.assertLess(report.z, Z_LIMIT)
        self.assertEqual(set(report.to_dict()), {'besov', 'besov_err', 'perimeter', 'perimeter_err', 'z', 'ok'})


class LevelSetProfileTest(SimpleTestCase):
    """등위 집합 프로파일 테스트."""

    def test_only_gaussian_or_bump(self):
        with self.assertRaises(PreconditionError):
            besov.LevelSetProfile(LinearField([1.0]))

    def test_positive_amplitude(self):
        with self.assertRaises(DomainError):
            besov.LevelSetProfile(GaussianField([0.0], [[1.0]], amplitude=-1.0))

    def test_gaussian_level_measure(self):
        """e^{−x²/2} > e^{−1/2} 이면 |x| < 1."""
        profile = besov.LevelSetProfile(GaussianField([0.0], [[1.0]]))
        self.assertAlmostEqual(profile.measure(math.exp(-0.5)), 2.0, places=10)
        self.assertIsNone(profile.level_region(1.0))
        self.assertEqual(profile.measure(2.0), 0.0)

    def test_bump_level_measure(self):
        """(1 − x²)³ > σ 이면 |x| < √(1 − σ^{1/3})."""
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1))
        sigma = 0.125
        self.assertAlmostEqual(profile.measure(sigma), 2.0 * math.sqrt(0.5), places=10)
        self.assertAlmostEqual(profile.measure(0.0), 2.0, places=10)

    def test_lq_norms(self):
        gaussian = besov.LevelSetProfile(GaussianField([0.0], [[1.0]]))
        self.assertAlmostEqual(gaussian.lq_norm(1.0), math.sqrt(2.0 * math.pi), places=6)
        self.assertAlmostEqual(gaussian.lq_norm(2.0), math.pi ** 0.25, places=6)
        bump = besov.LevelSetProfile(BumpFieldFactory(dim=1))
        self.assertAlmostEqual(bump.lq_norm(1.0), 32.0 / 35.0, places=6)

    def test_threshold(self):
        """|E_σ| = 1 이 되는 σ."""
        line = besov.LevelSetProfile(GaussianField([0.0], [[1.0]]))
        self.assertAlmostEqual(line.threshold(), math.exp(-0.125), places=8)
        plane = besov.LevelSetProfile(GaussianFieldFactory(dim=2))
        self.assertAlmostEqual(plane.threshold(), math.exp(-1.0 / (2.0 * math.pi)), places=8)

    def test_threshold_zero_for_small_support(self):
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1, radius=0.25))
        self.assertEqual(profile.threshold(), 0.0)

    def test_level_nodes(self):
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1, amplitude=2.0))
        sigmas, weights = besov.level_nodes(profile, 12)
        self.assertTrue(np.all((sigmas > 0.0) & (sigmas < 2.0)))
        self.assertAlmostEqual(float(weights.sum()), 2.0, places=10)
        self.assertAlmostEqual(float(weights @ sigmas), 2.0, places=10)
        with self.assertRaises(DomainError):
            besov.level_nodes(profile, 1)

    def test_lq_norm_monte_carlo(self):
        f = GaussianField([0.0], [[1.0]])
        mc = besov.lq_norm_mc(f, 2.0, n=20000, seed=4, workers=2)
        exact = besov.LevelSetProfile(f).lq_norm(2.0)
        self.assertLess(abs(mc.value - exact), Z_LIMIT * mc.std_error + 1e-12)


class CoareaTest(SimpleTestCase):
    """여면적 공식 테스트."""

    def test_laplace_bump(self):
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1))
        report = besov.coarea_residual(catalog('laplace', 1), profile, 0.25, n_levels=12, n=4000,
                                       seed=6, workers=2)
        self.assertLessEqual(report.residual, 0.05)
        rows = report.level_rows()
        self.assertEqual(len(rows), 12)
        self.assertEqual(set(rows[0]), set(besov.LEVEL_HEADER))
        measures = [row['measure'] for row in sorted(rows, key=lambda row: row['sigma'])]
        self.assertEqual(measures, sorted(measures, reverse=True))

    def test_order_range(self):
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1))
        with self.assertRaises(RangeError):
            besov.coarea_residual(catalog('laplace', 1), profile, 0.5, n_levels=4, n=100)

    def test_dimension_mismatch(self):
        profile = besov.LevelSetProfile(BumpFieldFactory(dim=1))
        with self.assertRaises(DomainError):
            besov.coarea_residual(catalog('laplace', 2), profile, 0.25, n_levels=4, n=100)


class LayerCakeTest(SimpleTestCase):
    """층 케이크 부등식 테스트."""

    def test_exponential(self):
        for D, s in ((1.0, 0.25), (4.0, 0.1), (3.0, 0.45)):
            with self.subTest(D=D, s=s):
                report = besov.layercake_check(lambda t: math.exp(-t), D, s)
                self.assertTrue(report.ok)
                self.assertGreater(report.lhs, 0.0)

    def test_step_function(self):
        report = besov.layercake_check(lambda t: 1.0 if t < 1.0 else 0.5, 2.0, 0.25, support=2.0,
                                       breakpoints=(1.0,))
        self.assertTrue(report.ok)

    def test_equality_for_indicator(self):
        """G = 1_[0,1)이면 양변이 같습니다."""
        report = besov.layercake_check(lambda t: 1.0 if t < 1.0 else 0.0, 3.0, 0.25, support=1.0)
        self.assertAlmostEqual(report.lhs, report.rhs, places=8)

    def test_increasing_rejected(self):
        with self.assertRaises(PreconditionError):
            besov.layercake_check(lambda t: t, 2.0, 0.25, support=1.0)

    def test_dimension_too_small(self):
        with self.assertRaises(DomainError):
            besov.layercake_check(lambda t: math.exp(-t), 0.5, 0.25)


class SobolevTest(SimpleTestCase):
    """강한 소볼레프 매장 테스트."""

    def test_single_regime(self):
        report = besov.sobolev_ratio(catalog('laplace', 1), GaussianField([0.0], [[1.0]]), 0.25,
                                     n=10000, seed=8, workers=2)
        self.assertEqual(report.regime, 'single')
        self.assertTrue(report.ok)
        self.assertIsNone(report.parts)
        self.assertGreater(report.constant, 0.0)

    def test_two_regimes(self):
        """D₀ > D∞ 이면 σ_f에서 나눈 두 노름의 합을 씁니다."""
        report = besov.sobolev_ratio(catalog('kramers'), GaussianFieldFactory(dim=2), 0.25,
                                     n=4000, seed=9, workers=2)
        self.assertEqual(report.regime, 'two-regime')
        self.assertAlmostEqual(report.threshold, math.exp(-1.0 / (2.0 * math.pi)), places=6)
        first, second = report.parts
        self.assertGreater(first, 0.0)
        self.assertGreater(second, 0.0)
        self.assertAlmostEqual(report.lhs.value, first + second)

    def test_order_range(self):
        with self.assertRaises(RangeError):
            besov.sobolev_ratio(catalog('laplace', 1), GaussianField([0.0], [[1.0]]), 0.6, n=100)

    def test_profile_required(self):
        with self.assertRaises(PreconditionError):
            besov.sobolev_ratio(catalog('laplace', 1), LinearField([1.0]), 0.25, n=100)
