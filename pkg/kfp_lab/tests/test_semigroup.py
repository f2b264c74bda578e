"""열 반군 테스트: MC 추정, 핵 질량, 반군 부등식."""

import math

import numpy as np
from django.test import SimpleTestCase

from kfp_lab import semigroup
from kfp_lab.fields import GaussianField, LinearField, constant
from kfp_lab.operators import catalog
from kfp_lab.semigroup import BoundCheck, MCEstimate, MonteCarloImage, z_score
from kfp_lab.validators import DomainError, IllConditionedSamplerError

from .factories import BumpFieldFactory, GaussianFieldFactory

Z_LIMIT = 5.0


class MCEstimateTest(SimpleTestCase):
    """추정값 타입 테스트."""

    def test_constant_samples_have_zero_error(self):
        estimate = MCEstimate.from_samples(np.full(10, 2.0), seed=3)
        self.assertEqual((estimate.value, estimate.std_error, estimate.n), (2.0, 0.0, 10))

    def test_standard_error(self):
        estimate = MCEstimate.from_samples(np.array([0.0, 2.0, 0.0, 2.0]), seed=0)
        self.assertAlmostEqual(estimate.value, 1.0)
        self.assertAlmostEqual(estimate.std_error, math.sqrt(4.0 / 3.0) / 2.0)

    def test_empty_samples(self):
        with self.assertRaises(DomainError):
            MCEstimate.from_samples(np.array([]), seed=0)

    def test_z_score(self):
        self.assertAlmostEqual(z_score(MCEstimate(1.0, 0.3, 10, 0), MCEstimate(2.0, 0.4, 10, 0)), 2.0)
        self.assertEqual(z_score(MCEstimate.exact(1.0), MCEstimate.exact(1.0)), 0.0)
        self.assertEqual(z_score(MCEstimate.exact(1.0), MCEstimate.exact(2.0)), math.inf)

    def test_bound_check_slack(self):
        """lhs ≤ rhs + 4·결합 표준오차 이면 통과."""
        self.assertTrue(BoundCheck(MCEstimate(1.1, 0.03, 10, 0), MCEstimate(1.0, 0.0, 0, 0)).ok)
        self.assertFalse(BoundCheck(MCEstimate(1.2, 0.01, 10, 0), MCEstimate(1.0, 0.0, 0, 0)).ok)


class ApplySemigroupTest(SimpleTestCase):
    """P_t f(X)와 P*_t f(X) 테스트."""

    def test_gaussian_matches_closed_form(self):
        spec = catalog('kolmogorov', 1)
        f = GaussianFieldFactory()
        X = [0.2, -0.1]
        estimate = semigroup.apply_semigroup(spec, f, X, 0.5, n=20000, seed=11, workers=4)
        expected = f.heat_flow(spec, 0.5, X)
        self.assertLess(abs(estimate.value - expected), Z_LIMIT * estimate.std_error + 1e-12)

    def test_linear_field_is_exact(self):
        """대칭 쌍 평균은 선형 함수에서 오차가 없습니다."""
        spec = catalog('kramers')
        f = LinearField([1.0, -2.0], 0.5)
        estimate = semigroup.apply_semigroup(spec, f, [0.3, 0.7], 1.2, n=100, seed=1)
        self.assertAlmostEqual(estimate.value, f.heat_flow(spec, 1.2, [0.3, 0.7]), places=10)

    def test_same_seed_same_value(self):
        spec = catalog('kolmogorov', 1)
        f = BumpFieldFactory()
        first = semigroup.apply_semigroup(spec, f, [0.1, 0.2], 0.5, n=5000, seed=9, workers=3)
        second = semigroup.apply_semigroup(spec, f, [0.1, 0.2], 0.5, n=5000, seed=9, workers=3)
        other = semigroup.apply_semigroup(spec, f, [0.1, 0.2], 0.5, n=5000, seed=10, workers=3)
        self.assertEqual(first, second)
        self.assertNotEqual(first.value, other.value)

    def test_adjoint_of_constant(self):
        """P*_t 1 = e^{−t trB}."""
        spec = catalog('ornstein_uhlenbeck', 2)
        estimate = semigroup.apply_adjoint(spec, constant(2), [0.1, 0.1], 0.5, n=200, seed=0)
        self.assertAlmostEqual(estimate.value, math.exp(1.0))

    def test_non_positive_time(self):
        with self.assertRaises(DomainError):
            semigroup.apply_semigroup(catalog('laplace', 1), GaussianFieldFactory(dim=1), [0.0], 0.0, n=10)

    def test_heat_image_kinds(self):
        spec = catalog('kolmogorov', 1)
        self.assertIsInstance(semigroup.heat_image(spec, GaussianFieldFactory(), 0.5), GaussianField)
        self.assertIsInstance(semigroup.heat_image(spec, BumpFieldFactory(), 0.5, inner=64), MonteCarloImage)


class KernelMassTest(SimpleTestCase):
    """핵 질량 테스트."""

    def test_forward_mass_is_one(self):
        for name in ('kolmogorov', 'kramers'):
            estimate = semigroup.kernel_mass(catalog(name), [0.5, -0.5], 0.3, n=20000, seed=5, workers=2)
            self.assertLess(abs(estimate.value - 1.0), Z_LIMIT * estimate.std_error, name)

    def test_adjoint_mass(self):
        spec = catalog('ornstein_uhlenbeck', 2)
        estimate = semigroup.adjoint_mass(spec, [0.2, 0.0], 0.4, n=20000, seed=5)
        self.assertLess(abs(estimate.value - math.exp(0.8)), Z_LIMIT * estimate.std_error)


class SemigroupInequalityTest(SimpleTestCase):
    """축소성, 초축소성, 채프먼-콜모고로프 테스트."""

    def test_contraction(self):
        for name in ('kolmogorov', 'kramers', 'ornstein_uhlenbeck'):
            spec = catalog(name)
            f = GaussianField(np.zeros(spec.dim), np.eye(spec.dim))
            for p in (1, 2):
                self.assertTrue(semigroup.contraction_check(spec, f, 0.5, p, n=5000, seed=2).ok, (name, p))

    def test_ultracontractivity(self):
        spec = catalog('kolmogorov', 1)
        f = GaussianFieldFactory(sigma=0.5)
        report = semigroup.ultracontractivity_constant(spec, f, [[0.0, 0.0], [0.5, -0.5]], (0.01, 0.1, 1.0))
        self.assertTrue(report.ok)
        self.assertGreater(report.constant, 0.0)

    def test_lp_rate(self):
        spec = catalog('kolmogorov', 1)
        check = semigroup.lprate_check(spec, GaussianFieldFactory(), 0.05, 1, n=10000, seed=4)
        self.assertTrue(check.ok)

    def test_chapman_kolmogorov(self):
        spec = catalog('kolmogorov', 1)
        z = semigroup.chapman_kolmogorov_residual(spec, BumpFieldFactory(radius=1.5), [0.2, -0.1], 0.3, 0.4,
                                                  n=10000, seed=8)
        self.assertLess(z, Z_LIMIT)

    def test_lp_distance_to_itself(self):
        f = GaussianFieldFactory()
        self.assertEqual(semigroup.lp_distance(f, f, 1, n=100, seed=0).value, 0.0)

    def test_sampler_needs_support(self):
        """유효 지지가 없는 함수는 샘플러를 만들 수 없습니다."""
        with self.assertRaises(IllConditionedSamplerError):
            semigroup.lp_distance(constant(2), None, 1, n=100)
