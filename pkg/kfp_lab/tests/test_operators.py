"""연산자 모델 테스트: 검증, 공분산, 부피, 핵, 내재 차원."""

import math

import numpy as np
from django.test import SimpleTestCase

from kfp_lab import operators
from kfp_lab.operators import catalog
from kfp_lab.validators import DomainError, NotFoundError, NotPSDError, ValidationError

from .factories import OperatorSpecFactory


class OperatorSpecTest(SimpleTestCase):
    """OperatorSpec 생성과 검증 테스트."""

    def test_factory_default_is_laplacian(self):
        spec = OperatorSpecFactory()
        self.assertTrue(spec.is_laplacian)
        self.assertEqual(spec.trace, 0.0)
        self.assertTrue(spec.trace_flag)

    def test_non_symmetric_q(self):
        with self.assertRaises(ValidationError):
            OperatorSpecFactory(Q=np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_indefinite_q(self):
        with self.assertRaises(NotPSDError):
            OperatorSpecFactory(Q=np.diag([1.0, -1.0]))

    def test_shape_mismatch(self):
        with self.assertRaises(ValidationError) as ctx:
            OperatorSpecFactory(dim=3, Q=np.eye(2), B=np.zeros((2, 2)))
        self.assertEqual(ctx.exception.field, 'dim')

    def test_matrices_are_frozen(self):
        """생성 후 행렬은 수정할 수 없습니다."""
        spec = OperatorSpecFactory()
        with self.assertRaises(ValueError):
            spec.B[0, 0] = 1.0

    def test_equality_by_matrices(self):
        """이름과 무관하게 (Q, B)가 같으면 같은 연산자."""
        self.assertEqual(OperatorSpecFactory(name='a'), OperatorSpecFactory(name='b'))
        self.assertEqual(len({OperatorSpecFactory(), OperatorSpecFactory()}), 1)

    def test_to_dict(self):
        data = catalog('kramers').to_dict()
        self.assertEqual(data['dim'], 2)
        self.assertEqual(data['B'], [[0.0, -1.0], [1.0, 0.0]])


class CatalogTest(SimpleTestCase):
    """카탈로그 연산자 테스트."""

    def test_kolmogorov_matrices(self):
        spec = catalog('kolmogorov', 1)
        np.testing.assert_array_equal(spec.Q, np.diag([1.0, 0.0]))
        np.testing.assert_array_equal(spec.B, [[0.0, 0.0], [1.0, 0.0]])
        self.assertEqual(spec.dilation_weights, (1.0, 3.0))

    def test_sized_name(self):
        self.assertEqual(catalog('laplace:3').dim, 3)
        self.assertEqual(catalog('kolmogorov', 2).dim, 4)

    def test_ornstein_uhlenbeck_trace(self):
        self.assertEqual(catalog('ornstein_uhlenbeck', 3).trace, -3.0)

    def test_unknown_name(self):
        with self.assertRaises(NotFoundError):
            catalog('heisenberg')

    def test_non_positive_size(self):
        with self.assertRaises(ValidationError):
            catalog('laplace', 0)


class CovarianceTest(SimpleTestCase):
    """K(t), V(t) 테스트."""

    def test_kolmogorov_golden_value(self):
        """kolmogorov(1)의 K(1) = [[1, 1/2], [1/2, 1/3]]."""
        K = operators.covariance(catalog('kolmogorov', 1), 1.0).K
        np.testing.assert_allclose(K, [[1.0, 0.5], [0.5, 1.0 / 3.0]], atol=1e-10)

    def test_kolmogorov_determinant(self):
        spec = catalog('kolmogorov', 1)
        for t in (0.1, 1.0, 10.0):
            self.assertAlmostEqual(operators.covariance(spec, t).det_tK / (t ** 4 / 12.0), 1.0, places=9)

    def test_kolmogorov_volume_at_large_time(self):
        """V(t) = πt²/√12 는 t가 커도 0으로 무너지지 않습니다."""
        spec = catalog('kolmogorov', 1)
        for t in (1e4, 1e6):
            bundle = operators.covariance(spec, t)
            self.assertAlmostEqual(bundle.det_tK / (t ** 4 / 12.0), 1.0, places=9)
            self.assertAlmostEqual(bundle.V / (math.pi * t ** 2 / math.sqrt(12.0)), 1.0, places=9)

    def test_laplace_volume(self):
        for N in (1, 2, 3):
            spec = catalog('laplace', N)
            for t in (0.1, 1.0, 10.0):
                expected = operators.unit_ball_volume(N) * t ** (N / 2)
                self.assertAlmostEqual(operators.volume(spec, t) / expected, 1.0, places=12)

    def test_kramers_volume(self):
        spec = catalog('kramers')
        for t in (0.1, 1.0, 10.0):
            expected = math.pi * math.sqrt(t ** 2 / 4 + (math.cos(2 * t) - 1) / 8)
            self.assertAlmostEqual(operators.volume(spec, t) / expected, 1.0, places=7)

    def test_block_exponential_matches_quadrature(self):
        for name in ('kolmogorov', 'kramers', 'ornstein_uhlenbeck'):
            self.assertLess(operators.van_loan_gap(catalog(name), 1.0), 1e-8)

    def test_non_positive_time(self):
        with self.assertRaises(DomainError):
            operators.covariance(catalog('laplace', 1), 0.0)

    def test_unit_ball_volume(self):
        self.assertAlmostEqual(operators.unit_ball_volume(1), 2.0)
        self.assertAlmostEqual(operators.unit_ball_volume(2), math.pi)
        self.assertAlmostEqual(operators.unit_ball_volume(3), 4.0 * math.pi / 3.0)


class KernelTest(SimpleTestCase):
    """p(X, Y, t)와 m_t 테스트."""

    def test_laplace_density_at_diagonal(self):
        """laplace(1)에서 p(x, x, 1) = (4π)^{−1/2}."""
        value = operators.kernel_density(catalog('laplace', 1), [0.3], [0.3], 1.0)
        self.assertAlmostEqual(float(value), (4 * math.pi) ** -0.5)

    def test_laplace_density_matches_gaussian(self):
        spec = catalog('laplace', 2)
        X, Y, t = np.array([0.1, -0.2]), np.array([0.7, 0.4]), 0.5
        expected = (4 * math.pi * t) ** -1 * math.exp(-np.sum((X - Y) ** 2) / (4 * t))
        self.assertAlmostEqual(float(operators.kernel_density(spec, X, Y, t)), expected)

    def test_pseudo_distance_vanishes_on_drift_image(self):
        """m_t(X, e^{tB}X) = 0."""
        spec = catalog('kolmogorov', 1)
        X = np.array([0.4, -1.0])
        image = operators.covariance(spec, 0.8).exp_tB @ X
        self.assertAlmostEqual(operators.pseudo_distance(spec, 0.8, X, image), 0.0)

    def test_pseudo_distance_vectorized(self):
        spec = catalog('laplace', 2)
        Y = np.array([[0.0, 0.0], [3.0, 4.0]])
        distances = operators.pseudo_distance(spec, 1.0, [0.0, 0.0], Y)
        np.testing.assert_allclose(distances, [0.0, 5.0])

    def test_non_positive_time(self):
        with self.assertRaises(DomainError):
            operators.kernel_density(catalog('laplace', 1), [0.0], [0.0], -1.0)

    def test_adjoint_mass(self):
        """OU의 수반 질량은 e^{Nt}."""
        law = operators.adjoint_law(catalog('ornstein_uhlenbeck', 2), 0.5)
        self.assertAlmostEqual(law.mass, math.exp(1.0))

    def test_kernel_constants(self):
        """c_N = ω_N (4π)^{−N/2}, a_N = ω_N (8π)^{−N/2}."""
        for N in (1, 2, 4):
            omega = operators.unit_ball_volume(N)
            self.assertAlmostEqual(operators.kernel_constant(N), omega * (4 * math.pi) ** (-N / 2))
            self.assertAlmostEqual(operators.square_constant(N), omega * (8 * math.pi) ** (-N / 2))


class HypoellipticityTest(SimpleTestCase):
    """K(t) > 0 검사와 칼만 계수 테스트."""

    def test_catalog_is_hypoelliptic(self):
        for name in operators.CATALOG_NAMES:
            spec = catalog(name)
            self.assertTrue(operators.check_hypoelliptic(spec).ok, name)
            self.assertEqual(operators.kalman_rank(spec), spec.dim)

    def test_degenerate_operator(self):
        spec = OperatorSpecFactory(degenerate=True)
        report = operators.check_hypoelliptic(spec)
        self.assertFalse(report.ok)
        self.assertEqual(operators.kalman_rank(spec), 1)

    def test_empty_grid(self):
        with self.assertRaises(DomainError):
            operators.check_hypoelliptic(catalog('laplace', 1), grid=[])


class IntrinsicDimensionTest(SimpleTestCase):
    """V(t)의 로그-로그 기울기로 구한 (D0, D∞) 테스트."""

    def assertDimensions(self, spec, D0, Dinf, regime):
        dims = operators.intrinsic_dimensions(spec)
        self.assertAlmostEqual(dims.D0, D0, delta=0.1)
        self.assertAlmostEqual(dims.Dinf, Dinf, delta=0.1)
        self.assertEqual(dims.regime, regime)

    def test_laplace(self):
        self.assertDimensions(catalog('laplace', 2), 2.0, 2.0, 'homogeneous')

    def test_kolmogorov(self):
        self.assertDimensions(catalog('kolmogorov', 1), 4.0, 4.0, 'homogeneous')

    def test_kramers(self):
        self.assertDimensions(catalog('kramers'), 4.0, 2.0, 'crossing')

    def test_factory_kolmogorov_trait(self):
        self.assertDimensions(OperatorSpecFactory(kolmogorov=True), 4.0, 4.0, 'homogeneous')
