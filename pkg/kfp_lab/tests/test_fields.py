"""영역과 스칼라 함수 테스트."""

import math

import numpy as np
from django.test import SimpleTestCase

from kfp_lab.fields import IndicatorField, LinearField, SumField, constant
from kfp_lab.operators import catalog
from kfp_lab.regions import Ball, Box, Ellipsoid, Union, interval
from kfp_lab.rng import stream
from kfp_lab.validators import NotPSDError, ValidationError

from .factories import BallFactory, BoxFactory, BumpFieldFactory, GaussianFieldFactory


class RegionTest(SimpleTestCase):
    """Ball, Box, Ellipsoid, Union 테스트."""

    def test_ball_measure(self):
        self.assertAlmostEqual(BallFactory(dim=2).measure, math.pi)
        self.assertAlmostEqual(BallFactory(dim=1, radius=0.5).measure, 1.0)

    def test_box_contains_is_open(self):
        box = BoxFactory(dim=2)
        inside = box.contains(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, -0.99]]))
        self.assertEqual(inside.tolist(), [True, False, True])

    def test_uniform_samples_stay_inside(self):
        rng = stream(1, 0)
        for region in (BallFactory(), BoxFactory(half_width=0.3), Ellipsoid([1.0, 0.0], np.diag([2.0, 0.5]))):
            self.assertTrue(np.all(region.contains(region.sample_uniform(rng, 500))))

    def test_dilation_scales_measure(self):
        """δ_λ 상의 부피는 λ^{Σw} 배."""
        ball = BallFactory()
        image = ball.dilate((1.0, 3.0), 2.0)
        self.assertAlmostEqual(image.measure / ball.measure, 2.0 ** 4)

    def test_box_scaled_with_negative_factor(self):
        box = Box([0.0, 1.0], [1.0, 2.0]).scaled([-1.0, 2.0])
        np.testing.assert_array_equal(box.lo, [-1.0, 2.0])
        np.testing.assert_array_equal(box.hi, [0.0, 4.0])

    def test_invalid_box(self):
        with self.assertRaises(ValidationError):
            Box([0.0], [0.0])

    def test_ellipsoid_must_be_definite(self):
        with self.assertRaises(NotPSDError):
            Ellipsoid([0.0, 0.0], np.diag([1.0, 0.0]))

    def test_union_measure(self):
        union = Union((interval(0.0, 1.0), interval(2.0, 2.5)))
        self.assertAlmostEqual(union.measure, 1.5)
        self.assertEqual(union.contains(np.array([[0.5], [1.5], [2.2]])).tolist(), [True, False, True])

    def test_union_overlap_is_rejected(self):
        with self.assertRaises(ValidationError):
            Union((Ball([0.0, 0.0], 1.0), Ball([0.5, 0.0], 1.0)))

    def test_one_dimensional_ball_as_box(self):
        box = Ball([0.5], 0.5).as_box()
        np.testing.assert_allclose(box.lo, [0.0])
        np.testing.assert_allclose(box.hi, [1.0])
        self.assertIsNone(BallFactory(dim=2).as_box())


class FieldTest(SimpleTestCase):
    """스칼라 함수의 값, 노름, 닫힌 형태 테스트."""

    def test_gaussian_l1_norm(self):
        f = GaussianFieldFactory(dim=2, sigma=0.5)
        self.assertAlmostEqual(f.l1_norm, 2 * math.pi * 0.25)
        self.assertEqual(f([0.0, 0.0]), 1.0)

    def test_bump_l1_norm(self):
        """1차원 (1 − x²)³의 적분은 32/35."""
        self.assertAlmostEqual(BumpFieldFactory(dim=1).l1_norm, 32.0 / 35.0)

    def test_bump_vanishes_outside(self):
        f = BumpFieldFactory(dim=2)
        np.testing.assert_array_equal(f(np.array([[1.0, 0.0], [2.0, 2.0]])), [0.0, 0.0])

    def test_bump_level_region(self):
        f = BumpFieldFactory(dim=1)
        self.assertIsNone(f.level_region(1.0))
        region = f.level_region(0.125)
        self.assertAlmostEqual(region.measure, 2.0 * math.sqrt(0.5))

    def test_gaussian_heat_image_matches_flow(self):
        spec = catalog('kolmogorov', 1)
        f = GaussianFieldFactory()
        image = f.heat_image(spec, 0.7)
        X = np.array([[0.3, -0.4], [1.0, 1.0]])
        np.testing.assert_allclose(image(X), f.heat_flow(spec, 0.7, X))

    def test_gaussian_generator_is_time_derivative(self):
        """(P_h f − f)/h → 𝒜f (리처드슨 외삽)."""
        spec = catalog('kramers')
        f = GaussianFieldFactory()
        X = np.array([0.4, -0.3])

        def quotient(h):
            return (f.heat_flow(spec, h, X) - f(X)) / h

        difference = (4.0 * quotient(5e-4) - quotient(1e-3)) / 3.0
        self.assertAlmostEqual(difference, f.generator(spec, X), places=4)

    def test_linear_flow_follows_drift(self):
        """P_t <a, ·> (X) = <a, e^{tB}X>."""
        spec = catalog('kolmogorov', 1)
        f = LinearField([0.0, 1.0])
        self.assertAlmostEqual(f.heat_flow(spec, 2.0, [1.0, 0.0]), 2.0)

    def test_constant(self):
        f = constant(3, 2.5)
        self.assertTrue(f.is_constant)
        self.assertEqual(f.sup_norm, 2.5)

    def test_indicator_box_flow_under_laplacian(self):
        """1차원 구간 지시함수의 열 흐름은 오차함수 차."""
        f = IndicatorField(interval(0.0, 1.0))
        value = f.heat_flow(catalog('laplace', 1), 0.25, [0.5])
        self.assertAlmostEqual(value, math.erf(0.5 / math.sqrt(1.0)))

    def test_indicator_flow_needs_laplacian(self):
        with self.assertRaises(NotImplementedError):
            IndicatorField(BallFactory()).heat_flow(catalog('kolmogorov', 1), 0.5, [0.0, 0.0])

    def test_sum_field(self):
        f = SumField([(2.0, GaussianFieldFactory(dim=1)), (-1.0, BumpFieldFactory(dim=1))])
        self.assertAlmostEqual(f([0.0]), 1.0)

    def test_sum_dimension_mismatch(self):
        with self.assertRaises(ValidationError):
            SumField([(1.0, GaussianFieldFactory(dim=1)), (1.0, GaussianFieldFactory(dim=2))])

    def test_wrong_point_dimension(self):
        with self.assertRaises(ValidationError):
            GaussianFieldFactory(dim=2)([0.0, 0.0, 0.0])
