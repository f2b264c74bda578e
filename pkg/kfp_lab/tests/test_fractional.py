"""분수 거듭제곱 테스트: Balakrishnan 공식, 리스 퍼텐셜, 합성, Ledoux 추정."""

import math
from types import SimpleNamespace
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from kfp_lab import fractional
from kfp_lab.fields import GaussianField, constant
from kfp_lab.fractional import FracQuadSpec
from kfp_lab.operators import catalog
from kfp_lab.validators import (
    DivergentPotentialError,
    DomainError,
    HypoellipticityError,
    InsufficientCutoffError,
    PreconditionError,
)

from .factories import BumpFieldFactory, GaussianFieldFactory

Z_LIMIT = 5.0


class QuadratureTest(SimpleTestCase):
    """시간 구적 설정 테스트."""

    def test_frac_constant(self):
        self.assertAlmostEqual(fractional.frac_constant(0.5), 0.5 / math.sqrt(math.pi))

    def test_log_nodes_integrate_power(self):
        """로그 치환 규칙은 ∫ t^{−1/2} dt를 정확히 적분합니다."""
        quad = FracQuadSpec(s=0.5)
        times, weights = quad.nodes()
        expected = 2.0 * (math.sqrt(quad.tail_cut) - math.sqrt(quad.t_min))
        self.assertAlmostEqual(float(np.sum(weights * times ** -0.5)) / expected, 1.0, places=10)

    def test_nodes_are_read_only(self):
        times, _ = FracQuadSpec(s=0.3).nodes()
        with self.assertRaises(ValueError):
            times[0] = 1.0

    def test_invalid_settings(self):
        with self.assertRaises(DomainError):
            FracQuadSpec(s=1.0)
        with self.assertRaises(DomainError):
            FracQuadSpec(s=0.5, split=1e9)
        with self.assertRaises(DomainError):
            FracQuadSpec(s=0.5, near_nodes=1)


class TailBoundTest(SimpleTestCase):
    """∫_{T}^∞ t^{power}/V(t) dt 상한 테스트."""

    def test_kolmogorov_power_law(self):
        """V(t) = πt²/√12 에서 상한은 닫힌 형태 이상, 배가 한 번의 V 증가율(4배) 미만입니다."""
        start, power = 1e8, -1.25
        bound = fractional.volume_tail_bound(catalog('kolmogorov', 1), start, power)
        closed = math.sqrt(12.0) / math.pi * start ** (power - 1.0) / (1.0 - power)
        self.assertTrue(math.isfinite(bound))
        self.assertGreaterEqual(bound, closed * (1.0 - 1e-6))
        self.assertLess(bound, 4.0 * closed)

    def test_kramers_is_finite(self):
        bound = fractional.volume_tail_bound(catalog('kramers'), 1e8, -1.25)
        self.assertTrue(math.isfinite(bound))
        self.assertGreater(bound, 0.0)

    def test_stops_when_volume_stalls(self):
        """V가 0으로 떨어지면 직전 격자에서 V 일정으로 외삽합니다 (∫₁^∞ t^{−5/4} dt = 4)."""
        bundles = [SimpleNamespace(V=1.0), SimpleNamespace(V=0.0)]
        with mock.patch('kfp_lab.fractional.covariance', side_effect=bundles):
            self.assertAlmostEqual(fractional.volume_tail_bound(catalog('laplace', 1), 1.0, -1.25), 4.0)

    def test_stops_when_covariance_fails(self):
        failures = [SimpleNamespace(V=1.0), HypoellipticityError("정밀도 손실", 'spec')]
        with mock.patch('kfp_lab.fractional.covariance', side_effect=failures):
            self.assertAlmostEqual(fractional.volume_tail_bound(catalog('laplace', 1), 1.0, -1.25), 4.0)

    def test_kolmogorov_balakrishnan(self):
        """꼬리 상한이 유한하므로 kolmogorov 연산자에서도 MC 경로가 끝까지 계산됩니다."""
        estimate = fractional.balakrishnan_apply(catalog('kolmogorov', 1), GaussianField(np.zeros(2), np.eye(2)),
                                                 [0.0, 0.0], 0.25, n=1000, seed=0xB5EED, method='mc')
        self.assertTrue(math.isfinite(estimate.value))
        self.assertLess(estimate.tail_bound, 0.1 * fractional.DEFAULT_TOLERANCE)


class BalakrishnanTest(SimpleTestCase):
    """(−𝒜)^s f(X) 테스트."""

    def test_fourier_oracle(self):
        spec = catalog('laplace', 1)
        f = GaussianFieldFactory(dim=1)
        for s in (0.25, 0.5, 0.75):
            value = fractional.balakrishnan_apply(spec, f, [0.0], s, method='exact').value
            oracle = fractional.fourier_oracle(f, 0.0, s)
            self.assertAlmostEqual(value / oracle, 1.0, delta=1e-2)

    def test_monte_carlo_agrees_with_exact(self):
        spec = catalog('kolmogorov', 1)
        f = GaussianFieldFactory()
        X = [0.25, -0.25]
        exact = fractional.balakrishnan_apply(spec, f, X, 0.4, method='exact')
        mc = fractional.balakrishnan_apply(spec, f, X, 0.4, n=4000, seed=3, workers=2, method='mc')
        self.assertLess(abs(mc.value - exact.value), Z_LIMIT * math.hypot(mc.std_error, exact.std_error))
        self.assertGreater(mc.mc_error, 0.0)

    def test_auto_method_follows_closed_form(self):
        """닫힌 형태가 있으면 auto는 exact 경로를 씁니다 (n = 0)."""
        estimate = fractional.balakrishnan_apply(catalog('laplace', 1), GaussianFieldFactory(dim=1), [0.0], 0.5,
                                                 method='auto')
        self.assertEqual(estimate.n, 0)
        self.assertEqual(estimate.mc_error, 0.0)

    def test_constant_field_is_annihilated(self):
        estimate = fractional.balakrishnan_apply(catalog('kramers'), constant(2, 3.0), [0.0, 0.0], 0.5)
        self.assertEqual(estimate.value, 0.0)

    def test_exact_needs_closed_form(self):
        with self.assertRaises(PreconditionError):
            fractional.balakrishnan_apply(catalog('kolmogorov', 1), BumpFieldFactory(), [0.0, 0.0], 0.5,
                                          method='exact')

    def test_order_out_of_range(self):
        with self.assertRaises(DomainError):
            fractional.balakrishnan_apply(catalog('laplace', 1), GaussianFieldFactory(dim=1), [0.0], 1.2)

    def test_insufficient_cutoff(self):
        """꼬리 상한이 허용 오차의 10%를 넘으면 거부합니다."""
        quad = FracQuadSpec(s=0.5, tail_cut=10.0)
        with self.assertRaises(InsufficientCutoffError):
            fractional.balakrishnan_apply(catalog('laplace', 1), GaussianFieldFactory(dim=1), [0.0], 0.5,
                                          quad=quad, method='exact')


class RieszPotentialTest(SimpleTestCase):
    """ℐ_α f(X) 테스트."""

    def test_newtonian_potential(self):
        spec = catalog('laplace', 3)
        f = GaussianField(np.zeros(3), np.eye(3))
        for X in ([0.0, 0.0, 0.0], [1.0, 0.5, 0.0]):
            value = fractional.riesz_apply(spec, f, X, 2.0, method='exact').value
            self.assertAlmostEqual(value / fractional.newtonian_oracle(f, X), 1.0, delta=1e-2)

    def test_divergent_order(self):
        """α ≥ D∞ 이면 퍼텐셜이 발산합니다."""
        with self.assertRaises(DivergentPotentialError):
            fractional.riesz_apply(catalog('laplace', 1), GaussianFieldFactory(dim=1), [0.0], 1.5)

    def test_negative_trace(self):
        spec = catalog('ornstein_uhlenbeck', 1)
        with self.assertRaises(PreconditionError):
            fractional.riesz_apply(spec, GaussianFieldFactory(dim=1), [0.0], 0.5)


class CompositionTest(SimpleTestCase):
    """역연산, 가법성, 교환 테스트."""

    def test_inversion_laplace(self):
        spec = catalog('laplace', 1)
        report = fractional.inversion_residual(spec, GaussianFieldFactory(dim=1), [0.25], 0.3, n=4000, seed=1)
        self.assertLess(report.residual, 2e-2)

    def test_additivity_laplace(self):
        spec = catalog('laplace', 1)
        report = fractional.additivity_residual(spec, GaussianFieldFactory(dim=1), [0.25], 0.2, 0.3, n=4000,
                                                seed=1)
        self.assertLess(report.residual, 5e-2)

    def test_commutation(self):
        spec = catalog('kolmogorov', 1)
        z = fractional.commutation_residual(spec, GaussianFieldFactory(), [0.3, -0.2], 0.4, 0.5, n=1000, seed=2)
        self.assertLess(z, Z_LIMIT)


class LedouxTest(SimpleTestCase):
    """ℓ_s 핵과 Ledoux 형 추정 테스트."""

    def test_ell_l1_closed_form(self):
        for t, tau, s in ((0.1, 0.5, 0.25), (3.0, 1.0, 0.75), (0.01, 20.0, 0.5)):
            self.assertAlmostEqual(fractional.ell_l1(t, tau, s) / fractional.ell_l1_closed(t, tau, s), 1.0,
                                   places=8)

    def test_ell_l1_equal_times(self):
        self.assertEqual(fractional.ell_l1(1.0, 1.0, 0.5), 0.0)

    def test_ell_kernel_sign(self):
        self.assertGreater(fractional.ell_kernel(0.6, 0.5, 1.0, 0.5), 0.0)
        self.assertEqual(fractional.ell_kernel(0.4, 0.5, 1.0, 0.5), 0.0)

    def test_ledoux_estimate(self):
        spec = catalog('kolmogorov', 1)
        report = fractional.ledoux_check(spec, GaussianFieldFactory(), 0.25, 0.1, 0.5, 1, n=2000, seed=4)
        self.assertTrue(report.ok)

    def test_ledoux_equal_times(self):
        report = fractional.ledoux_check(catalog('kolmogorov', 1), GaussianFieldFactory(), 0.5, 1.0, 1.0)
        self.assertEqual(report.lhs.value, 0.0)

    def test_ledoux_corollary(self):
        """sup_t t^{−s}‖P_t f − f‖₁ ≤ (2/Γ(1+s)) sup_σ‖(−𝒜)^s P_σ f‖₁."""
        report = fractional.ledoux_corollary(catalog('laplace', 1), GaussianField([0.0], [[1.0]]), 0.5,
                                             (0.1, 1.0), n=2000, seed=6)
        self.assertTrue(report.ok)
        self.assertEqual(report.sigmas, tuple(sorted(report.sigmas)))

    def test_ledoux_negative_trace(self):
        with self.assertRaises(PreconditionError):
            fractional.ledoux_check(catalog('ornstein_uhlenbeck', 2), GaussianFieldFactory(), 0.5, 0.1, 0.2)
