"""검증 모음.

각 검사는 수락 기준 번호 하나에 묶이고, 측정값, 허용 오차, 통과 여부를 보고합니다.
core는 표본 수를 줄인 빠른 모음, full은 모든 검사를 기준 표본 수로 실행합니다.
검사 하나가 예외로 실패해도 나머지는 계속 실행하고 보고서는 항상 만들어집니다.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import besov, fractional, matlin, operators, perimeter, semigroup
from .fields import BumpField, GaussianField
from .operators import catalog
from .regions import Ball, Box, interval
from .rng import stream
from .validators import ValidationError

logger = logging.getLogger(__name__)


LEVELS = ('core', 'full')
REPORT_HEADER = ('name', 'criterion', 'statement', 'measured', 'tolerance', 'passed', 'detail')
KEY_VERIFY = 90
MASS_SAMPLES = 100_000
MASS_SIGMAS = 3.0


# ============ 보고서 ============

@dataclass(frozen=True)
class CheckResult:
    """검사 하나의 결과.

    Attributes:
        name: 검사 이름.
        criterion: 수락 기준 번호 (1-15).
        statement: 검사하는 항등식 또는 부등식.
        measured: 측정값 (검사마다 의미가 다르며 statement에 적혀 있습니다).
        tolerance: 허용 한계.
        passed: 통과 여부.
        detail: 부가 정보 또는 예외 메시지.
    """
    name: str
    criterion: int
    statement: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ''

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in REPORT_HEADER}


@dataclass
class VerifyReport:
    level: str
    seed: int
    workers: int
    results: List[CheckResult] = field(default_factory=list)

    header = REPORT_HEADER

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def to_rows(self) -> List[dict]:
        return [result.to_dict() for result in self.results]

    def to_dict(self) -> dict:
        return {
            'level': self.level,
            'seed': self.seed,
            'workers': self.workers,
            'passed': self.passed,
            'count': len(self.results),
            'failures': [result.name for result in self.failures],
            'checks': self.to_rows(),
        }


# ============ 등록 ============

@dataclass(frozen=True)
class CheckContext:
    """검사 실행 문맥.

    Attributes:
        level: core 또는 full.
        seed: 마스터 시드.
        workers: 작업자 수.
    """
    level: str
    seed: int
    workers: int

    @property
    def full(self) -> bool:
        return self.level == 'full'

    def n(self, full: int, core: Optional[int] = None) -> int:
        """수준별 표본 수. core는 기본적으로 full의 1/5입니다."""
        if self.full:
            return full
        return core if core is not None else max(1000, full // 5)

    @property
    def mc(self) -> dict:
        return {'seed': self.seed, 'workers': self.workers}


@dataclass(frozen=True)
class Check:
    name: str
    criterion: int
    statement: str
    run: Callable[[CheckContext], Tuple[float, float, bool, str]]
    levels: Tuple[str, ...] = LEVELS


REGISTRY: Dict[str, Check] = {}


def register(name: str, criterion: int, statement: str, levels: Sequence[str] = LEVELS):
    """검사 함수를 등록합니다. 함수는 (measured, tolerance, passed, detail)을 돌려줍니다."""
    def decorator(func):
        if name in REGISTRY:
            raise ValueError(f"검사 이름 중복: {name}")
        REGISTRY[name] = Check(name=name, criterion=criterion, statement=statement, run=func,
                               levels=tuple(levels))
        return func
    return decorator


def _at_most(measured: float, tolerance: float, detail: str = ''):
    return float(measured), float(tolerance), bool(measured <= tolerance), detail


def _all(results, tolerance: float, detail: str = ''):
    """(측정값, 통과) 목록을 가장 나쁜 측정값 하나로 요약합니다."""
    measured = max(value for value, _ in results)
    return float(measured), float(tolerance), all(ok for _, ok in results), detail


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)


# ============ 1-2: 공분산, 부피 ============

@register('covariance_golden', 1, "kolmogorov(1)의 K(1) = [[1, 1/2], [1/2, 1/3]] (최대 성분 오차)")
def _covariance_golden(ctx):
    K = operators.covariance(catalog('kolmogorov', 1), 1.0).K
    expected = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
    return _at_most(np.max(np.abs(K - expected)), 1e-10)


@register('covariance_quadrature_route', 1, "블록 지수 경로와 구적 경로의 tK(t) 상대 차이 (t = 0.1, 1, 10)")
def _covariance_routes(ctx):
    gaps = [operators.van_loan_gap(catalog(name), t)
            for name in ('kolmogorov', 'kramers', 'ornstein_uhlenbeck') for t in (0.1, 1.0, 10.0)]
    return _at_most(max(gaps), 1e-8)


@register('nilpotent_exponential', 1, "e^{tB} = I + tB (B² = 0)의 최대 성분 오차")
def _nilpotent_exponential(ctx):
    B = catalog('kolmogorov', 2).B
    errors = [np.max(np.abs(matlin.mat_exp(B, t) - (np.eye(4) + t * B))) for t in (0.5, 3.0, 40.0)]
    return _at_most(max(errors), 1e-12)


@register('volume_laplace', 2, "laplace(N)에서 V(t) = ω_N t^{N/2} (상대 오차)")
def _volume_laplace(ctx):
    errors = [
        _relative(operators.volume(catalog('laplace', N), t), operators.unit_ball_volume(N) * t ** (N / 2))
        for N in (1, 2, 3) for t in (0.1, 1.0, 10.0)
    ]
    return _at_most(max(errors), 1e-12)


@register('volume_kolmogorov', 2, "kolmogorov(1)에서 det tK(t) = t⁴/12 (상대 오차)")
def _volume_kolmogorov(ctx):
    spec = catalog('kolmogorov', 1)
    errors = [_relative(operators.covariance(spec, t).det_tK, t ** 4 / 12.0) for t in (0.1, 1.0, 10.0)]
    return _at_most(max(errors), 1e-10)


@register('volume_kramers', 2, "kramers에서 V(t) = π(t²/4 + (cos 2t − 1)/8)^{1/2} (상대 오차)")
def _volume_kramers(ctx):
    spec = catalog('kramers')
    errors = [
        _relative(operators.volume(spec, t), math.pi * math.sqrt(t ** 2 / 4 + (math.cos(2 * t) - 1) / 8))
        for t in (0.1, 0.5, 1.0, 2.0, 10.0)
    ]
    return _at_most(max(errors), 1e-8)


# ============ 3: 핵 질량 ============

def _mass_checks(ctx, adjoint: bool):
    results = []
    point_rng = stream(ctx.seed, KEY_VERIFY, 3)
    for name in operators.CATALOG_NAMES:
        spec = catalog(name)
        point = point_rng.standard_normal(spec.dim)
        for t in (0.1, 1.0):
            if adjoint:
                estimate = semigroup.adjoint_mass(spec, point, t, n=MASS_SAMPLES, **ctx.mc)
                expected = math.exp(-t * spec.trace)
            else:
                estimate = semigroup.kernel_mass(spec, point, t, n=MASS_SAMPLES, **ctx.mc)
                expected = 1.0
            z = abs(estimate.value - expected) / max(estimate.std_error, 1e-300)
            results.append((z, z <= MASS_SIGMAS))
    return _all(results, MASS_SIGMAS, "측정값은 |추정 − 기댓값| / 표준오차의 최댓값")


@register('kernel_mass_forward', 3, "∫p(X, ·, t) = 1 (네 카탈로그 연산자, t = 0.1, 1)")
def _kernel_mass_forward(ctx):
    return _mass_checks(ctx, adjoint=False)


@register('kernel_mass_adjoint', 3, "∫p(·, Y, t) = e^{−t trB} (OU는 e^{Nt})")
def _kernel_mass_adjoint(ctx):
    return _mass_checks(ctx, adjoint=True)


@register('ultracontractivity', 3, "max |P_t f|·V(t)/‖f‖₁ ≤ c_N (kolmogorov(1), 가우스 f)")
def _ultracontractivity(ctx):
    spec = catalog('kolmogorov', 1)
    f = GaussianField([0.0, 0.0], 0.25 * np.eye(2))
    points = np.array([[0.0, 0.0], [0.5, -0.5], [-1.0, 1.0]])
    report = semigroup.ultracontractivity_constant(spec, f, points, (0.01, 0.1, 1.0, 10.0),
                                                   n=ctx.n(20000), **ctx.mc)
    return _at_most(report.constant, report.bound)


@register('semigroup_contraction', 3, "‖P_t f‖_p ≤ e^{−t trB/p}‖f‖_p, p = 1, 2 (비의 최댓값)")
def _semigroup_contraction(ctx):
    results = []
    for name in ('kolmogorov', 'kramers', 'ornstein_uhlenbeck'):
        spec = catalog(name)
        f = GaussianField(np.zeros(spec.dim), np.eye(spec.dim))
        for p in (1, 2):
            check = semigroup.contraction_check(spec, f, 0.5, p, n=ctx.n(20000), **ctx.mc)
            results.append((check.ratio, check.ok))
    return _all(results, 1.0)


@register('lp_rate', 3, "‖P_t f − f‖_p ≤ t‖𝒜f‖_p max{1, e^{−t trB/p}} (kolmogorov(1), 비의 최댓값)")
def _lp_rate(ctx):
    spec = catalog('kolmogorov', 1)
    f = GaussianField([0.0, 0.0], np.eye(2))
    results = []
    for p in (1, 2):
        for t in (0.05, 0.5):
            check = semigroup.lprate_check(spec, f, t, p, n=ctx.n(20000), **ctx.mc)
            results.append((check.ratio, check.ok))
    return _all(results, 1.0)


@register('chapman_kolmogorov', 3, "P_s P_t f = P_{s+t} f (kolmogorov(1), 결합 표준오차 배수)")
def _chapman_kolmogorov(ctx):
    spec = catalog('kolmogorov', 1)
    f = BumpField([0.0, 0.0], 1.5)
    z = semigroup.chapman_kolmogorov_residual(spec, f, [0.2, -0.1], 0.3, 0.4, n=ctx.n(40000), **ctx.mc)
    return _at_most(z, 4.0)


# ============ 4: 내재 차원 ============

def _dimension_check(spec, expected):
    dims = operators.intrinsic_dimensions(spec)
    error = max(abs(dims.D0 - expected[0]), abs(dims.Dinf - expected[1]))
    return _at_most(error, 0.1, f"D0={dims.D0:.4f}, Dinf={dims.Dinf:.4f}")


@register('dimensions_laplace', 4, "laplace(2)의 (D0, D∞) = (2, 2)")
def _dimensions_laplace(ctx):
    return _dimension_check(catalog('laplace', 2), (2.0, 2.0))


@register('dimensions_kolmogorov', 4, "kolmogorov(1)의 (D0, D∞) = (4, 4)")
def _dimensions_kolmogorov(ctx):
    return _dimension_check(catalog('kolmogorov', 1), (4.0, 4.0))


@register('dimensions_kramers', 4, "kramers의 (D0, D∞) = (4, 2)")
def _dimensions_kramers(ctx):
    return _dimension_check(catalog('kramers'), (4.0, 2.0))


@register('hypoellipticity_rank', 4, "K(t) > 0 격자 검사와 칼만 계수 조건의 일치 (최소 고유값의 음수)")
def _hypoellipticity_rank(ctx):
    results = []
    for name in operators.CATALOG_NAMES:
        spec = catalog(name)
        report = operators.check_hypoelliptic(spec)
        results.append((-report.worst_min_eig, report.ok and operators.kalman_rank(spec) == spec.dim))
    degenerate = operators.OperatorSpec(dim=2, Q=np.diag([1.0, 0.0]), B=np.zeros((2, 2)), name='degenerate')
    agree = not operators.check_hypoelliptic(degenerate).ok and operators.kalman_rank(degenerate) == 1
    results.append((0.0, agree))
    return _all(results, 0.0)


# ============ 5-8: 분수 미적분 ============

@register('ell_l1_closed_form', 5, "∫|ℓ_s| = 2|t − τ|^s/Γ(1+s), 무작위 100개 (상대 오차)")
def _ell_l1(ctx):
    rng = stream(ctx.seed, KEY_VERIFY, 5)
    errors = []
    for _ in range(100):
        t, tau = 10.0 ** rng.uniform(-3, 2, size=2)
        s = rng.uniform(0.05, 0.95)
        errors.append(_relative(fractional.ell_l1(t, tau, s), fractional.ell_l1_closed(t, tau, s)))
    return _at_most(max(errors), 1e-8)


@register('fourier_oracle', 6, "(−Δ)^s 가우스 = 푸리에 승수 값, s = 0.25, 0.5, 0.75 (상대 오차)")
def _fourier(ctx):
    spec = catalog('laplace', 1)
    f = GaussianField([0.0], [[1.0]])
    errors = []
    for s in (0.25, 0.5, 0.75):
        floor = 0.1 * abs(fractional.fourier_oracle(f, 0.0, s))
        for x in (0.0, 0.5, 1.0, 2.0, 3.0):
            value = fractional.balakrishnan_apply(spec, f, [x], s, method='exact', seed=ctx.seed).value
            oracle = fractional.fourier_oracle(f, x, s)
            errors.append(abs(value - oracle) / max(abs(oracle), floor))
    return _at_most(max(errors), 1e-2)


@register('newtonian_oracle', 6, "laplace(3)에서 ℐ₂ 가우스 = 뉴턴 퍼텐셜 (상대 오차)")
def _newtonian(ctx):
    spec = catalog('laplace', 3)
    f = GaussianField(np.zeros(3), np.eye(3))
    errors = []
    for point in ([0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [3.0, 0.0, 0.0]):
        value = fractional.riesz_apply(spec, f, point, 2.0, method='exact', seed=ctx.seed).value
        errors.append(_relative(value, fractional.newtonian_oracle(f, point)))
    return _at_most(max(errors), 1e-2)


def _composition(ctx, kind: str, name: str, size: int, limit: float):
    spec = catalog(name, size)
    f = GaussianField(np.zeros(spec.dim), np.eye(spec.dim))
    X = np.full(spec.dim, 0.25)
    n = ctx.n(20000, 4000)
    if kind == 'inversion':
        report = fractional.inversion_residual(spec, f, X, 0.3, n=n, **ctx.mc)
    else:
        report = fractional.additivity_residual(spec, f, X, 0.2, 0.3, n=n, **ctx.mc)
    return _at_most(report.residual, limit, f"오차 추정 {report.error:.3g}")


@register('inversion_laplace', 7, "(−𝒜)^s ℐ_{2s} f = f, laplace(1) (상대 잔차)")
def _inversion_laplace(ctx):
    return _composition(ctx, 'inversion', 'laplace', 1, 2e-2)


@register('inversion_kolmogorov', 7, "(−𝒜)^s ℐ_{2s} f = f, kolmogorov(1) (상대 잔차)", levels=('full',))
def _inversion_kolmogorov(ctx):
    return _composition(ctx, 'inversion', 'kolmogorov', 1, 2e-2)


@register('additivity_laplace', 7, "(−𝒜)^{s}(−𝒜)^{s'} f = (−𝒜)^{s+s'} f, laplace(1) (상대 잔차)")
def _additivity_laplace(ctx):
    return _composition(ctx, 'additivity', 'laplace', 1, 5e-2)


@register('additivity_kolmogorov', 7, "(−𝒜)^{s}(−𝒜)^{s'} f = (−𝒜)^{s+s'} f, kolmogorov(1) (상대 잔차)",
          levels=('full',))
def _additivity_kolmogorov(ctx):
    return _composition(ctx, 'additivity', 'kolmogorov', 1, 5e-2)


@register('commutation', 7, "(−𝒜)^s P_t f = P_t (−𝒜)^s f, kolmogorov(1) (결합 표준오차 배수)")
def _commutation(ctx):
    spec = catalog('kolmogorov', 1)
    f = GaussianField([0.0, 0.0], np.eye(2))
    z = fractional.commutation_residual(spec, f, [0.3, -0.2], 0.4, 0.5, n=ctx.n(4000, 1000), **ctx.mc)
    return _at_most(z, 4.0)


LEDOUX_CASES = (
    (1.0, 0.25, 0.1, 0.5), (1.0, 0.5, 0.1, 1.0), (0.5, 0.75, 0.2, 0.4), (2.0, 0.25, 1.0, 3.0),
    (1.0, 0.75, 0.05, 2.0),
)


@register('ledoux_estimate', 8, "‖P_t f − P_τ f‖_p ≤ (2|t−τ|^s/Γ(1+s)) sup_σ‖(−𝒜)^s P_σ f‖_p (비의 최댓값)")
def _ledoux(ctx):
    spec = catalog('kolmogorov', 1)
    cases = LEDOUX_CASES if ctx.full else LEDOUX_CASES[:1]
    results = []
    for width, s, t, tau in cases:
        f = GaussianField([0.0, 0.0], width * np.eye(2))
        for p in (1, 2):
            report = fractional.ledoux_check(spec, f, s, t, tau, p, n=ctx.n(8000, 2000), **ctx.mc)
            results.append((report.ratio, report.ok))
    return _all(results, 1.0, f"{len(results)}개 조합")


@register('ledoux_monotone', 8, "σ ↦ ‖(−𝒜)^s P_σ f‖₁ 비증가 (격자 위, 위반 수)")
def _ledoux_monotone(ctx):
    spec = catalog('kolmogorov', 1)
    f = GaussianField([0.0, 0.0], np.eye(2))
    report = fractional.ledoux_corollary(spec, f, 0.5, (0.05, 0.5, 2.0), n=ctx.n(8000, 2000), **ctx.mc)
    violations = int(not report.monotone) + int(not report.ok)
    return _at_most(violations, 0, f"corollary 비 {report.ratio:.4g}")


# ============ 9-12: 둘레 ============

@register('deficit_two_routes', 9, "결손의 두 추정 경로 일치 (kolmogorov(1) 공, 결합 표준오차 배수)")
def _deficit_routes(ctx):
    spec = catalog('kolmogorov', 1)
    region = Ball([0.0, 0.0], 1.0)
    n = ctx.n(40000)
    first = perimeter.heat_content_deficit(spec, region, 0.2, n=n, method='mc', **ctx.mc)
    second = perimeter.deficit_cross_check(spec, region, 0.2, n=n, **ctx.mc)
    return _at_most(semigroup.z_score(first, second), 4.0)


@register('deficit_exact_route', 9, "라플라시안 상자 결손: MC와 닫힌 형태 (결합 표준오차 배수)")
def _deficit_exact(ctx):
    spec = catalog('laplace', 2)
    region = Box([0.0, 0.0], [1.0, 2.0])
    mc = perimeter.heat_content_deficit(spec, region, 0.05, n=ctx.n(40000), method='mc', **ctx.mc)
    exact = perimeter.heat_content_deficit(spec, region, 0.05, method='exact', seed=ctx.seed)
    return _at_most(semigroup.z_score(mc, exact), 4.0)


@register('classical_asymptote', 9, "구간 (0,1)에서 √(π/t)·결손 → 4, t ≤ 1e-3 (상대 오차)")
def _classical(ctx):
    values = perimeter.classical_limit(catalog('laplace', 1), interval(0.0, 1.0), (1e-3, 1e-4), method='exact',
                                       seed=ctx.seed)
    return _at_most(max(_relative(estimate.value, 4.0) for _, estimate in values), 0.05)


@register('deficit_upper_bound', 9, "결손(t) ≤ (2t^s/Γ(1+s)) Per_s (laplace(1) 구간, 비의 최댓값)")
def _deficit_upper(ctx):
    estimate = perimeter.frac_perimeter(catalog('laplace', 1), interval(0.0, 1.0), 0.25, method='exact',
                                        seed=ctx.seed)
    checks = perimeter.deficit_upper_check(estimate)
    return _all([(check.ratio, check.ok) for check in checks], 1.0)


@register('deficit_lower_bound', 10, "결손 ≥ |E| − (b_N/V(t/2)) e^{−t trB/4}|E|² (여유/표준오차의 최솟값)")
def _deficit_lower(ctx):
    times = (0.1, 0.5, 2.0) if ctx.full else (0.5,)
    worst, ok = math.inf, True
    for name in ('laplace', 'kolmogorov', 'kramers'):
        spec = catalog(name)
        for region in (Ball(np.zeros(spec.dim), 1.0), Box(-np.ones(spec.dim), np.ones(spec.dim))):
            for t in times:
                report = perimeter.deficit_lower_gap(spec, region, t, n=ctx.n(20000), **ctx.mc)
                score = report.margin / max(report.lhs.std_error, 1e-300)
                worst = min(worst, score)
                ok = ok and report.ok
    return float(worst), -4.0, ok, "측정값은 여유 / 표준오차"


@register('square_constant', 10, "∫p(X, Y, t)² dX = a_N e^{−t trB}/V(t) (에르미트 구적, 상대 오차)")
def _square_constant(ctx):
    gaps = []
    for name in operators.CATALOG_NAMES:
        spec = catalog(name)
        gaps.append(perimeter.square_constant_gap(spec, np.full(spec.dim, 0.3), 0.7))
    return _at_most(max(gaps), 1e-6)


@register('iso_sweep_kolmogorov', 11, "kolmogorov(1) 공의 비등방 확대에서 등주 비 일정 (최솟값)",
          levels=('full',))
def _iso_kolmogorov(ctx):
    result = perimeter.iso_ratio_sweep(catalog('kolmogorov', 1), Ball([0.0, 0.0], 1.0), 0.25,
                                       n=ctx.n(20000), method='mc', **ctx.mc)
    return float(result.min_ratio), 0.0, result.consistent and result.min_ratio > 0.0, \
        f"상수 {result.constant:.4g}"


@register('iso_sweep_isotropic', 11, "kolmogorov(1) 공의 등방 확대에서 등주 비 기록 (최대/최소, 일정성 판정 없음)",
          levels=('full',))
def _iso_isotropic(ctx):
    result = perimeter.iso_ratio_sweep(catalog('kolmogorov', 1), Ball([0.0, 0.0], 1.0), 0.25,
                                       n=ctx.n(20000), method='mc', weights=(1.0, 1.0), **ctx.mc)
    ratios = ", ".join(f"{row.ratio:.4g}" for row in result.rows)
    return float(result.spread), 0.0, math.isfinite(result.spread) and result.min_ratio > 0.0, f"비 [{ratios}]"


@register('iso_sweep_laplace', 11, "laplace(1) 구간 길이 0.5, 1, 2에서 등주 비 일정 (최솟값)")
def _iso_laplace(ctx):
    result = perimeter.iso_ratio_sweep(catalog('laplace', 1), interval(0.0, 1.0), 0.25, method='exact',
                                       seed=ctx.seed)
    passed = result.consistent and result.min_ratio > 0.0 and result.holds
    return float(result.min_ratio), float(result.constant), passed, "허용값은 이론 등주 상수"


@register('interpolation_minimizer', 12, "H(t)의 닫힌 형태 최소점과 수치 최소점 (50개, 상대 차이)")
def _minimizer(ctx):
    rng = stream(ctx.seed, KEY_VERIFY, 12)
    specs = [catalog('laplace', 2), catalog('kolmogorov', 1), catalog('kramers')]
    dims = [operators.intrinsic_dimensions(spec) for spec in specs]
    gaps = []
    for _ in range(50):
        index = int(rng.integers(len(specs)))
        measure, per = 10.0 ** rng.uniform(-2, 2, size=2)
        s = rng.uniform(0.05, 0.45)
        gaps.append(perimeter.interpolation_bound(specs[index], measure, s, per, dims[index]).gap)
    return _at_most(max(gaps), 1e-6)


@register('interpolation_unit_ball', 12, "kolmogorov(1) 단위 공에서 |E| ≤ min_t H(t) (|E|/H(t*))",
          levels=('full',))
def _interpolation_ball(ctx):
    spec = catalog('kolmogorov', 1)
    region = Ball([0.0, 0.0], 1.0)
    estimate = perimeter.frac_perimeter(spec, region, 0.25, n=ctx.n(20000), method='mc', **ctx.mc)
    result = perimeter.interpolation_bound(spec, region.measure, 0.25, estimate.value)
    return _at_most(result.measure / result.h_min, 1.0 + 1e-9, f"경우 {result.case}")


@register('interpolation_cases', 12, "두 영역 경우 i, ii, iii 모두 실행 (누락된 경우 수)")
def _interpolation_cases(ctx):
    spec = catalog('kramers')
    dims = operators.intrinsic_dimensions(spec)
    cases = {perimeter.interpolation_bound(spec, 1.0, 0.25, per, dims).case for per in np.logspace(-6, 6, 121)}
    missing = {'i', 'ii', 'iii'} - cases
    return _at_most(len(missing), 0, ','.join(sorted(cases)))


# ============ 13-14: 베소프, BBM ============

@register('coarea_laplace', 13, "laplace(1) 범프의 여면적 공식 (상대 잔차)")
def _coarea_laplace(ctx):
    profile = besov.LevelSetProfile(BumpField([0.0], 1.0))
    report = besov.coarea_residual(catalog('laplace', 1), profile, 0.25, n_levels=ctx.n(24, 12),
                                   n=ctx.n(20000), **ctx.mc)
    return _at_most(report.residual, 0.05)


@register('coarea_kolmogorov', 13, "kolmogorov(1) 비등방 범프의 여면적 공식 (상대 잔차)", levels=('full',))
def _coarea_kolmogorov(ctx):
    profile = besov.LevelSetProfile(BumpField([0.0, 0.0], shape=np.diag([1.0, 0.25])))
    report = besov.coarea_residual(catalog('kolmogorov', 1), profile, 0.25, n_levels=16,
                                   n=ctx.n(20000), **ctx.mc)
    return _at_most(report.residual, 0.10)


@register('sobolev_embedding', 13, "‖f‖_{D/(D−2s)} ≤ (s/(iΓ(1−s))) 𝒩_{2s,1}(f) (좌변/우변)")
def _sobolev(ctx):
    report = besov.sobolev_ratio(catalog('laplace', 1), GaussianField([0.0], [[1.0]]), 0.25,
                                 n=ctx.n(20000), **ctx.mc)
    return float(report.ratio), 1.0, report.ok, f"i(s) = {report.constant:.4g}"


@register('indicator_consistency', 13, "𝒩_{2s,1}(1_E) = (Γ(1−s)/s) Per_s(E) (결합 표준오차 배수)")
def _indicator(ctx):
    report = besov.indicator_consistency(catalog('laplace', 1), interval(0.0, 1.0), 0.25,
                                         n=ctx.n(20000), **ctx.mc)
    return _at_most(report.z, 4.0)


@register('layer_cake', 13, "층 케이크 부등식 (좌변/우변)")
def _layer_cake(ctx):
    results = []
    for D, s in ((1.0, 0.25), (2.0, 0.4), (4.0, 0.25)):
        report = besov.layercake_check(lambda t: math.exp(-t), D, s)
        results.append((report.lhs / report.rhs, report.ok))
        step = besov.layercake_check(lambda t: 1.0 if t < 1.0 else 0.5, D, s, support=2.0, breakpoints=(1.0,))
        results.append((step.lhs / step.rhs, step.ok))
    return _all(results, 1.0 + 1e-6)


@register('gagliardo_oracle', 13, "laplace(1) 가우스의 𝒩_{α,1} = 명시적 핵 이중 적분 (상대 오차)")
def _gagliardo(ctx):
    f = GaussianField([0.0], [[1.0]])
    estimate = besov.besov_seminorm(catalog('laplace', 1), f, 0.5, 1, n=ctx.n(20000), **ctx.mc)
    oracle = besov.gagliardo_oracle(f, 0.5)
    tolerance = max(0.02, 4.0 * estimate.std_error / oracle)
    return _at_most(_relative(estimate.value, oracle), tolerance)


def _bbm(ctx, s):
    return perimeter.bbm_upper_bound(catalog('laplace', 1), interval(0.0, 1.0), s, method='exact', seed=ctx.seed)


@register('bbm_bound', 14, "Per_s ≤ 2^{1−2s}(s/Γ(1−s))|E|^{1−2s}S^{2s}(1/(1/2−s)+1/s), s = 0.4, 0.45 (비)")
def _bbm_bound(ctx):
    return _all([(report.check.ratio, report.ok) for report in (_bbm(ctx, 0.4), _bbm(ctx, 0.45))], 1.0)


@register('bbm_asymptote', 14, "(1/2 − s)Per_s / sup (4πτ)^{−1/2}결손이 s ↗ 1/2에서 1에 가까워짐 (|비 − 1|)")
def _bbm_asymptote(ctx):
    lower, upper = _bbm(ctx, 0.4), _bbm(ctx, 0.45)
    before, after = abs(lower.asymptote_ratio - 1.0), abs(upper.asymptote_ratio - 1.0)
    return after, before, after < before, f"s=0.4: {lower.asymptote_ratio:.4g}, s=0.45: {upper.asymptote_ratio:.4g}"


# ============ 15: 결정성 ============

def _rerun(ctx, **config) -> List[str]:
    from .services import ExperimentConfig, ExperimentService, ResultWriter

    bodies = []
    for _ in range(2):
        experiment = ExperimentConfig(seed=ctx.seed, workers=ctx.workers, format='csv', **config)
        bodies.append(ResultWriter(experiment).body(ExperimentService(experiment).run()))
    return bodies


@register('determinism_semigroup', 15, "같은 시드/작업자 수로 두 번 실행한 CSV 본문 일치 (다른 줄 수)")
def _determinism_semigroup(ctx):
    first, second = _rerun(ctx, task='semigroup', action='apply', operator='kolmogorov', samples=ctx.n(20000),
                           params={'field': 'bump:1', 't': 0.5, 'x': '0.1,0.2'})
    return _at_most(sum(a != b for a, b in zip(first.splitlines(), second.splitlines())), 0)


@register('determinism_perimeter', 15, "perimeter CSV 본문의 재현성 (다른 줄 수)")
def _determinism_perimeter(ctx):
    first, second = _rerun(ctx, task='perimeter', operator='kolmogorov', samples=ctx.n(5000, 2000),
                           params={'region': 'ball:1', 's': 0.25, 'method': 'mc'})
    return _at_most(sum(a != b for a, b in zip(first.splitlines(), second.splitlines())), 0)


# ============ 실행 ============

def select(level: str = 'core', names: Optional[Sequence[str]] = None) -> List[Check]:
    """수준과 이름으로 검사를 고릅니다. 등록 순서를 유지합니다."""
    if level not in LEVELS:
        raise ValidationError(f"suite는 {', '.join(LEVELS)} 중 하나여야 합니다.", 'suite')
    if isinstance(names, str):
        names = [name.strip() for name in names.split(',') if name.strip()]
    if names:
        unknown = [name for name in names if name not in REGISTRY]
        if unknown:
            raise ValidationError(f"알 수 없는 검사입니다: {', '.join(unknown)}", 'checks')
        return [REGISTRY[name] for name in REGISTRY if name in names]
    return [check for check in REGISTRY.values() if level in check.levels]


def run_suite(level: str = 'core', seed: int = 0xB5EED, workers: int = 4,
              names: Optional[Sequence[str]] = None) -> VerifyReport:
    """검사 모음을 실행합니다.

    Args:
        level: core 또는 full.
        seed: 마스터 시드.
        workers: 작업자 수.
        names: 특정 검사만 실행할 때의 이름 목록 (쉼표 문자열도 허용).

    Returns:
        VerifyReport: 검사별 결과. 실패가 있어도 예외를 올리지 않습니다.
    """
    ctx = CheckContext(level=level, seed=seed, workers=workers)
    report = VerifyReport(level=level, seed=seed, workers=workers)
    for check in select(level, names):
        try:
            measured, tolerance, passed, detail = check.run(ctx)
        except ValidationError as e:
            logger.warning(f"검사 {check.name} 도메인 오류: {e.message}")
            measured, tolerance, passed, detail = math.nan, math.nan, False, e.message
        except Exception as e:  # noqa: BLE001
            logger.error(f"검사 {check.name} 실행 실패: {e}", exc_info=True)
            measured, tolerance, passed, detail = math.nan, math.nan, False, f"{type(e).__name__}: {e}"
        result = CheckResult(name=check.name, criterion=check.criterion, statement=check.statement,
                             measured=measured, tolerance=tolerance, passed=passed, detail=detail)
        report.results.append(result)
        log = logger.info if passed else logger.warning
        log(f"[{'PASS' if passed else 'FAIL'}] {check.name}: {measured:.6g} (허용 {tolerance:.6g})")
    logger.info(f"검증 {level}: {sum(r.passed for r in report.results)}/{len(report.results)} 통과")
    return report
