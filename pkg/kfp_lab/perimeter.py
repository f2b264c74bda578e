"""분수 둘레와 등주 부등식 실험.

Per_s(E) = ‖(−𝒜)^s 1_E‖₁은 열 함량 결손 ‖P_t 1_E − 1_E‖₁의 시간 적분

    Per_s(E) = (s/Γ(1−s)) ∫₀^∞ t^{−1−s} ‖P_t 1_E − 1_E‖₁ dt

로 계산합니다. 결손은 0 ≤ P_t 1_E ≤ 1과 ∫P_t 1_E = e^{−t trB}|E|에서

    ‖P_t 1_E − 1_E‖₁ = (1 + e^{−t trB})|E| − 2∫_E P_t 1_E

이므로 E 안의 균등 표본과 핵 표본만으로 편향 없이 추정됩니다.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf, gamma

from . import operators
from .fields import IndicatorField
from .fractional import FracQuadSpec, frac_constant, frac_image_norms, volume_tail_bound
from .matlin import psd_sqrt
from .operators import DimensionReport, OperatorSpec, adjoint_law, covariance, intrinsic_dimensions
from .regions import Box, Region
from .rng import run_chunks
from .semigroup import DEFAULT_SAMPLES, BoundCheck, MCEstimate
from .validators import (
    ContradictionError,
    DomainError,
    PreconditionError,
    RangeError,
    ValidationError,
    ValidationService,
)

logger = logging.getLogger(__name__)


KEY_DEFICIT = 31
KEY_CROSS = 32
KEY_POINTWISE = 33

FIT_DECADE = 10.0
COVER_SIGMAS = 6.0
HERMITE_NODES = 8
HERMITE_BUDGET = 200_000
GAMMA_GRID = tuple(np.logspace(-4, 4, 161))
DIMENSION_SNAP = 0.05
DEFAULT_DILATIONS = (0.5, 1.0, 2.0)
STAR_TIMES = (1e-3, 1e-2, 1e-1)
STAR_SAMPLES = 4000
STAR_INNER = 128
LIMIT_TIMES = (1e-2, 1e-3, 1e-4)
SWEEP_HEADER = ('measure', 's', 'per_value', 'quad_err', 'mc_err', 'ratio')


def _require_trace(spec: OperatorSpec, what: str):
    if not spec.trace_flag:
        raise PreconditionError(f"{what}은(는) tr B ≥ 0에서만 정의합니다.", 'spec')


def _check_region(spec: OperatorSpec, region: Region):
    if region.dim != spec.dim:
        raise ValidationError(f"영역은 {spec.dim}차원이어야 합니다.", 'region')


def _perimeter_order(s) -> float:
    return ValidationService.validate_order(s, upper=0.5, error_class=RangeError)


# ============ 열 함량 결손 ============

def _overlap(length: float, t: float) -> float:
    """∫₀^L∫₀^L (4πt)^{−1/2} e^{−(x−y)²/4t} dx dy."""
    return (length * erf(length / (2.0 * math.sqrt(t)))
            + 2.0 * math.sqrt(t / math.pi) * math.expm1(-length ** 2 / (4.0 * t)))


def laplace_deficit(box: Box, t: float) -> float:
    """라플라시안에서 상자의 결손 2|E| − 2 Π_i ∫∫ 핵 (정확한 값)."""
    t = ValidationService.validate_time(t)
    lengths = box.hi - box.lo
    return 2.0 * box.measure - 2.0 * math.prod(_overlap(float(L), t) for L in lengths)


def _route(spec: OperatorSpec, region: Region, method: str) -> str:
    exact = spec.is_laplacian and region.as_box() is not None
    if method == 'auto':
        return 'exact' if exact else 'mc'
    if method not in ('mc', 'exact'):
        raise DomainError(f"알 수 없는 method입니다: {method}", 'method')
    if method == 'exact' and not exact:
        raise PreconditionError("exact 결손은 라플라시안과 상자(구간)에서만 계산합니다.", 'method')
    return method


def _hit_samples(spec: OperatorSpec, region: Region, times: np.ndarray, n: int, seed: int,
                 workers: int, keys: Sequence[int]) -> np.ndarray:
    """X ~ U(E)와 대칭 핵 표본 쌍으로 얻은 1_E(Y)의 평균 (n, len(times)).

    모든 시각이 같은 (X, Z)를 공유하므로 열 방향 결합이 공통 난수가 됩니다.
    """
    bundles = [covariance(spec, t) for t in times]

    def kernel(rng, m):
        X = region.sample_uniform(rng, m)
        Z = rng.standard_normal((m, spec.dim))
        out = np.empty((m, len(bundles)))
        for j, bundle in enumerate(bundles):
            mean = X @ bundle.exp_tB.T
            spread = Z @ bundle.sqrt_2tK.T
            out[:, j] = 0.5 * (region.contains(mean + spread).astype(float)
                               + region.contains(mean - spread).astype(float))
        return out

    return run_chunks(kernel, n, seed, workers, keys)


def _deficits_from_hits(spec: OperatorSpec, measure: float, times: np.ndarray, hits: np.ndarray) -> np.ndarray:
    mass = np.exp(-np.asarray(times) * spec.trace)
    return (1.0 + mass) * measure - 2.0 * measure * hits


def heat_content_deficit(spec: OperatorSpec, region: Region, t: float, n: int = DEFAULT_SAMPLES,
                         seed: int = 0, workers: int = 1, method: str = 'auto') -> MCEstimate:
    """‖P_t 1_E − 1_E‖₁.

    바깥 표본(E 안의 점)과 안쪽 표본(핵 추출)은 같은 수로, 점마다 대칭 쌍 하나를
    씁니다. 라플라시안과 상자에서는 축별 닫힌 형태를 곱해 정확히 계산합니다.

    Args:
        spec: 연산자.
        region: 유한 측도 영역 E.
        t: 시간 (> 0).
        n: 표본 수.
        seed: 마스터 시드.
        workers: 병렬 청크 수.
        method: 'mc', 'exact', 'auto'.

    Returns:
        [0, (1 + e^{−t trB})|E|] 범위의 추정값.
    """
    t = ValidationService.validate_time(t)
    _check_region(spec, region)
    if _route(spec, region, method) == 'exact':
        return MCEstimate.exact(laplace_deficit(region.as_box(), t), seed)
    hits = _hit_samples(spec, region, np.array([t]), n, seed, workers, (KEY_DEFICIT,))
    return MCEstimate.from_samples(_deficits_from_hits(spec, region.measure, [t], hits)[:, 0], seed)


def covering_box(spec: OperatorSpec, region: Region, t: float) -> Box:
    """E와 P_t 1_E의 유효 지지를 함께 덮는 상자.

    P_t 1_E(X) > 0인 X는 e^{−tB}E 주변의 수반 법칙 폭 안에 있습니다.
    """
    law = adjoint_law(spec, t)
    lo, hi = region.bbox
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing='ij')).reshape(spec.dim, -1).T
    images = corners @ law.mean_map.T
    pad = COVER_SIGMAS * np.sqrt(np.diag(law.covariance))
    return Box(lo=np.minimum(lo, images.min(axis=0) - pad), hi=np.maximum(hi, images.max(axis=0) + pad))


def deficit_cross_check(spec: OperatorSpec, region: Region, t: float, n: int = DEFAULT_SAMPLES,
                        seed: int = 0, workers: int = 1) -> MCEstimate:
    """덮개 상자 위에서 |P_t 1_E − 1_E|를 직접 적분한 결손.

    1_E(X)로 부호를 알고 있으므로 표본별 값 1_E(1 − hit) + (1 − 1_E)hit는
    편향이 없습니다.
    """
    t = ValidationService.validate_time(t)
    _check_region(spec, region)
    cover = covering_box(spec, region, t)
    bundle = covariance(spec, t)

    def kernel(rng, m):
        X = cover.sample_uniform(rng, m)
        Z = rng.standard_normal((m, spec.dim))
        mean = X @ bundle.exp_tB.T
        spread = Z @ bundle.sqrt_2tK.T
        hit = 0.5 * (region.contains(mean + spread).astype(float) + region.contains(mean - spread).astype(float))
        return cover.measure * np.where(region.contains(X), 1.0 - hit, hit)

    return MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, (KEY_CROSS,)), seed)


# ============ 분수 둘레 ============

@dataclass(frozen=True)
class PerimeterEstimate:
    """분수 둘레 추정 결과.

    Attributes:
        s: 차수 (0, 1/2).
        value: Per_s(E) 추정값.
        quad_error: 구적, 근거리 외삽, 꼬리 오차의 합.
        mc_error: 몬테카를로 표준오차.
        deficit_curve: 적분 노드별 (t, 결손) (오름차순).
        beta: 작은 시간 결손의 거듭제곱 적합 지수.
        measure: |E|.
        n: 표본 수 (정확한 경로는 0).
        seed: 마스터 시드.
        warnings: 외삽 생략 등 경고.
    """
    s: float
    value: float
    quad_error: float
    mc_error: float
    deficit_curve: Tuple[Tuple[float, MCEstimate], ...]
    beta: Optional[float]
    measure: float
    n: int
    seed: int
    warnings: Tuple[str, ...] = ()

    @property
    def std_error(self) -> float:
        return math.hypot(self.quad_error, self.mc_error)

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.deficit_curve])

    @property
    def deficits(self) -> np.ndarray:
        return np.array([d.value for _, d in self.deficit_curve])

    def as_estimate(self) -> MCEstimate:
        return MCEstimate(self.value, self.std_error, self.n, self.seed)

    def to_dict(self) -> dict:
        return {
            's': self.s,
            'value': self.value,
            'quad_error': self.quad_error,
            'mc_error': self.mc_error,
            'beta': self.beta,
            'measure': self.measure,
            'n': self.n,
            'seed': self.seed,
            'warnings': list(self.warnings),
            'deficit_curve': [{'t': t, 'value': d.value, 'std_error': d.std_error} for t, d in self.deficit_curve],
        }


def near_extrapolation(times: np.ndarray, means: np.ndarray, s: float, t_min: float):
    """[0, t_min] 구간의 ∫ t^{−1−s} d(t) dt를 가장 작은 10배 구간의 거듭제곱 적합으로 외삽합니다.

    Returns:
        (값, 불확실도, β, 경고) 튜플. β ≤ s면 외삽을 생략합니다.
    """
    mask = (times <= FIT_DECADE * t_min) & (means > 0.0)
    if np.count_nonzero(mask) < 2:
        return 0.0, 0.0, None, "작은 시간 결손이 양수가 아니어서 근거리 외삽을 생략했습니다."
    beta, intercept = np.polyfit(np.log(times[mask]), np.log(means[mask]), 1)
    beta = float(beta)
    if beta <= s:
        return 0.0, 0.0, beta, f"결손 지수 β={beta:.3g} ≤ s={s:g}: 근거리 외삽을 생략했습니다."
    value = math.exp(intercept) * t_min ** (beta - s) / (beta - s)
    first = int(np.argmax(mask))
    anchored = means[first] * (t_min / times[first]) ** beta * t_min ** (-s) / (beta - s)
    return value, abs(value - anchored), beta, None


def _tail_pieces(spec: OperatorSpec, measure: float, s: float, tail_cut: float) -> Tuple[float, float]:
    """[T₁, ∞)의 결손 ≈ (1 + e^{−t trB})|E| 기여와 그 오차 상한."""
    tail = (1.0 + math.exp(-tail_cut * spec.trace)) * measure * tail_cut ** (-s) / s
    remainder = volume_tail_bound(spec, tail_cut, -1.0 - s)
    bound = 2.0 * operators.kernel_constant(spec.dim) * measure ** 2 * remainder
    if not math.isfinite(bound):
        bound = 2.0 * measure * tail_cut ** (-s) / s
    return tail, bound


def _quad_weights(quad: FracQuadSpec):
    s = quad.s
    times, weights = quad.nodes()
    coarse_times, coarse_weights = quad.coarse_nodes()
    all_times = np.concatenate([times, coarse_times])
    fine_w = np.concatenate([weights * times ** (-1.0 - s), np.zeros(coarse_times.size)])
    coarse_w = np.concatenate([np.zeros(times.size), coarse_weights * coarse_times ** (-1.0 - s)])
    return times, all_times, fine_w, coarse_w


def _assemble(spec, region, quad, times, fine, coarse, curve, n, seed, scale=1.0, offset=0.0):
    s = quad.s
    c = frac_constant(s)
    means = np.array([d.value for d in curve])
    near, near_error, beta, warning = near_extrapolation(times, means, s, quad.t_min)
    warnings = ()
    if warning:
        logger.warning(warning)
        warnings = (warning,)
    tail, tail_bound = _tail_pieces(spec, region.measure, s, quad.tail_cut)
    value = scale * c * (fine.value + near + tail) - offset
    quad_error = scale * c * (abs(fine.value - coarse) + near_error + tail_bound)
    return PerimeterEstimate(
        s=s, value=value, quad_error=quad_error, mc_error=scale * c * fine.std_error,
        deficit_curve=tuple(zip((float(t) for t in times), curve)),
        beta=beta, measure=region.measure, n=n, seed=seed, warnings=warnings,
    )


def frac_perimeter(spec: OperatorSpec, region: Region, s: float, quad: Optional[FracQuadSpec] = None,
                   n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                   method: str = 'auto') -> PerimeterEstimate:
    """Per_s(E) = ‖(−𝒜)^s 1_E‖₁.

    모든 적분 노드의 결손을 같은 표본으로 추정하므로 표본 하나가 시간 적분
    전체의 한 실현값이 됩니다. [0, t_min]은 거듭제곱 적합으로, [T₁, ∞)는
    (1 + e^{−t trB})|E| 꼬리로 처리합니다.

    Args:
        spec: tr B ≥ 0인 연산자.
        region: 유한 측도 영역.
        s: 차수 (0, 1/2).
        quad: 시간 적분 설정.
        n: 표본 수.
        seed: 마스터 시드.
        workers: 병렬 청크 수.
        method: 'mc', 'exact'(라플라시안과 상자), 'auto'.

    Raises:
        RangeError: s ∉ (0, 1/2). s ≥ 1/2에서는 둘레가 무한합니다.
        PreconditionError: tr B < 0.
    """
    s = _perimeter_order(s)
    _require_trace(spec, "분수 둘레")
    _check_region(spec, region)
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    times, all_times, fine_w, coarse_w = _quad_weights(quad)
    if _route(spec, region, method) == 'exact':
        box = region.as_box()
        deficits = np.array([laplace_deficit(box, t) for t in all_times])
        fine = MCEstimate.exact(float(deficits @ fine_w), seed)
        coarse = float(deficits @ coarse_w)
        curve = [MCEstimate.exact(d, seed) for d in deficits[:times.size]]
        n = 0
    else:
        hits = _hit_samples(spec, region, all_times, n, seed, workers, (KEY_DEFICIT,))
        samples = _deficits_from_hits(spec, region.measure, all_times, hits)
        fine = MCEstimate.from_samples(samples @ fine_w, seed)
        coarse = float(np.mean(samples @ coarse_w))
        curve = [MCEstimate.from_samples(samples[:, j], seed) for j in range(times.size)]
    estimate = _assemble(spec, region, quad, times, fine, coarse, curve, n, seed)
    logger.info(
        f"분수 둘레: s={s:g}, |E|={region.measure:.4g}, 값={estimate.value:.6g}, "
        f"구적={estimate.quad_error:.2g}, MC={estimate.mc_error:.2g}"
    )
    return estimate


def pointwise_perimeter(spec: OperatorSpec, region: Region, s: float, quad: Optional[FracQuadSpec] = None,
                        n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> PerimeterEstimate:
    """점별 g = (−𝒜)^s 1_E로 계산한 ‖g‖₁.

    g는 E 위에서 0 이상, E 밖에서 0 이하이고 ∫g = (tr B)^s|E|이므로
    ‖g‖₁ = 2∫_E g − (tr B)^s|E|입니다. E 안의 점 X마다
    g(X) = (s/Γ(1−s)) ∫ t^{−1−s}(1 − P_t 1_E(X)) dt를 공통 난수로 추정합니다.
    결손 경로와 다른 스트림을 쓰며, 분산은 s < 1/4에서 유한합니다.
    """
    s = _perimeter_order(s)
    _require_trace(spec, "분수 둘레")
    _check_region(spec, region)
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    times, all_times, fine_w, coarse_w = _quad_weights(quad)
    measure = region.measure
    misses = 2.0 * measure * (1.0 - _hit_samples(spec, region, all_times, n, seed, workers, (KEY_POINTWISE,)))
    fine = MCEstimate.from_samples(misses @ fine_w, seed)
    coarse = float(np.mean(misses @ coarse_w))
    curve = [MCEstimate.from_samples(misses[:, j], seed) for j in range(times.size)]
    # E 안의 꼬리는 2|E| T₁^{−s}/s이고 _assemble은 (1 + e^{−T₁ trB})|E| T₁^{−s}/s를 더합니다
    tail_gap = frac_constant(s) * -math.expm1(-quad.tail_cut * spec.trace) * measure * quad.tail_cut ** (-s) / s
    offset = max(spec.trace, 0.0) ** s * measure - tail_gap
    return _assemble(spec, region, quad, times, fine, coarse, curve, n, seed, offset=offset)


# ============ 하한, 보간 부등식 ============

@dataclass(frozen=True)
class DeficitLowerReport:
    """‖P_t 1_E − 1_E‖₁ ≥ |E| − (b_N / V(t/2)) e^{−t trB/4} |E|² 검사 결과."""
    t: float
    lhs: MCEstimate
    rhs: float

    @property
    def margin(self) -> float:
        return self.lhs.value - self.rhs

    @property
    def ok(self) -> bool:
        return self.margin >= -4.0 * self.lhs.std_error - 1e-12 * abs(self.rhs)

    def to_dict(self) -> dict:
        return {'t': self.t, 'lhs': self.lhs.value, 'lhs_err': self.lhs.std_error, 'rhs': self.rhs,
                'margin': self.margin, 'ok': self.ok}


def below_constant(N: int) -> float:
    """b_N = 2 a_N."""
    return 2.0 * operators.square_constant(N)


def deficit_lower_gap(spec: OperatorSpec, region: Region, t: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
                      workers: int = 1, method: str = 'auto') -> DeficitLowerReport:
    """결손의 하한을 검사합니다.

    Raises:
        PreconditionError: tr B < 0.
    """
    t = ValidationService.validate_time(t)
    _require_trace(spec, "결손 하한")
    measure = region.measure
    V = covariance(spec, 0.5 * t).V
    rhs = measure - below_constant(spec.dim) / V * math.exp(-0.25 * t * spec.trace) * measure ** 2
    lhs = heat_content_deficit(spec, region, t, n, seed, workers, method)
    report = DeficitLowerReport(t=t, lhs=lhs, rhs=rhs)
    logger.info(f"결손 하한: t={t:g}, 결손={lhs.value:.6g}, 하한={rhs:.6g}, 여유={report.margin:.3g}")
    return report


perbelow_gap = deficit_lower_gap


def square_constant_gap(spec: OperatorSpec, Y, t: float, nodes: int = HERMITE_NODES) -> float:
    """가우스-에르미트 구적으로 계산한 ∫p(X, Y, t)² dX와 a_N e^{−t trB}/V(t)의 상대 차이.

    X = e^{−tB}Y + Σ^{1/2}u (Σ는 수반 법칙 공분산)로 치환하면 p²가 e^{−|u|²}에
    비례하므로 텐서 곱 규칙이 정확합니다.
    """
    t = ValidationService.validate_time(t)
    Y = ValidationService.validate_point(Y, spec.dim)
    N = spec.dim
    nodes = max(2, min(int(nodes), int(HERMITE_BUDGET ** (1.0 / N))))
    bundle = covariance(spec, t)
    law = adjoint_law(spec, t)
    root = psd_sqrt(law.covariance)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    grid = np.array(np.meshgrid(*([x] * N), indexing='ij')).reshape(N, -1).T
    weight = np.prod(np.array(np.meshgrid(*([w] * N), indexing='ij')).reshape(N, -1), axis=0)
    X = law.mean_map @ Y + grid @ root.T
    diff = Y - X @ bundle.exp_tB.T
    m2 = np.einsum('ij,ij->i', diff, np.linalg.solve(bundle.K, diff.T).T)
    p = operators.kernel_constant(N) / bundle.V * np.exp(-m2 / (4.0 * t))
    integral = float(np.linalg.det(root) * np.sum(weight * p ** 2 * np.exp(np.sum(grid ** 2, axis=1))))
    expected = operators.square_constant(N) * math.exp(-t * spec.trace) / bundle.V
    gap = abs(integral - expected) / expected
    logger.debug(f"∫p² 구적: {integral:.12g}, a_N e^{{−t trB}}/V = {expected:.12g}, 차이={gap:.2e}")
    return gap


def _snap(D: float) -> float:
    rounded = round(D)
    return float(rounded) if abs(D - rounded) < DIMENSION_SNAP else float(D)


def volume_gamma(spec: OperatorSpec, D0: float, Dinf: Optional[float] = None,
                 grid: Sequence[float] = GAMMA_GRID) -> float:
    """γ = inf_t V(t) / min{t^{D₀/2}, t^{D∞/2}} (격자 위 최솟값)."""
    Dinf = D0 if Dinf is None else Dinf
    ratios = [covariance(spec, t).V / min(t ** (0.5 * D0), t ** (0.5 * Dinf)) for t in grid]
    return float(min(ratios))


@dataclass(frozen=True)
class _Regime:
    D0: float
    Dinf: float
    crossing: bool
    C1: float
    C2: float
    gamma: float


def _regime(spec: OperatorSpec, s: float, dims: Optional[DimensionReport]) -> _Regime:
    dims = dims or intrinsic_dimensions(spec)
    D0, Dinf = _snap(dims.D0), _snap(dims.Dinf)
    C1 = 2.0 / gamma(1.0 + s)
    b = below_constant(spec.dim)
    if dims.regime == 'homogeneous':
        g = volume_gamma(spec, D0)
        return _Regime(D0, D0, False, C1, b / g * 2.0 ** (0.5 * D0), g)
    if dims.regime == 'crossing':
        g = volume_gamma(spec, D0, Dinf)
        return _Regime(D0, Dinf, True, C1, b / g * 2.0 ** (0.5 * D0), g)
    raise PreconditionError(
        f"D₀={D0:g} < D∞={Dinf:g}인 확장 영역에서는 보간 부등식을 세우지 않습니다.", 'spec',
    )


def _single_constant(s: float, D: float, C1: float, C2: float) -> float:
    kappa = 1.0 + 2.0 * s / D
    return kappa ** (-(D + 2.0 * s) / D) / C1 * (D * C2 / (2.0 * s)) ** (-2.0 * s / D)


def _two_regime_constant(s: float, regime: _Regime) -> float:
    D0, Dinf = regime.D0, regime.Dinf
    c = gamma(1.0 + s) / (4.0 * s) * regime.C2
    middle = 1.0 / (regime.C1 + 4.0 * s / (gamma(1.0 + s) * Dinf))
    kappa = middle / (c * D0)
    a0 = (D0 - 2.0 * s) / D0
    third = middle * min(1.0, kappa ** (1.0 - a0))
    return min(_single_constant(s, D0, regime.C1, regime.C2),
               _single_constant(s, Dinf, regime.C1, regime.C2), third)


def isoperimetric_constant(spec: OperatorSpec, s: float, dims: Optional[DimensionReport] = None) -> float:
    """Per_s(E) ≥ i · |E|^{(D−2s)/D} (교차 영역은 min{|E|^{a₀}, |E|^{a∞}})의 상수 i.

    Raises:
        RangeError: s ∉ (0, 1/2).
        PreconditionError: tr B < 0이거나 D₀ < D∞.
    """
    s = _perimeter_order(s)
    _require_trace(spec, "등주 상수")
    regime = _regime(spec, s, dims)
    if regime.crossing:
        return _two_regime_constant(s, regime)
    return _single_constant(s, regime.D0, regime.C1, regime.C2)


@dataclass(frozen=True)
class InterpolationResult:
    """|E| ≤ H(t) = C₁ Per_s t^s + C₂ |E|² max{t^{−D₀/2}, t^{−D∞/2}} 최적화 결과.

    Attributes:
        case: 'single' 또는 두 영역의 'i', 'ii', 'iii'.
        t_star: 닫힌 형태 최적 시각.
        t_numeric: 황금분할 탐색으로 찾은 최적 시각.
        gap: |t_numeric − t_star| / t_star.
        h_min: H(t_star).
        constant: 이론 등주 상수.
        ratio: Per_s / |E|^{(D−2s)/D} (교차 영역은 min 정규화).
    """
    s: float
    measure: float
    per_value: float
    case: str
    t_star: float
    t_numeric: float
    gap: float
    h_min: float
    constant: float
    ratio: float

    @property
    def holds(self) -> bool:
        return self.measure <= self.h_min * (1.0 + 1e-9)

    def to_dict(self) -> dict:
        return {
            's': self.s,
            'measure': self.measure,
            'per_value': self.per_value,
            'case': self.case,
            't_star': self.t_star,
            't_numeric': self.t_numeric,
            'gap': self.gap,
            'h_min': self.h_min,
            'constant': self.constant,
            'ratio': self.ratio,
            'holds': self.holds,
        }


def _golden_minimizer(H) -> float:
    result = minimize_scalar(lambda u: H(math.exp(u)), bracket=(-30.0, 30.0), method='golden',
                             options={'xtol': 1e-10})
    return math.exp(float(result.x))


def normalized_ratio(per_value: float, measure: float, s: float, D0: float, Dinf: Optional[float] = None) -> float:
    """Per_s / min{|E|^{(D₀−2s)/D₀}, |E|^{(D∞−2s)/D∞}}."""
    Dinf = D0 if Dinf is None else Dinf
    return per_value / min(measure ** ((D0 - 2.0 * s) / D0), measure ** ((Dinf - 2.0 * s) / Dinf))


def interpolation_bound(spec: OperatorSpec, measure: float, s: float, per_value: float,
                        dims: Optional[DimensionReport] = None) -> InterpolationResult:
    """보간 부등식 |E| ≤ min_t H(t)를 닫힌 형태와 수치 최적화로 함께 풉니다.

    Args:
        spec: tr B ≥ 0인 연산자.
        measure: |E| (> 0).
        s: 차수 (0, 1/2).
        per_value: Per_s(E) 추정값.
        dims: 미리 계산한 내재 차원.

    Raises:
        ContradictionError: |E| > 0인데 Per_s(E) = 0인 경우.
        PreconditionError: tr B < 0이거나 D₀ < D∞.
    """
    s = _perimeter_order(s)
    measure = ValidationService.validate_time(measure, 'measure')
    _require_trace(spec, "보간 부등식")
    per_value = float(per_value)
    if per_value < 0.0:
        raise DomainError("Per_s는 음수일 수 없습니다.", 'per_value')
    if per_value == 0.0:
        raise ContradictionError("|E| > 0인데 Per_s(E) = 0입니다. 보간 부등식과 모순됩니다.", 'per_value')
    regime = _regime(spec, s, dims)
    C1, C2, D0, Dinf = regime.C1, regime.C2, regime.D0, regime.Dinf

    if not regime.crossing:
        def H(t):
            return C1 * per_value * t ** s + C2 * measure ** 2 * t ** (-0.5 * D0)

        case = 'single'
        t_star = (D0 * C2 * measure ** 2 / (2.0 * s * C1 * per_value)) ** (2.0 / (D0 + 2.0 * s))
        constant = _single_constant(s, D0, C1, C2)
    else:
        def H(t):
            return C1 * per_value * t ** s + C2 * measure ** 2 * max(t ** (-0.5 * D0), t ** (-0.5 * Dinf))

        c = gamma(1.0 + s) / (4.0 * s) * C2
        A0 = c * D0 * measure ** 2 / per_value
        Ainf = c * Dinf * measure ** 2 / per_value
        if A0 <= 1.0:
            case, t_star = 'i', A0 ** (2.0 / (D0 + 2.0 * s))
        elif Ainf >= 1.0:
            case, t_star = 'ii', Ainf ** (2.0 / (Dinf + 2.0 * s))
        else:
            case, t_star = 'iii', 1.0
        constant = _two_regime_constant(s, regime)

    t_numeric = _golden_minimizer(H)
    result = InterpolationResult(
        s=s, measure=measure, per_value=per_value, case=case, t_star=t_star, t_numeric=t_numeric,
        gap=abs(t_numeric - t_star) / t_star, h_min=H(t_star), constant=constant,
        ratio=normalized_ratio(per_value, measure, s, D0, Dinf),
    )
    if not result.holds:
        logger.warning(f"보간 부등식 위반: |E|={measure:.6g} > H(t*)={result.h_min:.6g} (경우 {case})")
    logger.info(f"보간 부등식: 경우={case}, t*={t_star:.6g}, 수치 t={t_numeric:.6g}, 비={result.ratio:.4g}")
    return result


# ============ 등주 비 스윕, BBM 상한 ============

@dataclass(frozen=True)
class SweepRow:
    measure: float
    s: float
    per_value: float
    quad_err: float
    mc_err: float
    ratio: float

    @property
    def error(self) -> float:
        return math.hypot(self.quad_err, self.mc_err)

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in SWEEP_HEADER}


@dataclass(frozen=True)
class SweepResult:
    """확대 가족 위의 등주 비.

    Attributes:
        rows: 가족 구성원별 결과 (측도 오름차순).
        constant: 이론 등주 상수.
        homogeneous: 동차 연산자이면 적응 확대 가족에서 비가 일정해야 합니다.
        adapted: 연산자의 확대 가중치로 만든 가족인지 여부.
    """
    rows: Tuple[SweepRow, ...]
    constant: float
    homogeneous: bool
    adapted: bool = True

    @property
    def min_ratio(self) -> float:
        return min(row.ratio for row in self.rows)

    @property
    def holds(self) -> bool:
        return all(row.ratio + 4.0 * row.error / row.per_value * row.ratio >= self.constant for row in self.rows)

    @property
    def consistent(self) -> bool:
        """동차 연산자의 적응 확대 가족에서 모든 쌍의 비 차이가 결합 오차 4배 안에 있는지."""
        if not (self.homogeneous and self.adapted):
            return True
        scaled = [(row.ratio, row.ratio * row.error / row.per_value) for row in self.rows]
        return all(
            abs(a - b) <= 4.0 * math.hypot(ea, eb) + 1e-9 * abs(a)
            for i, (a, ea) in enumerate(scaled) for b, eb in scaled[i + 1:]
        )

    @property
    def spread(self) -> float:
        """최대 비 / 최소 비."""
        return max(row.ratio for row in self.rows) / self.min_ratio

    def to_rows(self) -> List[dict]:
        return [row.to_dict() for row in self.rows]

    def to_dict(self) -> dict:
        return {
            'rows': self.to_rows(),
            'constant': self.constant,
            'min_ratio': self.min_ratio,
            'homogeneous': self.homogeneous,
            'adapted': self.adapted,
            'spread': self.spread,
            'consistent': self.consistent,
            'holds': self.holds,
        }


def dilation_family(spec: OperatorSpec, region: Region, lams: Sequence[float],
                    weights: Optional[Sequence[float]] = None) -> List[Region]:
    """δ_λ(E) 가족.

    weights를 주면 연산자의 확대 가중치 대신 사용합니다. 둘 다 없으면 등방 배율을 씁니다.
    """
    if weights is None:
        weights = spec.dilation_weights
    if weights is None:
        logger.info(f"{spec.name or '연산자'}: 확대 가중치가 없어 등방 배율을 사용합니다.")
        weights = (1.0,) * spec.dim
    if len(weights) != spec.dim:
        raise DomainError(f"확대 가중치는 {spec.dim}개여야 합니다.", 'weights')
    return [region.dilate(weights, ValidationService.validate_time(lam, 'lam')) for lam in lams]


def _is_adapted(spec: OperatorSpec, weights: Optional[Sequence[float]]) -> bool:
    if weights is None:
        return True
    return spec.dilation_weights is not None and tuple(float(w) for w in weights) == spec.dilation_weights


def iso_ratio_sweep(spec: OperatorSpec, family: Union[Region, Sequence[Region]], s: float,
                    lams: Sequence[float] = DEFAULT_DILATIONS, n: int = DEFAULT_SAMPLES, seed: int = 0,
                    workers: int = 1, method: str = 'auto', quad: Optional[FracQuadSpec] = None,
                    weights: Optional[Sequence[float]] = None) -> SweepResult:
    """영역 가족마다 Per_s와 정규화 비를 계산합니다.

    Args:
        family: 영역 목록, 또는 lams 배율로 확대할 기준 영역 하나.
        lams: family가 영역 하나일 때의 확대 배율.
        weights: 확대 가중치 (기본값: 연산자의 가중치).

    영역 목록이나 연산자와 다른 가중치로 만든 가족은 적응 확대가 아니므로 비의
    일정성을 판정하지 않고 기록만 합니다.
    """
    s = _perimeter_order(s)
    _require_trace(spec, "등주 비")
    if isinstance(family, Region):
        members, adapted = dilation_family(spec, family, lams, weights), _is_adapted(spec, weights)
    else:
        members, adapted = list(family), False
    if not members:
        raise DomainError("영역 가족이 비어 있습니다.", 'family')
    dims = intrinsic_dimensions(spec)
    regime = _regime(spec, s, dims)
    rows = []
    for member in sorted(members, key=lambda r: r.measure):
        estimate = frac_perimeter(spec, member, s, quad, n, seed, workers, method)
        rows.append(SweepRow(
            measure=member.measure, s=s, per_value=estimate.value,
            quad_err=estimate.quad_error, mc_err=estimate.mc_error,
            ratio=normalized_ratio(estimate.value, member.measure, s, regime.D0, regime.Dinf),
        ))
    result = SweepResult(rows=tuple(rows), constant=isoperimetric_constant(spec, s, dims),
                         homogeneous=not regime.crossing, adapted=adapted)
    logger.info(f"등주 비 스윕: s={s:g}, 최소 비={result.min_ratio:.4g}, 상수={result.constant:.4g}")
    if not result.consistent:
        logger.warning("동차 연산자인데 확대 가족의 등주 비가 오차 밖에서 다릅니다.")
    return result


@dataclass(frozen=True)
class BBMReport:
    """Per_s(E) ≤ 2^{1−2s}(s/Γ(1−s))|E|^{1−2s} S^{2s}(1/(1/2−s) + 1/s) 검사 결과.

    Attributes:
        lhs: 분수 둘레 추정.
        rhs: 우변.
        sup_rate: S = sup_τ τ^{−1/2} ‖P_τ 1_E − 1_E‖₁ (결손 격자 위).
        asymptote_ratio: (1/2 − s) Per_s / sup_τ (4πτ)^{−1/2} 결손. s → 1/2에서 1로 갑니다.
    """
    lhs: PerimeterEstimate
    rhs: MCEstimate
    sup_rate: MCEstimate
    asymptote_ratio: float

    @property
    def check(self) -> BoundCheck:
        return BoundCheck(self.lhs.as_estimate(), self.rhs)

    @property
    def ok(self) -> bool:
        return self.check.ok

    def to_dict(self) -> dict:
        data = self.check.to_dict()
        data.update({'s': self.lhs.s, 'sup_rate': self.sup_rate.value, 'asymptote_ratio': self.asymptote_ratio})
        return data


def bbm_upper_bound(spec: OperatorSpec, region: Region, s: float, quad: Optional[FracQuadSpec] = None,
                    n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                    method: str = 'auto') -> BBMReport:
    """결손의 √τ 증가율로 분수 둘레를 위에서 누릅니다."""
    estimate = frac_perimeter(spec, region, s, quad, n, seed, workers, method)
    s = estimate.s
    rates = [d.scaled(t ** -0.5) for t, d in estimate.deficit_curve]
    sup_rate = max(rates, key=lambda rate: rate.value)
    S = sup_rate.value
    if S <= 0.0:
        raise ContradictionError("결손 증가율이 0입니다.", 'region')
    factor = (2.0 ** (1.0 - 2.0 * s) * frac_constant(s) * region.measure ** (1.0 - 2.0 * s)
              * (1.0 / (0.5 - s) + 1.0 / s))
    rhs_value = factor * S ** (2.0 * s)
    rhs = MCEstimate(rhs_value, rhs_value * 2.0 * s * sup_rate.std_error / S, sup_rate.n, seed)
    asymptote = (0.5 - s) * estimate.value / (S / math.sqrt(4.0 * math.pi))
    report = BBMReport(lhs=estimate, rhs=rhs, sup_rate=sup_rate, asymptote_ratio=asymptote)
    logger.info(f"BBM 상한: s={s:g}, Per_s={estimate.value:.6g}, 상한={rhs_value:.6g}, 점근 비={asymptote:.4g}")
    return report


# ============ 보조 검사 ============

@dataclass(frozen=True)
class StarPerimeterReport:
    """sup_t ‖(−𝒜)^s P_t 1_E‖₁ (격자 위)."""
    times: Tuple[float, ...]
    norms: Tuple[MCEstimate, ...]

    @property
    def value(self) -> MCEstimate:
        return max(self.norms, key=lambda norm: norm.value)

    def to_dict(self) -> dict:
        return {'times': list(self.times), 'norms': [norm.value for norm in self.norms],
                'value': self.value.value, 'std_error': self.value.std_error}


def star_perimeter(spec: OperatorSpec, region: Region, s: float, times: Sequence[float] = STAR_TIMES,
                   n: int = STAR_SAMPLES, seed: int = 0, workers: int = 1,
                   inner: int = STAR_INNER) -> StarPerimeterReport:
    """P_t 1_E를 거친 분수 둘레의 상한 sup_t ‖(−𝒜)^s P_t 1_E‖₁.

    라플라시안과 상자에서는 P_t 1_E가 닫힌 형태라 빠르고, 그 밖에는 점마다
    inner 쌍의 핵 표본을 씁니다.
    """
    s = _perimeter_order(s)
    _require_trace(spec, "분수 둘레")
    _check_region(spec, region)
    times = tuple(sorted(ValidationService.validate_time(t) for t in times))
    norms = frac_image_norms(spec, IndicatorField(region), s, times, 1, n, seed, workers, inner=inner)
    report = StarPerimeterReport(times=times, norms=tuple(norms))
    logger.info(f"sup_t ‖(−𝒜)^s P_t 1_E‖₁: s={s:g}, 값={report.value.value:.6g}")
    return report


def deficit_upper_check(estimate: PerimeterEstimate, max_time: Optional[float] = None) -> List[BoundCheck]:
    """결손마다 ‖P_t 1_E − 1_E‖₁ ≤ (2t^s/Γ(1+s)) Per_s(E)를 검사합니다."""
    factor = 2.0 / gamma(1.0 + estimate.s)
    checks = []
    for t, deficit in estimate.deficit_curve:
        if max_time is not None and t > max_time:
            break
        rhs = MCEstimate(factor * t ** estimate.s * estimate.value,
                         factor * t ** estimate.s * estimate.std_error, estimate.n, estimate.seed)
        checks.append(BoundCheck(deficit, rhs))
    failed = [check for check in checks if not check.ok]
    if failed:
        logger.warning(f"결손 상한 위반 {len(failed)}건 (최대 비 {max(c.ratio for c in failed):.4g})")
    return checks


def classical_limit(spec: OperatorSpec, region: Region, times: Sequence[float] = LIMIT_TIMES,
                    n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                    method: str = 'auto') -> List[Tuple[float, MCEstimate]]:
    """√(π/t) ‖P_t 1_E − 1_E‖₁. t → 0에서 2 Per(E)로 수렴합니다 (구간이면 4).

    Raises:
        PreconditionError: 라플라시안이 아닌 경우.
    """
    if not spec.is_laplacian:
        raise PreconditionError("고전 둘레 극한은 라플라시안에서만 검사합니다.", 'spec')
    values = []
    for t in times:
        t = ValidationService.validate_time(t)
        deficit = heat_content_deficit(spec, region, t, n, seed, workers, method)
        values.append((t, deficit.scaled(math.sqrt(math.pi / t))))
    return values
