"""분수 거듭제곱 (−𝒜)^s, 리스 퍼텐셜 ℐ_α와 그 항등식.

모든 시간 적분은 t = e^u 치환 후 단위 폭 패널의 가우스-르장드르 합성 규칙으로
계산하고, [0, t_min] 구간은 1차 전개로, [T₁, ∞) 구간은 해석적 꼬리 또는
V(t) 감쇠에서 얻은 상한으로 처리합니다.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import erf, gamma

from . import operators
from .fields import GaussianField, ScalarField
from .operators import OperatorSpec, covariance, intrinsic_dimensions
from .rng import run_chunks
from .semigroup import (
    DEFAULT_IMAGE_SAMPLES,
    DEFAULT_SAMPLES,
    GaussianMixture,
    MCEstimate,
    forward_paths,
    heat_image,
    lp_distance,
    z_score,
)
from .validators import (
    DivergentPotentialError,
    DomainError,
    InconsistencyError,
    InsufficientCutoffError,
    PreconditionError,
    ValidationError,
    ValidationService,
)

logger = logging.getLogger(__name__)


DEFAULT_T_MIN = 2e-5
DEFAULT_SPLIT = 1.0
DEFAULT_TAIL_CUT = 1e8
DEFAULT_NODES = 8
DEFAULT_TOLERANCE = 1e-2
CUTOFF_SHARE = 0.1
DIVERGENCE_MARGIN = 0.01
PROFILE_POINTS = 1200
MC_PROFILE_POINTS = 400
PROFILE_BATCHES = 20
TAIL_DOUBLINGS = 48
SIGMA_GRID = (0.01, 0.1, 1.0, 10.0)
LEDOUX_SLACK = 5.0
KEY_FRACTION = 21
KEY_PROFILE = 22
KEY_COMMUTE = 23
KEY_NORM = 24


def frac_constant(s: float) -> float:
    """Balakrishnan 정규화 상수 s/Γ(1 − s)."""
    return s / gamma(1.0 - s)


@lru_cache(maxsize=64)
def log_nodes(t_min: float, split: float, tail_cut: float, near_nodes: int, far_nodes: int):
    """[t_min, tail_cut]의 로그 치환 합성 가우스-르장드르 노드와 dt 가중치."""
    times, weights = [], []
    for lo, hi, order in ((math.log(t_min), math.log(split), near_nodes),
                          (math.log(split), math.log(tail_cut), far_nodes)):
        panels = max(1, int(math.ceil(hi - lo)))
        x, w = np.polynomial.legendre.leggauss(order)
        edges = np.linspace(lo, hi, panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            u = 0.5 * (b - a) * x + 0.5 * (a + b)
            times.append(np.exp(u))
            weights.append(0.5 * (b - a) * w * np.exp(u))
    times, weights = np.concatenate(times), np.concatenate(weights)
    times.setflags(write=False)
    weights.setflags(write=False)
    return times, weights


@dataclass(frozen=True)
class FracQuadSpec:
    """시간 적분 이산화 설정.

    Attributes:
        s: 차수 (0, 1).
        split: 근거리/원거리 구간 경계 T₀.
        near_nodes: 근거리 패널당 노드 수.
        far_nodes: 원거리 패널당 노드 수.
        tail_cut: 해석적 꼬리로 넘기는 시각 T₁.
        t_min: 1차 전개로 처리하는 시각.
        tolerance: 목표 허용 오차 (꼬리 상한은 이 값의 10% 이하여야 함).
    """
    s: float
    split: float = DEFAULT_SPLIT
    near_nodes: int = DEFAULT_NODES
    far_nodes: int = DEFAULT_NODES
    tail_cut: float = DEFAULT_TAIL_CUT
    t_min: float = DEFAULT_T_MIN
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        ValidationService.validate_order(self.s)
        if not 0.0 < self.t_min < self.split < self.tail_cut:
            raise DomainError("0 < t_min < split < tail_cut 이어야 합니다.", 'split')
        if self.near_nodes < 2 or self.far_nodes < 2:
            raise DomainError("패널당 노드 수는 2 이상이어야 합니다.", 'near_nodes')

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        return log_nodes(self.t_min, self.split, self.tail_cut, self.near_nodes, self.far_nodes)

    def coarse_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """구적 오차 추정용 저차 규칙."""
        return log_nodes(self.t_min, self.split, self.tail_cut,
                         max(2, self.near_nodes // 2), max(2, self.far_nodes // 2))


@dataclass(frozen=True)
class FracEstimate(MCEstimate):
    """구적 오차와 MC 오차를 함께 담은 추정값 (std_error는 둘의 합성)."""
    mc_error: float = 0.0
    quad_error: float = 0.0
    tail_bound: float = 0.0

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update({'mc_error': self.mc_error, 'quad_error': self.quad_error, 'tail_bound': self.tail_bound})
        return data


def _estimate(value, mc_error, quad_error, n, seed, tail_bound=0.0) -> FracEstimate:
    return FracEstimate(
        value=float(value), std_error=math.hypot(mc_error, quad_error), n=n, seed=seed,
        mc_error=float(mc_error), quad_error=float(quad_error), tail_bound=float(tail_bound),
    )


# ============ 꼬리 상한 ============

def volume_tail_bound(spec: OperatorSpec, start: float, power: float) -> float:
    """∫_{start}^∞ t^{power} / V(t) dt의 상한.

    V는 단조 증가하므로 배가 격자 [t_k, 2t_k]마다 V(t_k)로 나눈 값을 더합니다.
    마지막 점 이후는 마지막 배가 구간의 V 증가 지수로 외삽하며, 그 지수가
    power + 1 이하이면 발산으로 보고 inf를 반환합니다.

    V(t)를 계산할 수 없거나 유한한 양수가 아니거나 더 이상 증가하지 않는
    시각에서 배가를 멈추고, 그 직전까지의 격자로 외삽합니다.
    """
    total, t, V, growth = 0.0, start, None, 0.0
    for _ in range(TAIL_DOUBLINGS):
        try:
            current = covariance(spec, t).V
        except ValidationError as e:
            logger.debug(f"꼬리 상한 배가 중단 (t={t:g}): {e.message}")
            break
        if not (math.isfinite(current) and current > 0.0) or (V is not None and current <= V):
            logger.debug(f"꼬리 상한 배가 중단 (t={t:g}): V={current:.3e}")
            break
        if V is not None:
            growth = math.log2(current / V)
        V = current
        total += _power_integral(t, 2.0 * t, power) / V
        t *= 2.0
    if V is None or growth <= power + 1.0:
        return math.inf
    return total + t ** (power + 1.0) / (V * (growth - power - 1.0))


def _power_integral(a: float, b: float, power: float) -> float:
    if power == -1.0:
        return math.log(b / a)
    return (b ** (power + 1.0) - a ** (power + 1.0)) / (power + 1.0)


def _cutoff_bound(spec: OperatorSpec, f: ScalarField, s: float, tail_cut: float) -> float:
    """|∫_{T₁}^∞ t^{−1−s} P_t f(X) dt|의 상한."""
    l1 = f.l1_norm
    if spec.trace_flag and l1:
        return operators.kernel_constant(spec.dim) * l1 * volume_tail_bound(spec, tail_cut, -1.0 - s)
    return f.sup_norm * tail_cut ** (-s) / s


# ============ 점별 평가 ============

def _flow(spec: OperatorSpec, f: ScalarField, t: float, points: np.ndarray, inner: int, seed: int) -> np.ndarray:
    if f.has_heat_flow:
        return np.atleast_1d(f.heat_flow(spec, t, points))
    return heat_image(spec, f, t, inner, seed).evaluate(points)


def _slope(spec: OperatorSpec, f: ScalarField, points: np.ndarray):
    try:
        return np.atleast_1d(f.generator(spec, points))
    except NotImplementedError:
        return None


def frac_points(spec: OperatorSpec, f: ScalarField, points: np.ndarray, quad: FracQuadSpec,
                shift: float = 0.0, inner: int = DEFAULT_IMAGE_SAMPLES, seed: int = 0):
    """(−𝒜)^s P_shift f를 여러 점에서 계산합니다.

    닫힌 형태의 P_t f가 있으면 결정적이고, 없으면 공통 정규 표본으로 평가합니다.

    Returns:
        (값, 저차 규칙 값, 근거리 보정 불확실도) 배열 튜플.
    """
    s = quad.s
    c = frac_constant(s)
    if shift == 0.0:
        base, slope = f.evaluate(points), _slope(spec, f, points)
    else:
        base = _flow(spec, f, shift, points, inner, seed)
        slope = _slope(spec, heat_image(spec, f, shift, inner, seed), points)

    def integral(nodes):
        times, weights = nodes
        acc = np.zeros(points.shape[0])
        first = None
        for t, w in zip(times, weights):
            values = _flow(spec, f, shift + t, points, inner, seed)
            if first is None:
                first = (t, values)
            acc += w * t ** (-1.0 - s) * (values - base)
        return acc, first

    fine, (t1, phi1) = integral(quad.nodes())
    coarse, _ = integral(quad.coarse_nodes())
    data_slope = (phi1 - base) / t1
    near_scale = quad.t_min ** (1.0 - s) / (1.0 - s)
    if slope is None:
        slope, near_error = data_slope, 0.5 * np.abs(data_slope) * near_scale
    else:
        near_error = np.abs(data_slope - slope) * near_scale
    tail = -base * quad.tail_cut ** (-s) / s
    near = slope * near_scale
    return -c * (fine + near + tail), -c * (coarse + near + tail), c * near_error


class FractionalField(ScalarField):
    """X ↦ (−𝒜)^s P_shift f(X)를 스칼라 함수로 감쌉니다."""

    kind = 'fractional'

    def __init__(self, spec: OperatorSpec, f: ScalarField, s: float, shift: float = 0.0,
                 quad: Optional[FracQuadSpec] = None, inner: int = DEFAULT_IMAGE_SAMPLES, seed: int = 0):
        self.spec, self.base, self.dim = spec, f, f.dim
        self.quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
        self.shift, self.inner, self.seed = float(shift), inner, seed

    def evaluate(self, points):
        return frac_points(self.spec, self.base, points, self.quad, self.shift, self.inner, self.seed)[0]

    @property
    def sup_norm(self):
        return math.inf

    def supports(self):
        if self.shift > 0.0:
            return heat_image(self.spec, self.base, self.shift, self.inner, self.seed).supports()
        return self.base.supports()


# ============ Balakrishnan, 리스 ============

def _resolve_method(method: str, f: ScalarField) -> str:
    if method == 'auto':
        return 'exact' if f.has_heat_flow else 'mc'
    if method not in ('mc', 'exact'):
        raise DomainError(f"알 수 없는 method입니다: {method}", 'method')
    if method == 'exact' and not f.has_heat_flow:
        raise PreconditionError(f"{f.kind}는 P_t f의 닫힌 형태가 없어 exact를 쓸 수 없습니다.", 'method')
    return method


def balakrishnan_apply(spec: OperatorSpec, f: ScalarField, X, s: float, quad: Optional[FracQuadSpec] = None,
                       n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                       method: str = 'mc') -> FracEstimate:
    """(−𝒜)^s f(X) = −(s/Γ(1−s)) ∫₀^∞ t^{−1−s}(P_t f(X) − f(X)) dt.

    각 노드의 P_t f(X)는 같은 정규 표본(공통 난수)으로 추정하므로 표본 하나가
    적분 전체의 한 실현값이 되고, 표준오차는 그 범함수의 표준오차입니다.

    Args:
        spec: 연산자.
        f: 가우스/범프/합 함수.
        X: 평가 점.
        s: 차수 (0, 1).
        quad: 이산화 설정 (s는 인자의 값으로 덮어씁니다).
        n: 표본 수.
        seed: 마스터 시드.
        workers: 병렬 청크 수.
        method: 'mc', 'exact'(닫힌 형태 P_t f), 'auto'.

    Raises:
        DomainError: s ∉ (0, 1).
        InsufficientCutoffError: 꼬리 상한이 허용 오차의 10%를 넘는 경우.
    """
    s = ValidationService.validate_order(s)
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    X = ValidationService.validate_point(X, spec.dim)
    if f.is_constant:
        return _estimate(0.0, 0.0, 0.0, n, seed)
    c = frac_constant(s)
    bound = c * _cutoff_bound(spec, f, s, quad.tail_cut)
    if bound > CUTOFF_SHARE * quad.tolerance:
        raise InsufficientCutoffError(
            f"T₁={quad.tail_cut:g}에서 꼬리 상한 {bound:.3g}이(가) 허용 오차의 10%를 넘습니다.", 'tail_cut',
        )
    method = _resolve_method(method, f)
    points = X[None, :]
    if method == 'exact':
        value, coarse, near_error = (float(v[0]) for v in frac_points(spec, f, points, quad))
        return _estimate(value, 0.0, abs(value - coarse) + near_error + bound, 0, seed, bound)

    f0 = float(f.evaluate(points)[0])
    times, weights = quad.nodes()
    coarse_times, coarse_weights = quad.coarse_nodes()
    all_times = np.concatenate([times, coarse_times])
    fine_w = np.concatenate([weights * times ** (-1.0 - s), np.zeros(coarse_times.size)])
    coarse_w = np.concatenate([np.zeros(times.size), coarse_weights * coarse_times ** (-1.0 - s)])
    first = int(np.argmin(times))

    def kernel(rng, m):
        paths = forward_paths(spec, f, X, all_times, rng.standard_normal((m, spec.dim))) - f0
        return np.stack([paths @ fine_w, paths @ coarse_w, paths[:, first]], axis=1)

    samples = run_chunks(kernel, n, seed, workers, (KEY_FRACTION,))
    fine = MCEstimate.from_samples(samples[:, 0], seed)
    coarse = float(np.mean(samples[:, 1]))
    data_slope = float(np.mean(samples[:, 2])) / times[first]
    slope = _slope(spec, f, points)
    near_scale = quad.t_min ** (1.0 - s) / (1.0 - s)
    if slope is None:
        slope_value, near_error = data_slope, 0.5 * abs(data_slope) * near_scale
    else:
        slope_value = float(slope[0])
        near_error = abs(data_slope - slope_value) * near_scale
    tail = -f0 * quad.tail_cut ** (-s) / s
    value = -c * (fine.value + slope_value * near_scale + tail)
    quad_error = c * (abs(fine.value - coarse) + near_error) + bound
    logger.info(f"Balakrishnan: s={s:g}, n={n}, 값={value:.6g}, MC={c * fine.std_error:.2g}, 구적={quad_error:.2g}")
    return _estimate(value, c * fine.std_error, quad_error, n, seed, bound)


def riesz_apply(spec: OperatorSpec, f: ScalarField, X, alpha: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
                workers: int = 1, quad: Optional[FracQuadSpec] = None, method: str = 'mc') -> FracEstimate:
    """ℐ_α f(X) = (1/Γ(α/2)) ∫₀^∞ t^{α/2−1} P_t f(X) dt.

    T₁ 이후는 P_t f(X) ~ t^{−D∞/2} 거듭제곱 외삽으로 더하고, 그 불확실도는
    ‖P_t f‖∞ ≤ c_N‖f‖₁/V(t)에서 얻은 상한으로 잡습니다. quad.s는 쓰지 않습니다.

    Raises:
        PreconditionError: tr B < 0.
        DivergentPotentialError: α ≥ D∞ − 0.01.
    """
    alpha = ValidationService.validate_time(alpha, 'alpha')
    X = ValidationService.validate_point(X, spec.dim)
    if not spec.trace_flag:
        raise PreconditionError("리스 퍼텐셜은 tr B ≥ 0에서만 정의합니다.", 'spec')
    Dinf = intrinsic_dimensions(spec).Dinf
    if alpha >= Dinf - DIVERGENCE_MARGIN:
        raise DivergentPotentialError(
            f"alpha={alpha:g} ≥ D∞={Dinf:.3g}: ∫₁^∞ t^{{α/2−1}}/V(t) dt가 발산합니다.", 'alpha',
        )
    quad = quad or FracQuadSpec(s=0.5)
    a = alpha / 2.0
    times, weights = quad.nodes()
    coarse_times, coarse_weights = quad.coarse_nodes()
    all_times = np.concatenate([times, coarse_times, [quad.tail_cut]])
    fine_w = np.concatenate([weights * times ** (a - 1.0), np.zeros(coarse_times.size + 1)])
    coarse_w = np.concatenate([np.zeros(times.size), coarse_weights * coarse_times ** (a - 1.0), [0.0]])
    f0 = float(f.evaluate(X[None, :])[0])
    method = _resolve_method(method, f)
    extrapolation = quad.tail_cut ** a / (Dinf / 2.0 - a)

    if method == 'exact':
        phi = np.array([float(f.heat_flow(spec, t, X)) for t in all_times])
        fine, coarse, last, mc_error = phi @ fine_w, phi @ coarse_w, phi[-1], 0.0
    else:
        def kernel(rng, m):
            paths = forward_paths(spec, f, X, all_times, rng.standard_normal((m, spec.dim)))
            return np.stack([paths @ fine_w + paths[:, -1] * extrapolation, paths @ coarse_w, paths[:, -1]], axis=1)

        samples = run_chunks(kernel, n, seed, workers, (KEY_FRACTION, 1))
        estimate = MCEstimate.from_samples(samples[:, 0], seed)
        fine = estimate.value - float(np.mean(samples[:, 2])) * extrapolation
        coarse, last, mc_error = float(np.mean(samples[:, 1])), float(np.mean(samples[:, 2])), estimate.std_error

    norm = 1.0 / gamma(a)
    head = f0 * quad.t_min ** a / a
    tail = last * extrapolation
    bound = 0.0
    if f.l1_norm:
        bound = operators.kernel_constant(spec.dim) * f.l1_norm * volume_tail_bound(spec, quad.tail_cut, a - 1.0)
    value = norm * (fine + head + tail)
    quad_error = norm * (abs(fine - coarse) + bound)
    logger.info(f"리스 퍼텐셜: alpha={alpha:g}, 값={value:.6g}")
    return _estimate(value, norm * mc_error, quad_error, n if method == 'mc' else 0, seed, norm * bound)


# ============ 시간 프로파일과 합성 ============

class TimeProfile:
    """t ↦ P_t f(X)의 로그 격자 보간.

    격자 안에서는 log t에 대한 3차 스플라인, [0, 격자 시작]은 선형,
    격자 끝 이후는 t^{tail_power} 거듭제곱 외삽입니다.
    """

    def __init__(self, times: np.ndarray, values: np.ndarray, value0: float, tail_power: float):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.value0 = float(value0)
        self.tail_power = float(tail_power)
        self._spline = CubicSpline(np.log(self.times), self.values)

    def __call__(self, t):
        shape = np.shape(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        lo, hi = self.times[0], self.times[-1]
        below, above = t < lo, t > hi
        inside = ~(below | above)
        out[inside] = self._spline(np.log(t[inside]))
        out[below] = self.value0 + (self.values[0] - self.value0) * t[below] / lo
        out[above] = self.values[-1] * (t[above] / hi) ** self.tail_power
        return out.reshape(shape)

    def interpolation_error(self) -> float:
        """짝수 번째 점만으로 만든 스플라인의 홀수 번째 점 오차."""
        coarse = CubicSpline(np.log(self.times[::2]), self.values[::2])
        odd = slice(1, len(self.times) - 1, 2)
        return float(np.max(np.abs(coarse(np.log(self.times[odd])) - self.values[odd])))

    @staticmethod
    def grid(quad: FracQuadSpec, points: int) -> np.ndarray:
        return np.logspace(math.log10(quad.t_min / 2.0), math.log10(4.0 * quad.tail_cut), points)

    @classmethod
    def exact(cls, spec: OperatorSpec, f: ScalarField, X: np.ndarray, quad: FracQuadSpec,
              tail_power: float) -> 'TimeProfile':
        times = cls.grid(quad, PROFILE_POINTS)
        values = np.array([float(f.heat_flow(spec, t, X)) for t in times])
        return cls(times, values, float(f.evaluate(X[None, :])[0]), tail_power)

    @classmethod
    def batches(cls, spec: OperatorSpec, f: ScalarField, X: np.ndarray, quad: FracQuadSpec, tail_power: float,
                n: int, seed: int, workers: int, count: int = PROFILE_BATCHES) -> List['TimeProfile']:
        """공통 난수 경로를 count개 묶음으로 나눈 묶음별 프로파일."""
        times = cls.grid(quad, MC_PROFILE_POINTS)

        def kernel(rng, m):
            return forward_paths(spec, f, X, times, rng.standard_normal((m, spec.dim)))

        paths = run_chunks(kernel, n, seed, workers, (KEY_PROFILE,))
        value0 = float(f.evaluate(X[None, :])[0])
        return [cls(times, chunk.mean(axis=0), value0, tail_power) for chunk in np.array_split(paths, count)]


@dataclass
class _Calculus:
    """프로파일 위의 적분 규칙 묶음."""
    quad: FracQuadSpec
    half_dim: float

    @property
    def times(self):
        return self.quad.nodes()[0]

    @property
    def weights(self):
        return self.quad.nodes()[1]

    def frac_shifted(self, phi: TimeProfile, taus: np.ndarray, s: float) -> np.ndarray:
        """G(τ) = (−𝒜)^s P_τ f(X) (Chapman–Kolmogorov로 φ(τ + t) 사용)."""
        t, w = self.times, self.weights
        t_min, cut = self.quad.t_min, self.quad.tail_cut
        taus = np.asarray(taus, dtype=float)
        base = phi(taus)
        shifted = phi(taus[:, None] + t[None, :])
        body = (shifted - base[:, None]) @ (w * t ** (-1.0 - s))
        head = (phi(taus + t_min) - base) / t_min * t_min ** (1.0 - s) / (1.0 - s)
        tail = -base * cut ** (-s) / s + phi(taus + cut) * cut ** (-s) / (s + self.half_dim)
        return -frac_constant(s) * (body + head + tail)

    def abel(self, values: np.ndarray, at_zero: float, at_cut: float, s: float, decay: float) -> float:
        """(1/Γ(s)) ∫₀^∞ τ^{s−1} g(τ) dτ (g ~ τ^{−decay} 꼬리)."""
        t, w = self.times, self.weights
        head = at_zero * self.quad.t_min ** s / s
        tail = at_cut * self.quad.tail_cut ** s / (decay - s)
        return (values @ (w * t ** (s - 1.0)) + head + tail) / gamma(s)


def _profiles(spec, f, X, quad, n, seed, workers, method):
    Dinf = intrinsic_dimensions(spec).Dinf
    half_dim = Dinf / 2.0
    method = _resolve_method(method, f)
    if method == 'exact':
        return [TimeProfile.exact(spec, f, X, quad, -half_dim)], half_dim
    return TimeProfile.batches(spec, f, X, quad, -half_dim, n, seed, workers), half_dim


def _batch_estimate(values: Sequence[float], n: int, seed: int, extra: float = 0.0) -> FracEstimate:
    values = np.asarray(values, dtype=float)
    mc = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return _estimate(float(np.mean(values)), mc, extra, n, seed)


@dataclass(frozen=True)
class CompositionReport:
    """두 경로 합성의 잔차.

    Attributes:
        target: 기준값.
        forward: 첫 번째 합성 경로의 추정값.
        reverse: 두 번째 합성 경로의 추정값.
        scale: 잔차 정규화 분모.
        interpolation_error: 프로파일 보간 오차 추정.
    """
    target: FracEstimate
    forward: FracEstimate
    reverse: FracEstimate
    scale: float = 1.0
    interpolation_error: float = 0.0

    @property
    def forward_residual(self) -> float:
        return abs(self.forward.value - self.target.value) / self.scale

    @property
    def reverse_residual(self) -> float:
        return abs(self.reverse.value - self.target.value) / self.scale

    @property
    def residual(self) -> float:
        return max(self.forward_residual, self.reverse_residual)

    @property
    def error(self) -> float:
        worst = max(self.forward.std_error, self.reverse.std_error)
        return math.hypot(worst, self.target.std_error) / self.scale

    def to_dict(self) -> dict:
        return {
            'target': self.target.value,
            'forward': self.forward.value,
            'reverse': self.reverse.value,
            'forward_residual': self.forward_residual,
            'reverse_residual': self.reverse_residual,
            'residual': self.residual,
            'error': self.error,
            'interpolation_error': self.interpolation_error,
        }


def inversion_residual(spec: OperatorSpec, f: ScalarField, X, s: float, n: int = DEFAULT_SAMPLES,
                       seed: int = 0, workers: int = 1, quad: Optional[FracQuadSpec] = None,
                       method: str = 'auto') -> CompositionReport:
    """ℐ_{2s}((−𝒜)^s f)(X)와 (−𝒜)^s(ℐ_{2s} f)(X)를 f(X)와 비교합니다.

    두 합성 모두 P_τ P_t = P_{τ+t}로 한 개의 프로파일 φ(t) = P_t f(X)에 대한
    이중 적분으로 바꿔 계산합니다. 잔차는 |f(X)| + 1로 나눈 값입니다.

    Raises:
        DomainError: s ∉ (0, 1).
        PreconditionError: tr B < 0.
        DivergentPotentialError: 2s ≥ D∞.
    """
    s = ValidationService.validate_order(s)
    X = ValidationService.validate_point(X, spec.dim)
    if not spec.trace_flag:
        raise PreconditionError("역변환 항등식은 tr B ≥ 0에서만 검사합니다.", 'spec')
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    profiles, half_dim = _profiles(spec, f, X, quad, n, seed, workers, method)
    if 2.0 * s >= 2.0 * half_dim - DIVERGENCE_MARGIN:
        raise DivergentPotentialError(f"2s={2 * s:g} ≥ D∞={2 * half_dim:.3g}", 's')
    calc = _Calculus(quad, half_dim)
    t, cut, t_min = calc.times, quad.tail_cut, quad.t_min
    c = frac_constant(s)
    forward_values, reverse_values = [], []
    for phi in profiles:
        taus = np.concatenate([t, [0.0, cut]])
        G = calc.frac_shifted(phi, taus, s)
        forward_values.append(calc.abel(G[:-2], G[-2], G[-1], s, s + half_dim))

        outer = np.concatenate([t, [t_min, cut]])
        inner = (phi(outer[:, None] + t[None, :]) - phi(t)[None, :]) @ (calc.weights * t ** (s - 1.0))
        inner += (phi(outer) - phi.value0) * t_min ** s / s
        inner += _abel_tail(phi, outer, s, half_dim, cut)
        D = inner / gamma(s)
        body = D[:-2] @ (calc.weights * t ** (-1.0 - s))
        head = D[-2] / t_min * t_min ** (1.0 - s) / (1.0 - s)
        tail = D[-1] * cut ** (-s) / s
        reverse_values.append(-c * (body + head + tail))

    f0 = profiles[0].value0
    interp = profiles[0].interpolation_error()
    report = CompositionReport(
        target=_estimate(f0, 0.0, 0.0, n, seed),
        forward=_batch_estimate(forward_values, n, seed, interp),
        reverse=_batch_estimate(reverse_values, n, seed, interp),
        scale=abs(f0) + 1.0,
        interpolation_error=interp,
    )
    logger.info(f"역변환 잔차: s={s:g}, ℐ∘frac={report.forward_residual:.3g}, frac∘ℐ={report.reverse_residual:.3g}")
    return report


@lru_cache(maxsize=256)
def _power_tail_kernel(s: float, half_dim: float, ratios: Tuple[float, ...]) -> np.ndarray:
    """∫₁^∞ u^{s−1}((r + u)^{−d} − u^{−d}) du (d = D∞/2)."""
    r = np.asarray(ratios)
    value, _ = integrate.quad_vec(lambda u: u ** (s - 1.0) * ((r + u) ** (-half_dim) - u ** (-half_dim)), 1.0, np.inf)
    return value


def _abel_tail(phi: TimeProfile, outer: np.ndarray, s: float, half_dim: float, cut: float) -> np.ndarray:
    """∫_{T₁}^∞ τ^{s−1}(φ(t + τ) − φ(τ)) dτ를 φ ~ τ^{−D∞/2} 외삽으로 계산합니다."""
    ratios = tuple(float(v) for v in outer / cut)
    scale = float(phi(np.array([cut]))[0]) * cut ** s
    return scale * _power_tail_kernel(s, half_dim, ratios)


def additivity_residual(spec: OperatorSpec, f: ScalarField, X, s: float, s2: float, n: int = DEFAULT_SAMPLES,
                        seed: int = 0, workers: int = 1, quad: Optional[FracQuadSpec] = None,
                        method: str = 'auto') -> CompositionReport:
    """(−𝒜)^{s+s2}f(X)와 (−𝒜)^s((−𝒜)^{s2}f)(X), (−𝒜)^{s2}((−𝒜)^s f)(X)의 비교.

    세 값 모두 같은 프로파일(같은 시드)에서 계산하므로 MC 잡음이 양의 상관을 가집니다.

    Raises:
        DomainError: s, s2, s + s2 중 하나가 (0, 1) 밖인 경우.
    """
    s = ValidationService.validate_order(s)
    s2 = ValidationService.validate_order(s2, field_name='s2')
    total = ValidationService.validate_order(s + s2, field_name='s+s2')
    X = ValidationService.validate_point(X, spec.dim)
    quad = FracQuadSpec(s=total) if quad is None else replace(quad, s=total)
    profiles, half_dim = _profiles(spec, f, X, quad, n, seed, workers, method)
    calc = _Calculus(quad, half_dim)
    t, t_min, cut = calc.times, quad.t_min, quad.tail_cut
    nodes = np.concatenate([t, [0.0, t_min, cut]])

    def composed(phi, outer_s, inner_s):
        G = calc.frac_shifted(phi, nodes, inner_s)
        g0 = G[-3]
        body = (G[:-3] - g0) @ (calc.weights * t ** (-1.0 - outer_s))
        head = (G[-2] - g0) / t_min * t_min ** (1.0 - outer_s) / (1.0 - outer_s)
        tail = -g0 * cut ** (-outer_s) / outer_s + G[-1] * cut ** (-outer_s) / (outer_s + inner_s + half_dim)
        return -frac_constant(outer_s) * (body + head + tail)

    direct = [float(calc.frac_shifted(phi, np.array([0.0]), total)[0]) for phi in profiles]
    forward = [composed(phi, s, s2) for phi in profiles]
    reverse = [composed(phi, s2, s) for phi in profiles]
    interp = profiles[0].interpolation_error()
    target = _batch_estimate(direct, n, seed, interp)
    report = CompositionReport(
        target=target,
        forward=_batch_estimate(forward, n, seed, interp),
        reverse=_batch_estimate(reverse, n, seed, interp),
        scale=abs(target.value) + 1.0,
        interpolation_error=interp,
    )
    logger.info(f"가법성 잔차: s={s:g}, s2={s2:g}, 잔차={report.residual:.3g}")
    return report


def commutation_residual(spec: OperatorSpec, f: ScalarField, X, s: float, t: float, n: int = DEFAULT_SAMPLES,
                         seed: int = 0, workers: int = 1, quad: Optional[FracQuadSpec] = None) -> float:
    """(−𝒜)^s P_t f(X)와 P_t((−𝒜)^s f)(X)의 차이를 결합 오차로 나눈 비.

    앞쪽은 닫힌 형태 P_{t+r} f로, 뒤쪽은 p(X, ·, t) 표본점마다 (−𝒜)^s f를
    정확히 계산해 평균합니다.
    """
    s = ValidationService.validate_order(s)
    t = ValidationService.validate_time(t)
    X = ValidationService.validate_point(X, spec.dim)
    if not f.has_heat_flow:
        raise PreconditionError("교환 검사는 P_t f의 닫힌 형태가 있는 함수에서만 수행합니다.", 'f')
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    value, coarse, near_error = (float(v[0]) for v in frac_points(spec, f, X[None, :], quad, shift=t))
    first = _estimate(value, 0.0, abs(value - coarse) + near_error, 0, seed)
    bundle = covariance(spec, t)

    def kernel(rng, m):
        Y = bundle.exp_tB @ X + rng.standard_normal((m, spec.dim)) @ bundle.sqrt_2tK.T
        return frac_points(spec, f, Y, quad)[0]

    second = MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, (KEY_COMMUTE,)), seed)
    return z_score(first, second)


# ============ ℓ_s 핵 ============

def ell_kernel(sigma: float, t: float, tau: float, s: float) -> float:
    """ℓ_s(σ; t, τ) = [1_{σ>t}(σ − t)^{s−1} − 1_{σ>τ}(σ − τ)^{s−1}] / Γ(s)."""
    t = ValidationService.validate_time(t, 't')
    tau = ValidationService.validate_time(tau, 'tau')
    s = ValidationService.validate_order(s)
    value = 0.0
    if sigma > t:
        value += (sigma - t) ** (s - 1.0)
    if sigma > tau:
        value -= (sigma - tau) ** (s - 1.0)
    return value / gamma(s)


def ell_l1_closed(t: float, tau: float, s: float) -> float:
    """∫|ℓ_s| dσ = 2|t − τ|^s / Γ(1 + s)."""
    return 2.0 * abs(t - tau) ** s / gamma(1.0 + s)


def ell_l1(t: float, tau: float, s: float) -> float:
    """∫₀^∞ |ℓ_s(σ; t, τ)| dσ를 적응 구적법으로 계산합니다.

    h = |t − τ|로 정규화한 뒤 각 구간의 끝점 특이성을 거듭제곱 치환으로
    없앱니다: (a, b)에서 y = u^{1/s}, (b, b + h)에서 같은 치환,
    (b + h, ∞)에서 y = 1/w, w = v^{1/(1−s)}.
    """
    t = ValidationService.validate_time(t, 't')
    tau = ValidationService.validate_time(tau, 'tau')
    s = ValidationService.validate_order(s)
    h = abs(t - tau)
    if h == 0.0:
        return 0.0
    options = {'epsabs': 1e-13, 'epsrel': 1e-12, 'limit': 200}

    # (min, max): y^{s−1} dy, y = u^{1/s}
    single, _ = integrate.quad(lambda u: 1.0 / s, 0.0, 1.0, **options)

    # (max, max + h): y^{s−1} − (1 + y)^{s−1}
    def near(u):
        y = u ** (1.0 / s)
        return (1.0 - (1.0 + y) ** (s - 1.0) * u ** (1.0 / s - 1.0)) / s

    # (max + h, ∞): y = 1/w, w = v^{1/(1−s)}
    def far(v):
        if v == 0.0:
            return 1.0
        w = v ** (1.0 / (1.0 - s))
        return -math.expm1((s - 1.0) * math.log1p(w)) / ((1.0 - s) * w)

    overlap, _ = integrate.quad(near, 0.0, 1.0, **options)
    rest, _ = integrate.quad(far, 0.0, 1.0, **options)
    return (single + overlap + rest) * h ** s / gamma(s)


# ============ Ledoux 형 추정 ============

@dataclass(frozen=True)
class LedouxReport:
    """‖P_t f − P_τ f‖_p ≤ (2|t−τ|^s/Γ(1+s)) sup_σ‖(−𝒜)^s P_σ f‖_p 검사 결과.

    Attributes:
        lhs: 좌변.
        rhs: 우변 (가장 작은 σ에서 계산).
        norms: σ 격자별 ‖(−𝒜)^s P_σ f‖_p.
        sigmas: σ 격자 (오름차순).
        monotone: σ에 대해 비증가인지 여부 (MC 오차 안에서).
    """
    lhs: MCEstimate
    rhs: MCEstimate
    norms: Tuple[MCEstimate, ...] = ()
    sigmas: Tuple[float, ...] = ()
    monotone: bool = True

    @property
    def relative_error(self) -> float:
        return math.hypot(self.lhs.relative_error if self.lhs.value else 0.0,
                          self.rhs.relative_error if self.rhs.value else 0.0)

    @property
    def ratio(self) -> float:
        if self.rhs.value > 0.0:
            return self.lhs.value / self.rhs.value
        return 0.0 if self.lhs.value <= 0.0 else math.inf

    @property
    def ok(self) -> bool:
        return self.lhs.value <= self.rhs.value * (1.0 + LEDOUX_SLACK * self.relative_error) + 1e-15

    def to_dict(self) -> dict:
        return {
            'lhs': self.lhs.value,
            'rhs': self.rhs.value,
            'ratio': self.ratio,
            'monotone': self.monotone,
            'ok': self.ok,
            'norms': [norm.value for norm in self.norms],
            'sigmas': list(self.sigmas),
        }


def frac_image_norms(spec: OperatorSpec, f: ScalarField, s: float, sigmas: Sequence[float], p: int = 1,
                     n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                     quad: Optional[FracQuadSpec] = None, inner: int = DEFAULT_IMAGE_SAMPLES) -> List[MCEstimate]:
    """σ마다 ‖(−𝒜)^s P_σ f‖_p를 추정합니다.

    (−𝒜)^s P_σ f는 거듭제곱 꼬리를 가지므로 t 분포 성분을 섞은 혼합을 씁니다.
    """
    norms = []
    for index, sigma in enumerate(sigmas):
        image = FractionalField(spec, f, s, shift=sigma, quad=quad, inner=inner, seed=seed)
        sampler = GaussianMixture.covering(image, tail_df=min(1.0, 2.0 * s))
        norms.append(lp_distance(image, None, p, n, seed, sampler=sampler, workers=workers,
                                 keys=(KEY_NORM, index)))
    return norms


def _is_non_increasing(norms: Sequence[MCEstimate]) -> bool:
    return all(
        later.value <= earlier.value + 4.0 * math.hypot(earlier.std_error, later.std_error)
        for earlier, later in zip(norms, norms[1:])
    )


def ledoux_check(spec: OperatorSpec, f: ScalarField, s: float, t: float, tau: float, p: int = 1,
                 n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                 sigmas: Sequence[float] = SIGMA_GRID, strict: bool = False,
                 quad: Optional[FracQuadSpec] = None) -> LedouxReport:
    """Ledoux 형 부등식을 수치로 검사합니다.

    sup_σ는 σ 격자의 가장 작은 값에서 취하고, 격자 위 비증가성을 함께 확인합니다.

    Raises:
        PreconditionError: tr B < 0.
        InconsistencyError: strict=True이고 비증가성이 MC 오차 밖에서 깨진 경우.
    """
    s = ValidationService.validate_order(s)
    t = ValidationService.validate_time(t, 't')
    tau = ValidationService.validate_time(tau, 'tau')
    p = ValidationService.validate_p(p)
    if not spec.trace_flag:
        raise PreconditionError("Ledoux 추정은 tr B ≥ 0에서만 검사합니다.", 'spec')
    if t == tau:
        zero = MCEstimate.exact(0.0, seed)
        return LedouxReport(lhs=zero, rhs=zero)
    lhs = lp_distance(heat_image(spec, f, t, seed=seed), heat_image(spec, f, tau, seed=seed), p, n, seed,
                      workers=workers)
    sigmas = tuple(sorted(sigmas))
    norms = frac_image_norms(spec, f, s, sigmas, p, n, seed, workers, quad)
    monotone = _is_non_increasing(norms)
    if not monotone:
        message = f"‖(−𝒜)^s P_σ f‖_{p}가 σ 격자 {sigmas}에서 비증가가 아닙니다."
        logger.warning(message)
        if strict:
            raise InconsistencyError(message, 'sigmas')
    rhs = norms[0].scaled(ell_l1_closed(t, tau, s))
    report = LedouxReport(lhs=lhs, rhs=rhs, norms=tuple(norms), sigmas=sigmas, monotone=monotone)
    logger.info(f"Ledoux 검사: s={s:g}, t={t:g}, tau={tau:g}, p={p}, 비={report.ratio:.3g}")
    return report


def ledoux_corollary(spec: OperatorSpec, f: ScalarField, s: float, t_grid: Sequence[float],
                     n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                     sigmas: Sequence[float] = SIGMA_GRID) -> LedouxReport:
    """sup_t t^{−s}‖P_t f − f‖₁ ≤ (2/Γ(1+s)) sup_σ‖(−𝒜)^s P_σ f‖₁."""
    s = ValidationService.validate_order(s)
    if not spec.trace_flag:
        raise PreconditionError("Ledoux 추정은 tr B ≥ 0에서만 검사합니다.", 'spec')
    rates = [
        lp_distance(heat_image(spec, f, t, seed=seed), f, 1, n, seed, workers=workers).scaled(t ** (-s))
        for t in (ValidationService.validate_time(t) for t in t_grid)
    ]
    lhs = max(rates, key=lambda estimate: estimate.value)
    sigmas = tuple(sorted(sigmas))
    norms = frac_image_norms(spec, f, s, sigmas, 1, n, seed, workers)
    rhs = norms[0].scaled(2.0 / gamma(1.0 + s))
    return LedouxReport(lhs=lhs, rhs=rhs, norms=tuple(norms), sigmas=sigmas, monotone=_is_non_increasing(norms))


# ============ 닫힌 형태 대조값 ============

def fourier_oracle(f: GaussianField, x: float, s: float) -> float:
    """1차원 라플라시안의 (−Δ)^s f(x)를 푸리에 승수 |2πξ|^{2s}로 계산합니다.

    f̂(ξ) = a√(2π)σ e^{−2π²σ²ξ²}이므로
    (−Δ)^s f(x) = 2∫₀^∞ (2πξ)^{2s} f̂(ξ) cos(2πξ(x − c)) dξ.
    """
    if not isinstance(f, GaussianField) or f.dim != 1:
        raise PreconditionError("푸리에 대조값은 1차원 가우스 함수에서만 계산합니다.", 'f')
    s = ValidationService.validate_order(s)
    sigma = math.sqrt(float(f.covariance[0, 0]))
    a, shift = f.amplitude, float(x) - float(f.center[0])
    cutoff = 12.0 / (2.0 * math.pi * sigma)

    def integrand(xi):
        return ((2 * math.pi * xi) ** (2 * s) * a * math.sqrt(2 * math.pi) * sigma
                * math.exp(-2 * math.pi ** 2 * sigma ** 2 * xi ** 2) * math.cos(2 * math.pi * xi * shift))

    value, _ = integrate.quad(integrand, 0.0, cutoff, epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0 * value


def newtonian_oracle(f: GaussianField, X) -> float:
    """3차원 등방 가우스 함수의 뉴턴 퍼텐셜 ℐ₂f(X) = M/(4πr)·erf(r/(σ√2))."""
    if not isinstance(f, GaussianField) or f.dim != 3:
        raise PreconditionError("뉴턴 퍼텐셜 대조값은 3차원 가우스 함수에서만 계산합니다.", 'f')
    sigma2 = float(f.covariance[0, 0])
    if not np.allclose(f.covariance, sigma2 * np.eye(3)):
        raise PreconditionError("공분산이 등방이어야 합니다.", 'f')
    sigma = math.sqrt(sigma2)
    mass = f.amplitude * (2 * math.pi * sigma2) ** 1.5
    r = float(np.linalg.norm(ValidationService.validate_point(X, 3) - f.center))
    if r == 0.0:
        return mass / (4 * math.pi) * math.sqrt(2 / math.pi) / sigma
    return mass / (4 * math.pi * r) * erf(r / (sigma * math.sqrt(2)))
