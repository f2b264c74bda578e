"""열 반군 P_t와 그 수반 P*_t의 몬테카를로 엔진.

p(X, ·, t)는 평균 e^{tB}X, 공분산 2tK(t)인 가우스 법칙이므로 정확한 가우스
샘플링으로 P_t f(X) = E[f(Y)]를 추정합니다. 모든 추정은 (seed, n, workers)가
같으면 비트 단위로 같은 값을 돌려줍니다.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import multivariate_normal, multivariate_t

from . import operators
from .fields import ScalarField, SumField, as_points
from .operators import OperatorSpec, adjoint_law, covariance
from .rng import run_chunks, stream
from .validators import (
    DomainError,
    IllConditionedSamplerError,
    ValidationService,
)

logger = logging.getLogger(__name__)


# 같은 시드 안에서 용도별 스트림을 구분하는 키
KEY_FORWARD = 11
KEY_ADJOINT = 12
KEY_LP = 13
KEY_NESTED = 14
KEY_MASS = 15
KEY_IMAGE = 16

DEFAULT_SAMPLES = 20000
DEFAULT_IMAGE_SAMPLES = 2048
MASS_PROPOSAL_SCALE = 1.5
MAX_SUPPORT_RATIO = 1e3
IMAGE_BLOCK = 1 << 20
SUPPORT_SIGMAS = 4.0
TAIL_WEIGHT = 0.3


# ============ 추정값 ============

@dataclass(frozen=True)
class MCEstimate:
    """몬테카를로 추정값.

    Attributes:
        value: 추정값.
        std_error: 표준오차 (표본 표준편차 / √n).
        n: 표본 수.
        seed: 마스터 시드.
    """
    value: float
    std_error: float
    n: int
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> 'MCEstimate':
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n == 0:
            raise DomainError("표본이 없습니다.", 'n')
        if np.all(samples == samples[0]):
            return cls(value=float(samples[0]), std_error=0.0, n=n, seed=seed)
        std_error = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(value=float(np.mean(samples)), std_error=std_error, n=n, seed=seed)

    @classmethod
    def exact(cls, value: float, seed: int = 0) -> 'MCEstimate':
        return cls(value=float(value), std_error=0.0, n=0, seed=seed)

    def interval(self, k: float = 4.0) -> Tuple[float, float]:
        """value ± k·std_error."""
        return self.value - k * self.std_error, self.value + k * self.std_error

    @property
    def relative_error(self) -> float:
        if self.value == 0.0:
            return 0.0 if self.std_error == 0.0 else math.inf
        return self.std_error / abs(self.value)

    def scaled(self, factor: float) -> 'MCEstimate':
        return MCEstimate(self.value * factor, self.std_error * abs(factor), self.n, self.seed)

    def shifted(self, offset: float, extra_error: float = 0.0) -> 'MCEstimate':
        """상수를 더하고 결정적 오차 한계를 표준오차에 합칩니다."""
        return MCEstimate(self.value + offset, math.hypot(self.std_error, extra_error), self.n, self.seed)

    def to_dict(self) -> dict:
        return {'value': self.value, 'std_error': self.std_error, 'n': self.n, 'seed': self.seed}


def combine(terms: Sequence[Tuple[float, MCEstimate]]) -> MCEstimate:
    """독립 추정값들의 선형결합 Σ c_i X_i."""
    value = sum(c * est.value for c, est in terms)
    error = math.sqrt(sum((c * est.std_error) ** 2 for c, est in terms))
    first = terms[0][1]
    return MCEstimate(value, error, first.n, first.seed)


def z_score(first: MCEstimate, second: MCEstimate) -> float:
    """|a − b| / √(se_a² + se_b²). 둘 다 정확하면 일치 여부만 봅니다."""
    diff = abs(first.value - second.value)
    scale = math.hypot(first.std_error, second.std_error)
    if scale == 0.0:
        return 0.0 if diff <= 1e-12 * (1.0 + abs(first.value)) else math.inf
    return diff / scale


@dataclass(frozen=True)
class BoundCheck:
    """lhs ≤ rhs 형태의 부등식 검사.

    Attributes:
        lhs: 좌변 추정값.
        rhs: 우변 추정값.
        k: 허용 표준오차 배수.
    """
    lhs: MCEstimate
    rhs: MCEstimate
    k: float = 4.0

    @property
    def ratio(self) -> float:
        if self.rhs.value > 0.0:
            return self.lhs.value / self.rhs.value
        return 0.0 if self.lhs.value <= 0.0 else math.inf

    @property
    def ok(self) -> bool:
        slack = self.k * math.hypot(self.lhs.std_error, self.rhs.std_error) + 1e-12 * abs(self.rhs.value)
        return self.lhs.value <= self.rhs.value + slack

    def to_dict(self) -> dict:
        return {
            'lhs': self.lhs.value,
            'lhs_err': self.lhs.std_error,
            'rhs': self.rhs.value,
            'rhs_err': self.rhs.std_error,
            'ratio': self.ratio,
            'ok': self.ok,
        }


# ============ 샘플링 ============

def sample_forward(spec: OperatorSpec, X, t: float, rng: np.random.Generator, m: Optional[int] = None):
    """Y = e^{tB}X + (2tK(t))^{1/2} Z.

    m이 None이면 한 점 (N,), 아니면 (m, N) 배열을 반환합니다.
    """
    bundle = covariance(spec, t)
    X = ValidationService.validate_point(X, spec.dim)
    Z = rng.standard_normal((1 if m is None else m, spec.dim))
    Y = bundle.exp_tB @ X + Z @ bundle.sqrt_2tK.T
    return Y[0] if m is None else Y


def sample_adjoint(spec: OperatorSpec, X, t: float, rng: np.random.Generator, m: int) -> np.ndarray:
    """p(·, X, t)/e^{−t trB}에서 뽑은 표본 (m, N)."""
    law = adjoint_law(spec, t)
    X = ValidationService.validate_point(X, spec.dim)
    return law.mean_map @ X + rng.standard_normal((m, spec.dim)) @ law.sqrt_covariance.T


def forward_paths(spec: OperatorSpec, f: ScalarField, X: np.ndarray, times: Sequence[float],
                  Z: np.ndarray) -> np.ndarray:
    """공통 정규 표본 Z로 계산한 대칭(antithetic) 경로 값 (m, len(times)).

    열 j는 ½[f(e^{t_j B}X + S_j Z) + f(e^{t_j B}X − S_j Z)] 입니다.
    """
    out = np.empty((Z.shape[0], len(times)))
    for j, t in enumerate(times):
        bundle = covariance(spec, t)
        mean = bundle.exp_tB @ X
        spread = Z @ bundle.sqrt_2tK.T
        out[:, j] = 0.5 * (f.evaluate(mean + spread) + f.evaluate(mean - spread))
    return out


def apply_semigroup(spec: OperatorSpec, f: ScalarField, X, t: float, n: int = DEFAULT_SAMPLES,
                    seed: int = 0, workers: int = 1, keys: Sequence[int] = (KEY_FORWARD,)) -> MCEstimate:
    """P_t f(X)의 몬테카를로 추정.

    표본 하나는 대칭 정규 쌍 (Z, −Z)의 평균이므로 n은 쌍의 개수입니다.

    Args:
        spec: 연산자.
        f: 유계이거나 가우스 적분 가능한 함수.
        X: 평가 점.
        t: 시간 (> 0).
        n: 표본 수.
        seed: 마스터 시드.
        workers: 병렬 청크 수.
        keys: 스트림 용도 키.

    Raises:
        DomainError: t ≤ 0 또는 n = 0.
    """
    X = ValidationService.validate_point(X, spec.dim)
    t = ValidationService.validate_time(t)

    def kernel(rng, m):
        Z = rng.standard_normal((m, spec.dim))
        return forward_paths(spec, f, X, (t,), Z)[:, 0]

    return MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, keys), seed)


def apply_adjoint(spec: OperatorSpec, f: ScalarField, X, t: float, n: int = DEFAULT_SAMPLES,
                  seed: int = 0, workers: int = 1, keys: Sequence[int] = (KEY_ADJOINT,)) -> MCEstimate:
    """P*_t f(X) = ∫ p(Y, X, t) f(Y) dY = e^{−t trB}·E[f(Y′)]의 추정."""
    X = ValidationService.validate_point(X, spec.dim)
    law = adjoint_law(spec, ValidationService.validate_time(t))
    mean = law.mean_map @ X

    def kernel(rng, m):
        spread = rng.standard_normal((m, spec.dim)) @ law.sqrt_covariance.T
        return 0.5 * law.mass * (f.evaluate(mean + spread) + f.evaluate(mean - spread))

    return MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, keys), seed)


# ============ 반군 상과 생성자 ============

class MonteCarloImage(ScalarField):
    """닫힌 형태가 없는 f에 대한 P_t f.

    고정된 공통 정규 표본으로 평가하므로 X에 대한 결정적 함수입니다.
    """

    kind = 'mc-image'

    def __init__(self, spec: OperatorSpec, f: ScalarField, t: float,
                 inner: int = DEFAULT_IMAGE_SAMPLES, seed: int = 0):
        self.spec, self.base, self.dim = spec, f, spec.dim
        self.bundle = covariance(spec, t)
        normals = stream(seed, KEY_IMAGE).standard_normal((inner, spec.dim))
        self._spread = np.concatenate([normals, -normals]) @ self.bundle.sqrt_2tK.T

    def evaluate(self, points):
        block = max(1, IMAGE_BLOCK // self._spread.shape[0])
        out = np.empty(points.shape[0])
        for start in range(0, points.shape[0], block):
            means = points[start:start + block] @ self.bundle.exp_tB.T
            Y = (means[:, None, :] + self._spread[None, :, :]).reshape(-1, self.dim)
            out[start:start + block] = self.base.evaluate(Y).reshape(means.shape[0], -1).mean(axis=1)
        return out

    @property
    def sup_norm(self):
        return self.base.sup_norm

    @property
    def l1_norm(self):
        norm = self.base.l1_norm
        return None if norm is None else norm * math.exp(-self.bundle.t * self.spec.trace)

    def supports(self):
        inverse = np.linalg.inv(self.bundle.exp_tB)
        law = adjoint_law(self.spec, self.bundle.t)
        spread = SUPPORT_SIGMAS * math.sqrt(np.linalg.eigvalsh(law.covariance)[-1])
        stretch = np.linalg.norm(inverse, 2)
        return [(inverse @ center, stretch * radius + spread) for center, radius in self.base.supports()]


def heat_image(spec: OperatorSpec, f: ScalarField, t: float,
               inner: int = DEFAULT_IMAGE_SAMPLES, seed: int = 0) -> ScalarField:
    """X ↦ P_t f(X)를 스칼라 함수로 반환합니다.

    가우스/선형 함수, 라플라시안 아래의 상자 지시함수와 그 합은 닫힌 형태,
    나머지는 MonteCarloImage입니다.
    """
    image = _closed_image(spec, f, t)
    if image is None and isinstance(f, SumField):
        images = [(weight, _closed_image(spec, term, t)) for weight, term in f.terms]
        if all(term is not None for _, term in images):
            image = SumField(images)
    return MonteCarloImage(spec, f, t, inner, seed) if image is None else image


def _closed_image(spec: OperatorSpec, f: ScalarField, t: float) -> Optional[ScalarField]:
    try:
        return f.heat_image(spec, t)
    except NotImplementedError:
        return None


class GeneratorField(ScalarField):
    """𝒜f를 스칼라 함수로 감쌉니다."""

    kind = 'generator'

    def __init__(self, spec: OperatorSpec, f: ScalarField):
        self.spec, self.base, self.dim = spec, f, f.dim

    def evaluate(self, points):
        return np.asarray(self.base.generator(self.spec, points), dtype=float)

    @property
    def sup_norm(self):
        return math.inf

    def supports(self):
        return self.base.supports()


# ============ L^p 거리 ============

class GaussianMixture:
    """등가중 등방 가우스 혼합 중요도 밀도.

    tail_df를 주면 자유도 tail_df인 다변량 t 성분을 tail_weight 비율로 섞어
    거듭제곱 꼬리를 가진 함수도 덮습니다.
    """

    def __init__(self, centers: Sequence[np.ndarray], scales: Sequence[float],
                 tail_df: Optional[float] = None, tail_weight: float = TAIL_WEIGHT):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.scales = np.asarray(scales, dtype=float)
        self.dim = self.centers.shape[1]
        self._laws = [
            multivariate_normal(mean=c, cov=s ** 2 * np.eye(self.dim))
            for c, s in zip(self.centers, self.scales)
        ]
        self.tail_weight = tail_weight if tail_df else 0.0
        self._tail = None
        if tail_df:
            self._tail_loc = self.centers.mean(axis=0)
            self._tail_scale = 2.0 * float(self.scales.max())
            self._tail_df = float(tail_df)
            self._tail = multivariate_t(
                loc=self._tail_loc, shape=self._tail_scale ** 2 * np.eye(self.dim), df=self._tail_df,
            )

    @classmethod
    def covering(cls, *fields: ScalarField, tail_df: Optional[float] = None) -> 'GaussianMixture':
        """함수들의 유효 지지 (중심, 반지름)을 덮는 혼합.

        Raises:
            IllConditionedSamplerError: 유효 지지가 없거나 반지름 비가 10³을 넘는 경우.
        """
        supports = [support for f in fields for support in f.supports()]
        if not supports:
            raise IllConditionedSamplerError("유효 지지를 알 수 없는 함수입니다.", 'sampler')
        radii = np.array([radius for _, radius in supports])
        if not np.all(np.isfinite(radii)) or radii.min() <= 0.0 or radii.max() / radii.min() > MAX_SUPPORT_RATIO:
            raise IllConditionedSamplerError(
                f"유효 지지 반지름 비 {radii.max() / max(radii.min(), 1e-300):.3g}이(가) 허용치를 넘습니다.",
                'sampler',
            )
        return cls([center for center, _ in supports], 0.5 * radii, tail_df=tail_df)

    def density(self, points: np.ndarray) -> np.ndarray:
        core = np.mean([np.atleast_1d(law.pdf(points)) for law in self._laws], axis=0).reshape(-1)
        if self._tail is None:
            return core
        tail = np.atleast_1d(self._tail.pdf(points)).reshape(-1)
        return (1.0 - self.tail_weight) * core + self.tail_weight * tail

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        heavy = int(rng.binomial(m, self.tail_weight)) if self._tail is not None else 0
        counts = rng.multinomial(m - heavy, np.full(len(self._laws), 1.0 / len(self._laws)))
        parts = [
            center + scale * rng.standard_normal((count, self.dim))
            for center, scale, count in zip(self.centers, self.scales, counts)
        ]
        if heavy:
            radial = np.sqrt(rng.chisquare(self._tail_df, heavy) / self._tail_df)
            normals = rng.standard_normal((heavy, self.dim))
            parts.append(self._tail_loc + self._tail_scale * normals / radial[:, None])
        return np.concatenate(parts)[rng.permutation(m)]


def lp_distance(f: ScalarField, g: Optional[ScalarField], p: int = 1, n: int = DEFAULT_SAMPLES,
                seed: int = 0, sampler=None, workers: int = 1,
                keys: Sequence[int] = (KEY_LP,)) -> MCEstimate:
    """‖f − g‖_p의 중요도 가중 몬테카를로 추정 (g가 None이면 ‖f‖_p).

    p = 2에서는 ‖·‖₂² 추정값의 제곱근을 취하고 표준오차는 델타 방법으로 옮깁니다.

    Args:
        sampler: density(points)와 sample(rng, m)을 가진 객체.
            기본값은 두 함수의 유효 지지를 덮는 가우스 혼합입니다.
    """
    p = ValidationService.validate_p(p)
    fields = [f] if g is None else [f, g]
    sampler = sampler or GaussianMixture.covering(*fields)

    def kernel(rng, m):
        Y = sampler.sample(rng, m)
        diff = f.evaluate(Y) if g is None else f.evaluate(Y) - g.evaluate(Y)
        return np.abs(diff) ** p / sampler.density(Y)

    power = MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, keys), seed)
    if p == 1:
        return power
    root = math.sqrt(max(power.value, 0.0))
    error = 0.0 if root == 0.0 else power.std_error / (2.0 * root)
    return MCEstimate(root, error, power.n, seed)


def lp_norm(f: ScalarField, p: int = 1, **kwargs) -> MCEstimate:
    """‖f‖_p. p = 1이고 닫힌 형태가 있으면 정확한 값을 씁니다."""
    if p == 1 and isinstance(f.l1_norm, float) and not isinstance(f, (SumField, MonteCarloImage)):
        return MCEstimate.exact(f.l1_norm, kwargs.get('seed', 0))
    return lp_distance(f, None, p, **kwargs)


# ============ 반군 항등식 검사 ============

def chapman_kolmogorov_residual(spec: OperatorSpec, f: ScalarField, X, s: float, t: float,
                                n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> float:
    """P_{s+t}f(X)와 P_s(P_t f)(X)의 차이를 결합 표준오차로 나눈 비.

    중첩 경로는 바깥 √n개 표본마다 안쪽 √n개 표본을 씁니다.
    """
    X = ValidationService.validate_point(X, spec.dim)
    s = ValidationService.validate_time(s, 's')
    t = ValidationService.validate_time(t, 't')
    direct = apply_semigroup(spec, f, X, s + t, n, seed, workers, keys=(KEY_NESTED, 0))
    width = max(1, int(math.ceil(math.sqrt(n))))
    outer_bundle, inner_bundle = covariance(spec, s), covariance(spec, t)

    def kernel(rng, m):
        Y1 = outer_bundle.exp_tB @ X + rng.standard_normal((m, spec.dim)) @ outer_bundle.sqrt_2tK.T
        means = Y1 @ inner_bundle.exp_tB.T
        Z = rng.standard_normal((m, width, spec.dim)) @ inner_bundle.sqrt_2tK.T
        Y2 = (means[:, None, :] + Z).reshape(-1, spec.dim)
        return f.evaluate(Y2).reshape(m, width).mean(axis=1)

    nested = MCEstimate.from_samples(run_chunks(kernel, width, seed, workers, (KEY_NESTED, 1)), seed)
    ratio = z_score(direct, nested)
    logger.info(f"Chapman-Kolmogorov 잔차: s={s:g}, t={t:g}, 비={ratio:.3g}")
    return ratio


def lprate_check(spec: OperatorSpec, f: ScalarField, t: float, p: int = 1,
                 n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> BoundCheck:
    """‖P_t f − f‖_p ≤ ‖𝒜f‖_p · max{1, e^{−t trB/p}} · t."""
    t = ValidationService.validate_time(t)
    lhs = lp_distance(heat_image(spec, f, t, seed=seed), f, p, n, seed, workers=workers)
    norm = lp_distance(GeneratorField(spec, f), None, p, n, seed, workers=workers, keys=(KEY_LP, 1))
    factor = max(1.0, math.exp(-t * spec.trace / p)) * t
    return BoundCheck(lhs, norm.scaled(factor))


def contraction_check(spec: OperatorSpec, f: ScalarField, t: float, p: int = 1,
                      n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> BoundCheck:
    """‖P_t f‖_p ≤ e^{−t trB/p}‖f‖_p."""
    t = ValidationService.validate_time(t)
    lhs = lp_norm(heat_image(spec, f, t, seed=seed), p, n=n, seed=seed, workers=workers)
    rhs = lp_norm(f, p, n=n, seed=seed, workers=workers, keys=(KEY_LP, 1))
    return BoundCheck(lhs, rhs.scaled(math.exp(-t * spec.trace / p)))


@dataclass(frozen=True)
class UltracontractivityReport:
    """max |P_t f(X)|·V(t)/‖f‖₁의 경험적 상수.

    Attributes:
        constant: 경험적 상수.
        bound: 핵 상한에서 오는 허용 상수 c_N.
        worst: 최댓값을 준 (t, X 번호).
    """
    constant: float
    bound: float
    worst: Tuple[float, int]

    @property
    def ok(self) -> bool:
        return self.constant <= self.bound

    def to_dict(self) -> dict:
        return {'constant': self.constant, 'bound': self.bound, 'worst_t': self.worst[0], 'ok': self.ok}


def ultracontractivity_constant(spec: OperatorSpec, f: ScalarField, points, times: Sequence[float],
                                n: int = DEFAULT_SAMPLES, seed: int = 0,
                                workers: int = 1) -> UltracontractivityReport:
    """격자 위에서 |P_t f(X)| ≤ c‖f‖₁/V(t)의 c를 보정합니다.

    닫힌 형태가 없으면 추정값 − 4·표준오차를 사용합니다.
    """
    l1 = f.l1_norm
    if not l1:
        raise DomainError("적분 가능한 함수가 필요합니다.", 'f')
    points, _ = as_points(points, spec.dim)
    best, worst = 0.0, (float(times[0]), 0)
    for t in times:
        V = covariance(spec, t).V
        if f.has_heat_flow:
            values = np.abs(np.atleast_1d(f.heat_flow(spec, t, points)))
        else:
            values = np.array([
                max(0.0, abs(est.value) - 4.0 * est.std_error)
                for est in (apply_semigroup(spec, f, X, t, n, seed, workers) for X in points)
            ])
        index = int(np.argmax(values))
        candidate = float(values[index]) * V / l1
        if candidate > best:
            best, worst = candidate, (float(t), index)
    return UltracontractivityReport(constant=best, bound=operators.kernel_constant(spec.dim), worst=worst)


# ============ 핵 질량 ============

def kernel_mass(spec: OperatorSpec, X, t: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
                workers: int = 1) -> MCEstimate:
    """∫ p(X, Y, t) dY를 넓힌 가우스 제안분포로 중요도 샘플링합니다 (기댓값 1)."""
    X = ValidationService.validate_point(X, spec.dim)
    bundle = covariance(spec, t)
    proposal = multivariate_normal(
        mean=bundle.exp_tB @ X, cov=MASS_PROPOSAL_SCALE ** 2 * 2.0 * bundle.tK, allow_singular=False,
    )
    root = MASS_PROPOSAL_SCALE * bundle.sqrt_2tK

    def kernel(rng, m):
        Y = proposal.mean + rng.standard_normal((m, spec.dim)) @ root.T
        density = np.atleast_1d(operators.kernel_density(spec, X, Y, bundle.t))
        return density / np.atleast_1d(proposal.pdf(Y))

    return MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, (KEY_MASS, 0)), seed)


def adjoint_mass(spec: OperatorSpec, Y, t: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
                 workers: int = 1) -> MCEstimate:
    """∫ p(X, Y, t) dX의 중요도 샘플링 추정 (기댓값 e^{−t trB})."""
    Y = ValidationService.validate_point(Y, spec.dim)
    bundle = covariance(spec, t)
    law = adjoint_law(spec, bundle.t)
    proposal = multivariate_normal(mean=law.mean_map @ Y, cov=MASS_PROPOSAL_SCALE ** 2 * law.covariance)
    root = MASS_PROPOSAL_SCALE * law.sqrt_covariance
    inverse_K = np.linalg.inv(bundle.K)
    c = operators.kernel_constant(spec.dim) / bundle.V

    def kernel(rng, m):
        X = proposal.mean + rng.standard_normal((m, spec.dim)) @ root.T
        diff = Y - X @ bundle.exp_tB.T
        m2 = np.einsum('ij,jk,ik->i', diff, inverse_K, diff)
        return c * np.exp(-m2 / (4.0 * bundle.t)) / np.atleast_1d(proposal.pdf(X))

    return MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, (KEY_MASS, 1)), seed)


def decay_profile(spec: OperatorSpec, f: ScalarField, X, times: Sequence[float], n: int = DEFAULT_SAMPLES,
                  seed: int = 0, workers: int = 1) -> List[MCEstimate]:
    """t ↦ P_t f(X)를 공통 난수로 추정합니다. trB ≥ 0이면 0으로 감쇠합니다."""
    X = ValidationService.validate_point(X, spec.dim)
    times = [ValidationService.validate_time(t) for t in times]

    def kernel(rng, m):
        return forward_paths(spec, f, X, times, rng.standard_normal((m, spec.dim)))

    values = run_chunks(kernel, n, seed, workers, (KEY_FORWARD, 2))
    return [MCEstimate.from_samples(values[:, j], seed) for j in range(len(times))]
