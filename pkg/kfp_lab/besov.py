"""베소프 반노름 𝒩_{2s,1}, 여면적 공식, 층 케이크 보조정리, 강한 소볼레프 매장.

𝒩_{α,1}(f) = ∫₀^∞ t^{−1−α/2} ∫∫ p(X, Y, t)|f(Y) − f(X)| dY dX dt의 안쪽 이중
적분은 쌍 (X, Y)를 두 성분 혼합에서 뽑아 추정합니다. 절반은 X ~ h/M 뒤 전진 핵으로
Y를, 나머지 절반은 Y ~ h/M 뒤 수반 법칙으로 X를 뽑으면 결합 밀도가
p(X, Y, t)(h(X) + e^{t trB}h(Y))/(2M)이 되어 p가 약분됩니다.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.optimize import brentq
from scipy.special import gamma, ndtr

from .fields import BumpField, GaussianField, IndicatorField, ScalarField
from .fractional import FracEstimate, FracQuadSpec
from .operators import OperatorSpec, adjoint_law, covariance, intrinsic_dimensions
from .perimeter import (
    PerimeterEstimate,
    frac_perimeter,
    isoperimetric_constant,
    near_extrapolation,
)
from .regions import Ellipsoid, Region
from .rng import run_chunks
from .semigroup import DEFAULT_SAMPLES, MCEstimate, lp_norm, z_score
from .validators import (
    DomainError,
    PreconditionError,
    RangeError,
    ValidationService,
)

logger = logging.getLogger(__name__)


KEY_BESOV = 41
KEY_LQ = 42

DEFAULT_LEVELS = 24
MONOTONE_GRID = 2001
LEVEL_HEADER = ('sigma', 'measure', 'per_value')


def _order(alpha) -> float:
    """α = 2s ∈ (0, 1)을 받아 s를 돌려줍니다."""
    return 0.5 * ValidationService.validate_order(alpha, upper=1.0, field_name='alpha', error_class=RangeError)


# ============ 베소프 반노름 ============

@dataclass(frozen=True)
class BesovEstimate(FracEstimate):
    """𝒩_{α,1} 추정값.

    Attributes:
        beta: 작은 시간 J(t) = ∫∫p|f(Y) − f(X)|의 거듭제곱 적합 지수.
        warnings: 외삽 생략 등 경고.
    """
    beta: Optional[float] = None
    warnings: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update({'beta': self.beta, 'warnings': list(self.warnings)})
        return data


def _pair_samples(spec: OperatorSpec, f: ScalarField, times: np.ndarray, n: int, seed: int,
                  workers: int) -> np.ndarray:
    """표본별 ∫∫p|f(Y) − f(X)| 추정값 (n, len(times)), 시각 사이 공통 난수."""
    mass = f.dominating_mass
    bundles = [covariance(spec, t) for t in times]
    laws = [adjoint_law(spec, t) for t in times]
    growth = np.exp(np.asarray(times) * spec.trace)

    def weight(other, forward, h_base, f_base, j):
        h_other = f.dominating(other)
        h_x = np.where(forward, h_base, h_other)
        h_y = np.where(forward, h_other, h_base)
        denom = h_x + growth[j] * h_y
        diff = np.abs(f.evaluate(other) - f_base)
        return np.where(denom > 0.0, 2.0 * mass * diff / np.where(denom > 0.0, denom, 1.0), 0.0)

    def kernel(rng, m):
        base = f.sample_dominating(rng, m)
        forward = rng.random(m) < 0.5
        Z = rng.standard_normal((m, spec.dim))
        h_base, f_base = f.dominating(base), f.evaluate(base)
        out = np.empty((m, len(times)))
        for j, (bundle, law) in enumerate(zip(bundles, laws)):
            ahead = base @ bundle.exp_tB.T
            behind = base @ law.mean_map.T
            spread_ahead = Z @ bundle.sqrt_2tK.T
            spread_behind = Z @ law.sqrt_covariance.T
            plus = np.where(forward[:, None], ahead + spread_ahead, behind + spread_behind)
            minus = np.where(forward[:, None], ahead - spread_ahead, behind - spread_behind)
            out[:, j] = 0.5 * (weight(plus, forward, h_base, f_base, j)
                               + weight(minus, forward, h_base, f_base, j))
        return out

    return run_chunks(kernel, n, seed, workers, (KEY_BESOV,))


def besov_seminorm(spec: OperatorSpec, f: ScalarField, alpha: float, p: int = 1, n: int = DEFAULT_SAMPLES,
                   seed: int = 0, workers: int = 1, quad: Optional[FracQuadSpec] = None) -> BesovEstimate:
    """𝒩_{α,1}(f).

    시간 적분은 FracQuadSpec 노드 위에서 하고, [0, t_min]은 거듭제곱 적합,
    [T₁, ∞)는 J(t) → (1 + e^{−t trB})‖f‖₁ 꼬리로 처리합니다.

    Args:
        spec: tr B ≥ 0인 연산자.
        f: 지배 밀도를 가진 적분 가능한 함수.
        alpha: 차수 α ∈ (0, 1).
        p: 1만 지원합니다.
        n: 표본 수.
        seed: 마스터 시드.
        workers: 병렬 청크 수.
        quad: 시간 적분 설정 (s = α/2로 덮어씁니다).

    Raises:
        RangeError: α ∉ (0, 1).
        PreconditionError: tr B < 0.
    """
    s = _order(alpha)
    ValidationService.validate_p(p, allowed=(1,))
    if not spec.trace_flag:
        raise PreconditionError("베소프 반노름은 tr B ≥ 0에서만 계산합니다.", 'spec')
    if f.is_constant:
        return BesovEstimate(value=0.0, std_error=0.0, n=n, seed=seed)
    quad = FracQuadSpec(s=s) if quad is None else replace(quad, s=s)
    times, weights = quad.nodes()
    coarse_times, coarse_weights = quad.coarse_nodes()
    all_times = np.concatenate([times, coarse_times])
    samples = _pair_samples(spec, f, all_times, n, seed, workers)
    fine = MCEstimate.from_samples(samples[:, :times.size] @ (weights * times ** (-1.0 - s)), seed)
    coarse = float(np.mean(samples[:, times.size:] @ (coarse_weights * coarse_times ** (-1.0 - s))))
    means = samples[:, :times.size].mean(axis=0)

    near, near_error, beta, warning = near_extrapolation(times, means, s, quad.t_min)
    warnings = ()
    if warning:
        logger.warning(warning)
        warnings = (warning,)
    l1 = lp_norm(f, 1, n=n, seed=seed, workers=workers).value
    limit = (1.0 + math.exp(-quad.tail_cut * spec.trace)) * l1
    tail = limit * quad.tail_cut ** (-s) / s
    shortfall = max(0.0, 1.0 - means[-1] / limit) if limit > 0.0 else 0.0
    value = fine.value + near + tail
    quad_error = abs(fine.value - coarse) + near_error + shortfall * tail
    logger.info(f"베소프 반노름: α={2 * s:g}, n={n}, 값={value:.6g}, MC={fine.std_error:.2g}, 구적={quad_error:.2g}")
    return BesovEstimate(
        value=value, std_error=math.hypot(fine.std_error, quad_error), n=n, seed=seed,
        mc_error=fine.std_error, quad_error=quad_error, tail_bound=shortfall * tail,
        beta=beta, warnings=warnings,
    )


def besov_norm(spec: OperatorSpec, f: ScalarField, s: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
               workers: int = 1) -> MCEstimate:
    """‖f‖_{B^{2s,1}} = ‖f‖₁ + 𝒩_{2s,1}(f)."""
    l1 = lp_norm(f, 1, n=n, seed=seed, workers=workers)
    seminorm = besov_seminorm(spec, f, 2.0 * s, 1, n, seed, workers)
    return MCEstimate(l1.value + seminorm.value, math.hypot(l1.std_error, seminorm.std_error), n, seed)


@dataclass(frozen=True)
class ConsistencyReport:
    """𝒩_{2s,1}(1_E)와 (Γ(1−s)/s) Per_s(E)의 비교."""
    besov: BesovEstimate
    perimeter: MCEstimate

    @property
    def z(self) -> float:
        return z_score(self.besov, self.perimeter)

    @property
    def ok(self) -> bool:
        return self.z <= 4.0

    def to_dict(self) -> dict:
        return {'besov': self.besov.value, 'besov_err': self.besov.std_error,
                'perimeter': self.perimeter.value, 'perimeter_err': self.perimeter.std_error,
                'z': self.z, 'ok': self.ok}


def indicator_consistency(spec: OperatorSpec, region: Region, s: float, n: int = DEFAULT_SAMPLES,
                          seed: int = 0, workers: int = 1) -> ConsistencyReport:
    """지시함수의 베소프 반노름과 분수 둘레를 서로 다른 스트림으로 비교합니다."""
    besov = besov_seminorm(spec, IndicatorField(region), 2.0 * s, 1, n, seed, workers)
    estimate = frac_perimeter(spec, region, s, n=n, seed=seed, workers=workers, method='mc')
    scale = gamma(1.0 - s) / s
    return ConsistencyReport(besov=besov, perimeter=estimate.as_estimate().scaled(scale))


def gagliardo_kernel(alpha: float) -> float:
    """1차원 라플라시안에서 ∫₀^∞ t^{−1−α/2} p(x, y, t) dt = κ |x − y|^{−1−α}의 κ."""
    s = 0.5 * alpha
    return gamma(0.5 + s) * 4.0 ** (0.5 + s) / (2.0 * math.sqrt(math.pi))


def gagliardo_oracle(f: GaussianField, alpha: float) -> float:
    """1차원 가우스 함수의 𝒩_{α,1}을 명시적 핵의 이중 적분으로 계산합니다.

    대칭 단봉 함수이므로 ∫|f(x + h) − f(x)| dx = 2M(2Φ(h/2σ) − 1)이고
    𝒩 = 2κ ∫₀^∞ h^{−1−α} · 2M(2Φ(h/2σ) − 1) dh 입니다.
    """
    if not isinstance(f, GaussianField) or f.dim != 1:
        raise PreconditionError("가글리아르도 대조값은 1차원 가우스 함수에서만 계산합니다.", 'f')
    ValidationService.validate_order(alpha, upper=1.0, field_name='alpha', error_class=RangeError)
    sigma = math.sqrt(float(f.covariance[0, 0]))
    mass = abs(f.amplitude) * math.sqrt(2.0 * math.pi) * sigma

    def integrand(h):
        return h ** (-1.0 - alpha) * 2.0 * mass * (2.0 * ndtr(h / (2.0 * sigma)) - 1.0)

    split = 20.0 * sigma
    near, _ = integrate.quad(integrand, 0.0, split, limit=200, epsabs=0.0, epsrel=1e-10)
    far, _ = integrate.quad(integrand, split, math.inf, limit=200, epsabs=0.0, epsrel=1e-10)
    return 2.0 * gagliardo_kernel(alpha) * (near + far)


# ============ 등위 집합 ============

@dataclass(frozen=True)
class LevelSetProfile:
    """준오목 함수 f ≥ 0의 상위 등위 집합 E_σ = {f > σ}.

    가우스와 범프만 허용하며 E_σ는 타원체의 닫힌 형태입니다.
    """
    field: ScalarField

    def __post_init__(self):
        if not isinstance(self.field, (GaussianField, BumpField)):
            raise PreconditionError("등위 집합 프로파일은 가우스 또는 범프 함수만 지원합니다.", 'field')
        if self.field.amplitude <= 0.0:
            raise DomainError("프로파일의 진폭은 양수여야 합니다.", 'amplitude')

    @property
    def sigma_max(self) -> float:
        return self.field.amplitude

    @property
    def dim(self) -> int:
        return self.field.dim

    def level_region(self, sigma: float) -> Optional[Region]:
        if sigma >= self.sigma_max:
            return None
        if isinstance(self.field, BumpField):
            return self.field.level_region(sigma)
        if sigma <= 0.0:
            raise DomainError("가우스 프로파일의 E_σ는 σ > 0에서만 유한합니다.", 'sigma')
        scale = 2.0 * math.log(self.sigma_max / sigma)
        return Ellipsoid(center=self.field.center, shape=scale * self.field.covariance)

    def measure(self, sigma: float) -> float:
        region = self.level_region(sigma)
        return 0.0 if region is None else region.measure

    def layer_integral(self, integrand: Callable[[float, float], float], lo: float = 0.0,
                       hi: Optional[float] = None) -> float:
        """∫_lo^hi integrand(σ, |E_σ|) dσ."""
        hi = self.sigma_max if hi is None else hi
        if hi <= lo:
            return 0.0
        value, _ = integrate.quad(lambda sigma: integrand(sigma, self.measure(sigma)), lo, hi,
                                  limit=200, epsabs=0.0, epsrel=1e-10)
        return value

    def lq_norm(self, q: float) -> float:
        """층 케이크 공식 ‖f‖_q = (q ∫ σ^{q−1}|E_σ| dσ)^{1/q}."""
        return (q * self.layer_integral(lambda sigma, m: sigma ** (q - 1.0) * m)) ** (1.0 / q)

    def threshold(self) -> float:
        """σ_f = sup{σ > 0 : |E_σ| > 1}. 그런 σ가 없으면 0."""
        low = self.sigma_max * 1e-12
        if self.measure(low) <= 1.0:
            return 0.0
        return brentq(lambda sigma: self.measure(sigma) - 1.0, low, self.sigma_max, xtol=1e-14, rtol=1e-12)


def level_nodes(profile: LevelSetProfile, n_levels: int) -> Tuple[np.ndarray, np.ndarray]:
    """(0, σ_max) 위의 σ 노드와 dσ 가중치.

    σ = σ_max(1 − u²) 치환으로 σ → σ_max의 (σ_max − σ)^γ 거동을 매끄럽게 합니다.
    """
    if n_levels < 2:
        raise DomainError("n_levels는 2 이상이어야 합니다.", 'n_levels')
    x, w = np.polynomial.legendre.leggauss(n_levels)
    u = 0.5 * (x + 1.0)
    top = profile.sigma_max
    return top * (1.0 - u ** 2), 0.5 * w * 2.0 * top * u


# ============ 여면적 공식 ============

@dataclass(frozen=True)
class CoareaReport:
    """𝒩_{2s,1}(f)와 (Γ(1−s)/s) ∫ Per_s(E_σ) dσ의 비교.

    Attributes:
        lhs: 베소프 반노름.
        rhs: 등위 집합 둘레의 σ 적분.
        levels: (σ, |E_σ|, Per_s(E_σ)) 표.
    """
    lhs: BesovEstimate
    rhs: MCEstimate
    levels: Tuple[Tuple[float, float, float], ...]

    @property
    def residual(self) -> float:
        return abs(self.lhs.value - self.rhs.value) / abs(self.lhs.value)

    def level_rows(self) -> List[dict]:
        return [dict(zip(LEVEL_HEADER, row)) for row in self.levels]

    def to_dict(self) -> dict:
        return {'lhs': self.lhs.value, 'lhs_err': self.lhs.std_error, 'rhs': self.rhs.value,
                'rhs_err': self.rhs.std_error, 'residual': self.residual, 'levels': self.level_rows()}


def coarea_residual(spec: OperatorSpec, profile: LevelSetProfile, s: float, n_levels: int = DEFAULT_LEVELS,
                    n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1,
                    quad: Optional[FracQuadSpec] = None) -> CoareaReport:
    """여면적 공식의 양변을 독립적으로 계산합니다.

    등위마다 분수 둘레를 따로 계산하며 등위 단위로 병렬 실행합니다.

    Raises:
        RangeError: s ∉ (0, 1/2).
    """
    s = ValidationService.validate_order(s, upper=0.5, error_class=RangeError)
    if profile.dim != spec.dim:
        raise DomainError(f"프로파일은 {spec.dim}차원이어야 합니다.", 'profile')
    sigmas, weights = level_nodes(profile, n_levels)
    regions = [profile.level_region(float(sigma)) for sigma in sigmas]

    def level(region) -> PerimeterEstimate:
        return frac_perimeter(spec, region, s, quad, n, seed, 1)

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        estimates = list(pool.map(level, regions))
    scale = gamma(1.0 - s) / s
    value = scale * float(sum(w * est.value for w, est in zip(weights, estimates)))
    error = scale * float(sum(w * est.std_error for w, est in zip(weights, estimates)))
    rhs = MCEstimate(value, error, n, seed)
    lhs = besov_seminorm(spec, profile.field, 2.0 * s, 1, n, seed, workers, quad)
    levels = tuple(
        (float(sigma), region.measure, est.value) for sigma, region, est in zip(sigmas, regions, estimates)
    )
    report = CoareaReport(lhs=lhs, rhs=rhs, levels=levels)
    logger.info(f"여면적 공식: s={s:g}, 등위 {n_levels}개, 좌변={lhs.value:.6g}, 우변={value:.6g}, "
                f"잔차={report.residual:.3g}")
    return report


# ============ 층 케이크, 소볼레프 ============

@dataclass(frozen=True)
class LayerCakeReport:
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-6)

    def to_dict(self) -> dict:
        return {'lhs': self.lhs, 'rhs': self.rhs, 'ok': self.ok}


def _check_non_increasing(G: Callable[[float], float], support: float):
    if math.isfinite(support):
        grid = np.linspace(0.0, support, MONOTONE_GRID)
    else:
        grid = np.concatenate([[0.0], np.logspace(-6, 6, MONOTONE_GRID)])
    values = np.array([G(float(t)) for t in grid])
    if np.any(values < 0.0):
        raise PreconditionError("G는 음이 아니어야 합니다.", 'G')
    rises = np.diff(values)
    if np.any(rises > 1e-12 * max(1.0, float(np.max(values)))):
        where = float(grid[int(np.argmax(rises)) + 1])
        raise PreconditionError(f"G가 t={where:.4g} 부근에서 증가합니다.", 'G')


def layercake_check(G: Callable[[float], float], D: float, s: float, support: float = math.inf,
                    breakpoints: Sequence[float] = ()) -> LayerCakeReport:
    """D/(D−2s) ∫₀^∞ t^{2s/(D−2s)} G(t) dt ≤ (∫₀^∞ G(t)^{(D−2s)/D} dt)^{D/(D−2s)}.

    Args:
        G: 음이 아닌 비증가 함수.
        D: 차원 (> 2s).
        s: 차수 (> 0).
        support: G가 이후 0인 점 (없으면 inf).
        breakpoints: 구적에 알려 줄 불연속점.

    Raises:
        PreconditionError: G가 격자 위에서 증가하는 경우.
        DomainError: D ≤ 2s.
    """
    s = ValidationService.validate_time(s, 's')
    if not D > 2.0 * s:
        raise DomainError("D > 2s 이어야 합니다.", 'D')
    _check_non_increasing(G, support)
    exponent = 2.0 * s / (D - 2.0 * s)
    power = (D - 2.0 * s) / D
    options = {'limit': 400, 'epsabs': 1e-14, 'epsrel': 1e-12}
    if math.isfinite(support):
        points = [p for p in breakpoints if 0.0 < p < support] or None
        first, _ = integrate.quad(lambda t: t ** exponent * G(t), 0.0, support, points=points, **options)
        second, _ = integrate.quad(lambda t: G(t) ** power, 0.0, support, points=points, **options)
    else:
        first, _ = integrate.quad(lambda t: t ** exponent * G(t), 0.0, math.inf, **options)
        second, _ = integrate.quad(lambda t: G(t) ** power, 0.0, math.inf, **options)
    return LayerCakeReport(lhs=D / (D - 2.0 * s) * first, rhs=second ** (1.0 / power))


@dataclass(frozen=True)
class SobolevReport:
    """‖f‖ ≤ (k s / (i(s) Γ(1−s))) 𝒩_{2s,1}(f) 검사 결과 (단일 영역 k = 1, 두 영역 k = 2).

    Attributes:
        lhs: 단일 영역은 ‖f‖_{D/(D−2s)}, 두 영역은 ‖f₁‖_{q₀} + ‖f₂‖_{q∞}.
        middle: 층 케이크 단계의 중간값.
        rhs: 우변.
        constant: 사용한 등주 상수 i(s).
        regime: 'single' 또는 'two-regime'.
        threshold: 두 영역 분할의 σ_f.
        parts: (‖f₁‖_{q₀}, ‖f₂‖_{q∞}).
    """
    lhs: MCEstimate
    middle: float
    rhs: MCEstimate
    constant: float
    regime: str
    threshold: Optional[float] = None
    parts: Optional[Tuple[float, float]] = None

    @property
    def ratio(self) -> float:
        return self.lhs.value / self.rhs.value

    @property
    def ok(self) -> bool:
        return self.lhs.value <= self.rhs.value + 4.0 * math.hypot(self.lhs.std_error, self.rhs.std_error)

    def to_dict(self) -> dict:
        return {
            'lhs': self.lhs.value, 'lhs_err': self.lhs.std_error, 'middle': self.middle,
            'rhs': self.rhs.value, 'rhs_err': self.rhs.std_error, 'constant': self.constant,
            'regime': self.regime, 'threshold': self.threshold,
            'parts': None if self.parts is None else list(self.parts), 'ratio': self.ratio, 'ok': self.ok,
        }


def lq_norm_mc(f: ScalarField, q: float, n: int = DEFAULT_SAMPLES, seed: int = 0, workers: int = 1) -> MCEstimate:
    """f ≥ 0에서 h = f/M 중요도 샘플링으로 ‖f‖_q = (M·E[f^{q−1}])^{1/q}."""
    mass = f.dominating_mass

    def kernel(rng, m):
        Y = f.sample_dominating(rng, m)
        return mass * np.abs(f.evaluate(Y)) ** (q - 1.0)

    power = MCEstimate.from_samples(run_chunks(kernel, n, seed, workers, (KEY_LQ,)), seed)
    value = power.value ** (1.0 / q)
    return MCEstimate(value, value * power.relative_error / q, n, seed)


def split_norms(profile: LevelSetProfile, q0: float, qinf: float) -> Tuple[float, float, float]:
    """f₁ = f·1_{E_σf}, f₂ = f − f₁로 나눈 ‖f₁‖_{q₀}, ‖f₂‖_{q∞}와 σ_f."""
    sigma_f = profile.threshold()
    top = profile.measure(sigma_f) if sigma_f > 0.0 else 0.0
    first = (sigma_f ** q0 * top
             + q0 * profile.layer_integral(lambda sigma, m: sigma ** (q0 - 1.0) * m, lo=sigma_f))
    if sigma_f == 0.0:
        return first ** (1.0 / q0), 0.0, 0.0
    second = qinf * profile.layer_integral(lambda sigma, m: sigma ** (qinf - 1.0) * (m - top), hi=sigma_f)
    return first ** (1.0 / q0), max(second, 0.0) ** (1.0 / qinf), sigma_f


def sobolev_ratio(spec: OperatorSpec, f: ScalarField, s: float, n: int = DEFAULT_SAMPLES, seed: int = 0,
                  workers: int = 1) -> SobolevReport:
    """강한 소볼레프 매장을 검사합니다.

    동차 연산자는 ‖f‖_{D/(D−2s)}를, D₀ > D∞이면 σ_f에서 나눈 두 조각의 노름 합을
    좌변으로 씁니다. i(s)는 보간 부등식에서 얻은 등주 상수입니다.

    Raises:
        RangeError: s ∉ (0, 1/2).
        PreconditionError: f가 가우스/범프 프로파일이 아니거나 D₀ < D∞.
    """
    s = ValidationService.validate_order(s, upper=0.5, error_class=RangeError)
    profile = LevelSetProfile(f)
    dims = intrinsic_dimensions(spec)
    constant = isoperimetric_constant(spec, s, dims)
    seminorm = besov_seminorm(spec, f, 2.0 * s, 1, n, seed, workers)
    D0, Dinf = round(dims.D0), round(dims.Dinf)
    if dims.regime == 'homogeneous':
        q = D0 / (D0 - 2.0 * s)
        lhs = lq_norm_mc(f, q, n, seed, workers)
        middle = profile.layer_integral(lambda sigma, m: m ** (1.0 / q))
        rhs = seminorm.scaled(s / (constant * gamma(1.0 - s)))
        report = SobolevReport(lhs=lhs, middle=middle, rhs=rhs, constant=constant, regime='single')
    else:
        q0, qinf = D0 / (D0 - 2.0 * s), Dinf / (Dinf - 2.0 * s)
        first, second, sigma_f = split_norms(profile, q0, qinf)
        middle = 2.0 * profile.layer_integral(lambda sigma, m: min(m ** (1.0 / q0), m ** (1.0 / qinf)))
        rhs = seminorm.scaled(2.0 * s / (constant * gamma(1.0 - s)))
        report = SobolevReport(
            lhs=MCEstimate.exact(first + second, seed), middle=middle, rhs=rhs, constant=constant,
            regime='two-regime', threshold=sigma_f, parts=(first, second),
        )
    if not report.ok:
        logger.warning(f"소볼레프 매장 위반: 좌변={report.lhs.value:.6g} > 우변={report.rhs.value:.6g}")
    logger.info(f"소볼레프 매장: s={s:g}, 영역={report.regime}, 비={report.ratio:.4g}")
    return report
