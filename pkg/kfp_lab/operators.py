"""Kolmogorov-Fokker-Planck 연산자 모델.

연산자 𝒜u = tr(Q∇²u) + <BX, ∇u>를 (Q, B) 쌍으로 정의하고, 공분산 K(t),
부피 함수 V(t), 의사 거리 m_t, 열 핵 p(X, Y, t), 내재 차원 D₀/D∞를 계산합니다.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import expm
from scipy.special import gamma

from .matlin import frozen, is_psd, is_symmetric, mat_exp, psd_sqrt, sym_spectrum
from .validators import (
    HYPOELLIPTIC_TOLERANCE,
    PSD_TOLERANCE,
    DomainError,
    HypoellipticityError,
    NotFoundError,
    NotPSDError,
    ValidationError,
    ValidationService,
)

logger = logging.getLogger(__name__)


DEFAULT_HYPOELLIPTIC_GRID = tuple(np.logspace(-4, 4, 32))
SMALL_TIME_DECADES = (1e-4, 1e-2)
LARGE_TIME_DECADES = (1e2, 1e4)
DIMENSION_FIT_POINTS = 9
DIMENSION_FIT_RESIDUAL = 0.05
REGIME_TOLERANCE = 0.1
VAN_LOAN_MAX_EXPONENT = 10.0
CATALOG_NAMES = ('laplace', 'kolmogorov', 'kramers', 'ornstein_uhlenbeck')


# ============ 상수 ============

def unit_ball_volume(N: int) -> float:
    """N차원 단위 공의 부피 ω_N = π^{N/2} / Γ(N/2 + 1)."""
    return math.pi ** (N / 2) / gamma(N / 2 + 1)


def kernel_constant(N: int) -> float:
    """열 핵의 정규화 상수 c_N = ω_N (4π)^{−N/2}.

    p(X, Y, t) = c_N / V(t) · exp(−m_t²/4t)가 평균 e^{tB}X, 공분산 2tK(t)인
    가우스 밀도와 일치하도록 정해집니다.
    """
    return unit_ball_volume(N) * (4 * math.pi) ** (-N / 2)


def square_constant(N: int) -> float:
    """∫ p(X, Y, t)² dX = a_N e^{−t trB} / V(t)의 상수 a_N = ω_N (8π)^{−N/2}.

    c_N² (2π)^{N/2} / ω_N와 같습니다.
    """
    return unit_ball_volume(N) * (8 * math.pi) ** (-N / 2)


# ============ 도메인 타입 ============

@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """연산자 (Q, B) 쌍.

    행렬은 생성 시 검증 후 쓰기 불가능한 배열로 고정됩니다. 반올림으로 생긴
    Q의 미세한 음의 고유값은 0으로 잘라냅니다.

    Attributes:
        dim: 공간 차원 N.
        Q: 확산 행렬 (대칭 PSD).
        B: 드리프트 행렬.
        name: 표시용 이름.
        dilation_weights: 동차 연산자의 비등방 확대 지수 (없으면 None).
    """
    dim: int
    Q: np.ndarray
    B: np.ndarray
    name: str = ''
    dilation_weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        Q = ValidationService.validate_matrix(self.Q, 'Q')
        B = ValidationService.validate_matrix(self.B, 'B')
        if Q.shape != (self.dim, self.dim) or B.shape != (self.dim, self.dim):
            raise ValidationError(f"Q와 B는 {self.dim}×{self.dim} 행렬이어야 합니다.", 'dim')
        if not is_symmetric(Q):
            raise ValidationError("Q는 대칭 행렬이어야 합니다.", 'Q')
        if not is_psd(Q, PSD_TOLERANCE):
            raise NotPSDError("Q가 양의 준정부호가 아닙니다.", 'Q')
        eigvals, eigvecs = np.linalg.eigh(0.5 * (Q + Q.T))
        Q = (eigvecs * np.clip(eigvals, 0.0, None)) @ eigvecs.T
        object.__setattr__(self, 'Q', frozen(0.5 * (Q + Q.T)))
        object.__setattr__(self, 'B', frozen(B))
        if self.dilation_weights is not None:
            object.__setattr__(self, 'dilation_weights', tuple(float(w) for w in self.dilation_weights))

    @property
    def trace(self) -> float:
        """tr B."""
        return float(np.trace(self.B))

    @property
    def trace_flag(self) -> bool:
        """tr B ≥ 0 여부."""
        return self.trace >= 0.0

    @property
    def is_laplacian(self) -> bool:
        """Q = I, B = 0 인 고전 라플라시안 여부."""
        return bool(np.array_equal(self.Q, np.eye(self.dim)) and not np.any(self.B))

    @property
    def key(self) -> tuple:
        return (self.dim, self.Q.tobytes(), self.B.tobytes())

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorSpec) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def to_dict(self) -> dict:
        """연산자 JSON 파일 형식으로 변환합니다."""
        return {
            'dim': self.dim,
            'Q': self.Q.tolist(),
            'B': self.B.tolist(),
            'name': self.name,
        }


@dataclass(frozen=True)
class CovarianceBundle:
    """시각 t에서의 공분산 스냅샷.

    Attributes:
        t: 시간.
        K: K(t) = tK(t) / t.
        tK: ∫₀ᵗ e^{sB} Q e^{sB*} ds.
        sqrt_2tK: 2tK(t)의 대칭 제곱근.
        det_tK: det tK(t).
        V: V(t) = ω_N (det tK)^{1/2}.
        exp_tB: e^{tB}.
    """
    t: float
    K: np.ndarray
    tK: np.ndarray
    sqrt_2tK: np.ndarray
    det_tK: float
    V: float
    exp_tB: np.ndarray


@dataclass(frozen=True)
class HypoellipticityReport:
    """격자 위 hypoellipticity 검사 결과."""
    ok: bool
    worst_min_eig: float
    worst_t: float


@dataclass(frozen=True)
class DimensionReport:
    """V(t)의 로그-로그 기울기로 추정한 내재 차원.

    Attributes:
        D0: t → 0⁺ 구간 기울기의 2배.
        Dinf: t → ∞ 구간 기울기의 2배.
        regime: homogeneous, crossing, expanding 중 하나.
        residual0: 작은 시간 구간 적합의 최대 잔차.
        residual_inf: 큰 시간 구간 적합의 최대 잔차.
        warnings: 거듭제곱 법칙에서 벗어난 경우의 경고 목록.
    """
    D0: float
    Dinf: float
    regime: str
    residual0: float = 0.0
    residual_inf: float = 0.0
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'D0': self.D0,
            'Dinf': self.Dinf,
            'regime': self.regime,
            'residual0': self.residual0,
            'residual_inf': self.residual_inf,
            'warnings': list(self.warnings),
        }


@dataclass(frozen=True)
class AdjointLaw:
    """p(·, Y, t)를 첫 번째 인자의 함수로 본 가우스 법칙.

    Attributes:
        mass: e^{−t trB}.
        mean_map: e^{−tB} (평균 = mean_map @ Y).
        covariance: 2t e^{−tB} K(t) e^{−tB*}.
        sqrt_covariance: covariance의 대칭 제곱근.
    """
    mass: float
    mean_map: np.ndarray
    covariance: np.ndarray
    sqrt_covariance: np.ndarray


# ============ 공분산 ============

def _gramian(spec: OperatorSpec, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """블록 지수 [[−B, Q], [0, B*]]로 tK(t)와 e^{tB}를 계산합니다.

    지수 인자가 크면 t/2^k에서 계산한 뒤
    tK(2h) = tK(h) + e^{hB} tK(h) e^{hB*}로 k번 배가합니다.
    """
    N = spec.dim
    C = np.zeros((2 * N, 2 * N))
    C[:N, :N] = -spec.B
    C[:N, N:] = spec.Q
    C[N:, N:] = spec.B.T
    scale = t * np.linalg.norm(C, 1)
    doublings = 0 if scale <= VAN_LOAN_MAX_EXPONENT else int(math.ceil(math.log2(scale / VAN_LOAN_MAX_EXPONENT)))
    h = t / 2 ** doublings
    F = expm(h * C)
    E = F[N:, N:].T
    W = E @ F[:N, N:]
    for _ in range(doublings):
        W = W + E @ W @ E.T
        E = E @ E
    if not (np.all(np.isfinite(W)) and np.all(np.isfinite(E))):
        raise DomainError(f"t={t:g}에서 공분산이 오버플로됩니다.", 't')
    return 0.5 * (W + W.T), E


@lru_cache(maxsize=8192)
def _bundle(spec: OperatorSpec, t: float) -> CovarianceBundle:
    tK, E = _gramian(spec, t)
    K = tK / t
    spectrum = sym_spectrum(K)
    if spectrum.min_eig <= HYPOELLIPTIC_TOLERANCE:
        raise HypoellipticityError(
            f"t={t:g}에서 K(t)의 최소 고유값 {spectrum.min_eig:.3e}이(가) 허용치 이하입니다.",
            'spec',
        )
    det_tK = sym_spectrum(tK).det
    if not (math.isfinite(det_tK) and det_tK > 0.0):
        raise HypoellipticityError(
            f"t={t:g}에서 det tK(t) = {det_tK:.3e}로 정밀도를 잃었습니다.",
            'spec',
        )
    return CovarianceBundle(
        t=t,
        K=frozen(K),
        tK=frozen(tK),
        sqrt_2tK=frozen(psd_sqrt(2.0 * tK)),
        det_tK=det_tK,
        V=unit_ball_volume(spec.dim) * math.sqrt(det_tK),
        exp_tB=frozen(E),
    )


def covariance(spec: OperatorSpec, t: float) -> CovarianceBundle:
    """시각 t의 공분산 번들을 반환합니다.

    같은 (spec, t)에 대해서는 캐시된 동일 객체를 돌려줍니다.

    Raises:
        DomainError: t ≤ 0.
        HypoellipticityError: min_eig(K(t)) ≤ 1e−12 이거나 det tK(t)가 양의 유한값이 아닌 경우.
    """
    t = ValidationService.validate_time(t)
    return _bundle(spec, t)


def covariance_quadrature(spec: OperatorSpec, t: float) -> np.ndarray:
    """tK(t)의 정의 적분을 적응 구적법으로 직접 계산합니다 (교차 검증용)."""
    t = ValidationService.validate_time(t)

    def integrand(s):
        E = mat_exp(spec.B, s)
        return E @ spec.Q @ E.T

    value, _ = quad_vec(integrand, 0.0, t, epsabs=0.0, epsrel=1e-12, limit=400)
    return 0.5 * (value + value.T)


def van_loan_gap(spec: OperatorSpec, t: float) -> float:
    """블록 지수 경로와 구적 경로로 구한 tK(t)의 상대 차이."""
    reference = covariance_quadrature(spec, t)
    tK, _ = _gramian(spec, ValidationService.validate_time(t))
    return float(np.linalg.norm(tK - reference) / np.linalg.norm(reference))


def check_hypoelliptic(
    spec: OperatorSpec,
    grid: Optional[Sequence[float]] = None,
) -> HypoellipticityReport:
    """시간 격자 위에서 K(t) > 0 여부를 검사합니다.

    Args:
        spec: 연산자.
        grid: 양의 시간 목록 (기본값: [1e−4, 1e4]의 로그 간격 32점).

    Returns:
        최소 고유값이 가장 작은 시각과 그 값을 담은 보고서.
    """
    grid = DEFAULT_HYPOELLIPTIC_GRID if grid is None else tuple(grid)
    if not grid:
        raise DomainError("grid가 비어 있습니다.", 'grid')
    worst_eig, worst_t = math.inf, grid[0]
    for raw in grid:
        t = ValidationService.validate_time(raw, 'grid')
        try:
            tK, _ = _gramian(spec, t)
        except DomainError:
            continue
        min_eig = float(np.linalg.eigvalsh(tK / t)[0])
        if min_eig < worst_eig:
            worst_eig, worst_t = min_eig, t
    return HypoellipticityReport(
        ok=worst_eig > HYPOELLIPTIC_TOLERANCE,
        worst_min_eig=worst_eig,
        worst_t=worst_t,
    )


def kalman_rank(spec: OperatorSpec) -> int:
    """[Q^{1/2}, BQ^{1/2}, …, B^{N−1}Q^{1/2}]의 랭크.

    N과 같으면 모든 t > 0에서 K(t) > 0 입니다.
    """
    root = psd_sqrt(spec.Q)
    blocks, current = [], root
    for _ in range(spec.dim):
        blocks.append(current)
        current = spec.B @ current
    return int(np.linalg.matrix_rank(np.hstack(blocks), tol=1e-10))


# ============ 부피, 거리, 핵 ============

def volume(spec: OperatorSpec, t: float) -> float:
    """V(t) = ω_N (det tK(t))^{1/2}."""
    return covariance(spec, t).V


def pseudo_distance(spec: OperatorSpec, t: float, X, Y) -> np.ndarray:
    """m_t(X, Y) = <K(t)^{−1}(Y − e^{tB}X), Y − e^{tB}X>^{1/2}.

    Y는 단일 점 (N,) 또는 점 배열 (m, N)일 수 있습니다.
    """
    bundle = covariance(spec, t)
    X = ValidationService.validate_point(X, spec.dim)
    Y = np.asarray(Y, dtype=float)
    diff = np.atleast_2d(Y) - bundle.exp_tB @ X
    solved = np.linalg.solve(bundle.K, diff.T).T
    m = np.sqrt(np.clip(np.einsum('ij,ij->i', diff, solved), 0.0, None))
    return m if Y.ndim > 1 else float(m[0])


def kernel_density(spec: OperatorSpec, X, Y, t: float):
    """p(X, Y, t) = c_N / V(t) · exp(−m_t(X, Y)² / 4t).

    Raises:
        DomainError: t ≤ 0.
    """
    bundle = covariance(spec, t)
    m = np.asarray(pseudo_distance(spec, t, X, Y))
    return kernel_constant(spec.dim) / bundle.V * np.exp(-m ** 2 / (4.0 * bundle.t))


def adjoint_law(spec: OperatorSpec, t: float) -> AdjointLaw:
    """p(·, Y, t)의 질량, 평균 사상, 공분산.

    핵의 지수를 첫 번째 인자에 대해 완전제곱하면 질량 e^{−t trB},
    평균 e^{−tB}Y, 공분산 2t e^{−tB} K(t) e^{−tB*}를 얻습니다.
    """
    bundle = covariance(spec, t)
    inverse = mat_exp(spec.B, -bundle.t)
    cov = inverse @ (2.0 * bundle.tK) @ inverse.T
    cov = 0.5 * (cov + cov.T)
    return AdjointLaw(
        mass=math.exp(-bundle.t * spec.trace),
        mean_map=frozen(inverse),
        covariance=frozen(cov),
        sqrt_covariance=frozen(psd_sqrt(cov)),
    )


# ============ 내재 차원 ============

def _slope_fit(spec: OperatorSpec, lo: float, hi: float) -> Tuple[float, float]:
    times = np.logspace(math.log10(lo), math.log10(hi), DIMENSION_FIT_POINTS)
    log_v = np.log([volume(spec, t) for t in times])
    log_t = np.log(times)
    slope, intercept = np.polyfit(log_t, log_v, 1)
    residual = float(np.max(np.abs(log_v - (slope * log_t + intercept))))
    return 2.0 * float(slope), residual


def intrinsic_dimensions(spec: OperatorSpec) -> DimensionReport:
    """D₀와 D∞를 고정된 두 구간의 로그-로그 기울기로 추정합니다.

    적합 잔차가 0.05를 넘으면 거듭제곱 법칙이 아닌 것으로 보고 경고를 붙입니다
    (예: B가 양의 실수부 고유값을 가져 V(t)가 지수적으로 자라는 경우).
    """
    D0, residual0 = _slope_fit(spec, *SMALL_TIME_DECADES)
    warnings = []
    try:
        Dinf, residual_inf = _slope_fit(spec, *LARGE_TIME_DECADES)
    except DomainError:
        Dinf, residual_inf = math.inf, math.inf
    for label, residual in (('D0', residual0), ('Dinf', residual_inf)):
        if residual > DIMENSION_FIT_RESIDUAL:
            message = f"{label} 적합 잔차 {residual:.3g}: V(t)가 거듭제곱 법칙을 따르지 않습니다."
            logger.warning(f"{spec.name or '연산자'}: {message}")
            warnings.append(message)
    if abs(D0 - Dinf) <= REGIME_TOLERANCE:
        regime = 'homogeneous'
    elif D0 > Dinf:
        regime = 'crossing'
    else:
        regime = 'expanding'
    return DimensionReport(
        D0=D0,
        Dinf=Dinf,
        regime=regime,
        residual0=residual0,
        residual_inf=residual_inf,
        warnings=warnings,
    )


# ============ 카탈로그 ============

def catalog(name: str, size: Optional[int] = None) -> OperatorSpec:
    """이름 있는 예제 연산자를 반환합니다.

    Args:
        name: laplace, kolmogorov, kramers, ornstein_uhlenbeck 중 하나.
            'laplace:3'처럼 크기를 붙여 쓸 수도 있습니다.
        size: laplace/ornstein_uhlenbeck의 N, kolmogorov의 n.

    Raises:
        NotFoundError: 알 수 없는 이름.

    Example:
        >>> catalog('kolmogorov', 1).B.tolist()
        [[0.0, 0.0], [1.0, 0.0]]
    """
    if ':' in name:
        name, raw_size = name.split(':', 1)
        size = int(raw_size)
    name = name.strip().lower()
    if name not in CATALOG_NAMES:
        raise NotFoundError(f"알 수 없는 연산자 이름입니다: {name}", 'name')
    if size is not None and size < 1:
        raise ValidationError("size는 1 이상이어야 합니다.", 'size')

    if name == 'laplace':
        N = size or 2
        return OperatorSpec(
            dim=N, Q=np.eye(N), B=np.zeros((N, N)),
            name=f'laplace({N})', dilation_weights=(1.0,) * N,
        )
    if name == 'kolmogorov':
        n = size or 1
        Q = np.zeros((2 * n, 2 * n))
        Q[:n, :n] = np.eye(n)
        B = np.zeros((2 * n, 2 * n))
        B[n:, :n] = np.eye(n)
        return OperatorSpec(
            dim=2 * n, Q=Q, B=B,
            name=f'kolmogorov({n})', dilation_weights=(1.0,) * n + (3.0,) * n,
        )
    if name == 'kramers':
        return OperatorSpec(
            dim=2,
            Q=np.array([[1.0, 0.0], [0.0, 0.0]]),
            B=np.array([[0.0, -1.0], [1.0, 0.0]]),
            name='kramers',
        )
    N = size or 2
    return OperatorSpec(dim=N, Q=np.eye(N), B=-np.eye(N), name=f'ornstein_uhlenbeck({N})')
