"""소형 밀집 선형대수 커널.

행렬 지수, 대칭 PSD 제곱근, 대칭 행렬의 행렬식과 극단 고유값을 제공합니다.
모든 함수는 입력을 변경하지 않는 순수 함수입니다.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .validators import (
    MAX_EXPONENT_NORM,
    PSD_TOLERANCE,
    SYMMETRY_TOLERANCE,
    DomainError,
    NotPSDError,
    ValidationError,
    ValidationService,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """대칭 행렬의 스펙트럼 요약.

    Attributes:
        det: 행렬식.
        min_eig: 최소 고유값.
        max_eig: 최대 고유값.
    """
    det: float
    min_eig: float
    max_eig: float


def frozen(matrix: np.ndarray) -> np.ndarray:
    """쓰기 불가능한 복사본을 반환합니다."""
    out = np.array(matrix, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def is_symmetric(M: np.ndarray, tol: float = SYMMETRY_TOLERANCE) -> bool:
    """‖M − Mᵀ‖ ≤ tol·(1 + ‖M‖) 인지 판정합니다."""
    M = np.asarray(M, dtype=float)
    return bool(np.max(np.abs(M - M.T)) <= tol * (1.0 + np.max(np.abs(M))))


def is_psd(M: np.ndarray, tol: float = PSD_TOLERANCE) -> bool:
    """대칭이고 최소 고유값이 −tol 이상인지 판정합니다."""
    M = np.asarray(M, dtype=float)
    if not is_symmetric(M):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] >= -tol)


def mat_exp(A: np.ndarray, t: float = 1.0) -> np.ndarray:
    """e^{tA}를 Padé 스케일링-제곱법으로 계산합니다.

    Args:
        A: 정방 행렬.
        t: 시간 배율 (음수 허용).

    Returns:
        e^{tA}.

    Raises:
        ValidationError: A에 NaN/Inf가 있는 경우.
        DomainError: |t|·‖A‖가 오버플로 범위인 경우.
    """
    A = ValidationService.validate_matrix(A, "A")
    if not np.isfinite(t):
        raise ValidationError("t는 유한한 실수여야 합니다.", "t")
    if t == 0.0:
        return np.eye(A.shape[0])
    if abs(t) * np.linalg.norm(A, 1) > MAX_EXPONENT_NORM:
        raise DomainError(f"|t|·‖A‖가 너무 커서 행렬 지수가 오버플로됩니다. (t={t:g})", "t")
    return expm(t * A)


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    """대칭 PSD 행렬의 대칭 제곱근을 고유분해로 계산합니다.

    [−1e−10, 0] 구간의 음의 고유값은 0으로 잘라냅니다.

    Raises:
        ValidationError: 대칭이 아닌 경우.
        NotPSDError: −1e−10보다 작은 고유값이 있는 경우.
    """
    M = ValidationService.validate_matrix(M, "M")
    if not is_symmetric(M):
        raise ValidationError("M은(는) 대칭 행렬이어야 합니다.", "M")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (M + M.T))
    if eigvals[0] < -PSD_TOLERANCE:
        raise NotPSDError(f"음의 고유값 {eigvals[0]:.3e}이(가) 있어 PSD가 아닙니다.", "M")
    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    return 0.5 * (root + root.T)


def sym_spectrum(M: np.ndarray) -> Spectrum:
    """대칭 행렬의 행렬식과 극단 고유값을 계산합니다.

    행렬식은 대각 스케일링 D^{−1/2} M D^{−1/2}의 LU 분해(slogdet)에
    det D를 곱해 구합니다. 대각 성분의 크기가 수십 자릿수씩 벌어지는
    tK(t)에서도 상대 정밀도가 유지됩니다.

    Raises:
        ValidationError: 대칭이 아닌 경우.
    """
    M = ValidationService.validate_matrix(M, "M")
    if not is_symmetric(M):
        raise ValidationError("M은(는) 대칭 행렬이어야 합니다.", "M")
    sym = 0.5 * (M + M.T)
    diag = np.diag(sym)
    if np.all(diag > 0.0):
        scale = np.sqrt(diag)
        sign, logdet = np.linalg.slogdet(sym / np.outer(scale, scale))
        logdet += float(np.sum(np.log(diag)))
    else:
        sign, logdet = np.linalg.slogdet(sym)
    eigvals = np.linalg.eigvalsh(sym)
    return Spectrum(
        det=float(sign * np.exp(logdet)),
        min_eig=float(eigvals[0]),
        max_eig=float(eigvals[-1]),
    )
