"""입력값 검증 및 도메인 오류 모듈.

연산자 행렬, 시간, 분수 차수, 표본 수 등 수치 계산에 들어가는
모든 입력값을 검증하고, 계산 중 발생하는 도메인 오류를 정의합니다.
"""

import logging
import math
from typing import Any, Optional

import numpy as np

logger = logging.getLogger(__name__)


# 입력값 제한 상수
MIN_DIMENSION = 1
MAX_DIMENSION = 16
PSD_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-10
HYPOELLIPTIC_TOLERANCE = 1e-12
MAX_EXPONENT_NORM = 700.0  # e^{700} 부근에서 float64 오버플로
MAX_SAMPLES = 50_000_000
MAX_SEED = 2 ** 64 - 1


class ValidationError(Exception):
    """입력값 검증 오류.

    모든 도메인 오류의 기반 클래스입니다. CLI는 이 예외를 종료 코드 2로 변환합니다.

    Attributes:
        message: 에러 메시지.
        field: 오류가 발생한 필드명.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        """ValidationError를 초기화합니다.

        Args:
            message: 에러 메시지.
            field: 오류가 발생한 필드명 (선택).
        """
        self.message = message
        self.field = field
        super().__init__(message)


class DomainError(ValidationError):
    """인자가 정의역을 벗어난 경우 (t ≤ 0, n = 0 등)."""


class NotPSDError(ValidationError):
    """행렬이 양의 준정부호가 아닌 경우."""


class HypoellipticityError(ValidationError):
    """K(t)의 최소 고유값이 허용치 이하인 경우."""


class NotFoundError(ValidationError):
    """카탈로그에 없는 연산자 이름."""


class InsufficientCutoffError(ValidationError):
    """시간 적분 꼬리 상한이 허용 오차를 넘는 경우."""


class DivergentPotentialError(ValidationError):
    """Riesz 포텐셜의 차수가 무한대 차원 이상이어서 적분이 발산하는 경우."""


class RangeError(ValidationError):
    """분수 둘레의 차수 s가 (0, 1/2) 범위를 벗어난 경우."""


class ContradictionError(ValidationError):
    """둘레가 0인데 부피가 양수인 모순된 입력."""


class PreconditionError(ValidationError):
    """함수 단조성 같은 사전 조건 위반."""


class IllConditionedSamplerError(ValidationError):
    """중요도 샘플러가 두 함수의 유효 지지 영역을 제대로 덮지 못하는 경우."""


class InconsistencyError(ValidationError):
    """이론상 단조여야 하는 양이 MC 오차를 넘어 위반된 경우."""


class ToleranceBreach(ValidationError):
    """검증 모드에서 허용 오차를 넘은 경우. CLI 종료 코드 3."""


class ValidationService:
    """수치 입력값 검증을 담당하는 서비스 클래스.

    모든 공개 연산의 진입부에서 호출되며, 실패 시 ValidationError 계열
    예외를 발생시킵니다.

    Example:
        >>> ValidationService.validate_time(0.5)
        0.5
        >>> ValidationService.validate_order(0.7, upper=0.5, error_class=RangeError)
        Traceback (most recent call last):
        ...
        RangeError: s는 (0, 0.5) 범위여야 합니다.
    """

    @staticmethod
    def validate_time(t: Any, field_name: str = "t") -> float:
        """시간 값이 양의 유한 실수인지 검증합니다.

        Args:
            t: 검증할 시간.
            field_name: 필드명 (에러 메시지용).

        Returns:
            float로 변환된 시간.

        Raises:
            DomainError: t가 양의 유한 실수가 아닌 경우.
        """
        try:
            value = float(t)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"{field_name}은(는) 실수여야 합니다.", field_name) from exc
        if not math.isfinite(value) or value <= 0.0:
            raise DomainError(f"{field_name}은(는) 양수여야 합니다. (입력값: {t})", field_name)
        return value

    @staticmethod
    def validate_order(
        s: Any,
        upper: float = 1.0,
        field_name: str = "s",
        error_class: type = DomainError,
    ) -> float:
        """분수 차수가 열린 구간 (0, upper)에 있는지 검증합니다.

        Args:
            s: 검증할 차수.
            upper: 상한 (기본값: 1).
            field_name: 필드명 (에러 메시지용).
            error_class: 범위를 벗어날 때 발생시킬 예외 클래스.

        Returns:
            float로 변환된 차수.

        Raises:
            DomainError: 기본값. 범위를 벗어난 경우.
        """
        try:
            value = float(s)
        except (TypeError, ValueError) as exc:
            raise DomainError(f"{field_name}은(는) 실수여야 합니다.", field_name) from exc
        if not 0.0 < value < upper:
            raise error_class(f"{field_name}는 (0, {upper:g}) 범위여야 합니다.", field_name)
        return value

    @staticmethod
    def validate_samples(n: Any, field_name: str = "n") -> int:
        """표본 수를 검증합니다.

        Raises:
            DomainError: n이 1 미만이거나 상한을 넘는 경우.
        """
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise DomainError(f"{field_name}은(는) 정수여야 합니다.", field_name)
        if n < 1:
            raise DomainError(f"{field_name}은(는) 1 이상이어야 합니다.", field_name)
        if n > MAX_SAMPLES:
            raise DomainError(f"{field_name}은(는) {MAX_SAMPLES}를 초과할 수 없습니다.", field_name)
        return int(n)

    @staticmethod
    def validate_seed(seed: Any) -> int:
        """64비트 부호 없는 시드를 검증합니다."""
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise DomainError("seed는 정수여야 합니다.", "seed")
        if not 0 <= seed <= MAX_SEED:
            raise DomainError("seed는 0 이상 2^64-1 이하여야 합니다.", "seed")
        return int(seed)

    @staticmethod
    def validate_matrix(entries: Any, field_name: str = "matrix") -> np.ndarray:
        """정방 실수 행렬을 검증하고 float64 배열로 변환합니다.

        Args:
            entries: 행 우선 중첩 리스트 또는 배열.
            field_name: 필드명 (에러 메시지용).

        Returns:
            (n, n) float64 배열.

        Raises:
            ValidationError: 정방이 아니거나, 차원이 범위를 벗어나거나,
                NaN/Inf가 포함된 경우.
        """
        try:
            matrix = np.array(entries, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{field_name}은(는) 실수 행렬이어야 합니다.", field_name) from exc
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError(f"{field_name}은(는) 정방 행렬이어야 합니다.", field_name)
        n = matrix.shape[0]
        if not MIN_DIMENSION <= n <= MAX_DIMENSION:
            raise ValidationError(
                f"{field_name}의 차원은 {MIN_DIMENSION} 이상 {MAX_DIMENSION} 이하여야 합니다.",
                field_name,
            )
        if not np.all(np.isfinite(matrix)):
            raise ValidationError(f"{field_name}에 NaN 또는 Inf가 포함되어 있습니다.", field_name)
        return matrix

    @staticmethod
    def validate_point(X: Any, dim: int, field_name: str = "X") -> np.ndarray:
        """점 좌표를 검증합니다.

        Returns:
            (dim,) float64 배열.
        """
        point = np.asarray(X, dtype=float).reshape(-1)
        if point.shape != (dim,):
            raise ValidationError(f"{field_name}은(는) {dim}차원 점이어야 합니다.", field_name)
        if not np.all(np.isfinite(point)):
            raise ValidationError(f"{field_name}에 NaN 또는 Inf가 포함되어 있습니다.", field_name)
        return point

    @staticmethod
    def validate_p(p: Any, allowed: tuple = (1, 2)) -> int:
        """L^p 지수를 검증합니다."""
        if p not in allowed:
            raise DomainError(f"p는 {allowed} 중 하나여야 합니다.", "p")
        return int(p)
