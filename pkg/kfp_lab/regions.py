"""측도가 정확히 알려진 영역.

공, 축 정렬 상자, 비등방 타원체, 서로소 합집합을 제공합니다. 모든 영역은
정확한 르베그 측도, 벡터화된 소속 판정, 정확한 균등 샘플러, 경계 상자를 가집니다.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .matlin import frozen, is_psd, psd_sqrt
from .operators import unit_ball_volume
from .rng import stream
from .validators import NotPSDError, ValidationError, ValidationService

logger = logging.getLogger(__name__)


OVERLAP_TEST_SAMPLES = 4096
OVERLAP_TEST_SEED = 0xD15


class Region:
    """영역의 공통 인터페이스."""

    dim: int

    @property
    def measure(self) -> float:
        raise NotImplementedError

    @property
    def bbox(self) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        """점 배열 (m, N)에 대한 소속 여부 (m,)."""
        raise NotImplementedError

    def sample_uniform(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """영역 안의 균등 분포 표본 (m, N)."""
        raise NotImplementedError

    def scaled(self, factors: Sequence[float]) -> 'Region':
        """축별 배율 diag(factors)의 선형 상."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def as_box(self) -> Optional['Box']:
        """상자(또는 1차원 구간)로 표현 가능하면 Box를 반환합니다."""
        return None

    def dilate(self, weights: Sequence[float], lam: float) -> 'Region':
        """비등방 확대 δ_λ(X)_i = λ^{w_i} X_i 의 상."""
        return self.scaled([lam ** w for w in weights])

    def _points(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dim:
            raise ValidationError(f"점은 {self.dim}차원이어야 합니다.", 'points')
        return points


@dataclass(frozen=True, eq=False)
class Ellipsoid(Region):
    """{X : (X − c)ᵀ M^{−1} (X − c) < 1}.

    Attributes:
        center: 중심 c.
        shape: 양의 정부호 모양 행렬 M.
    """
    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(-1)
        shape = ValidationService.validate_matrix(self.shape, 'shape')
        if shape.shape[0] != center.size:
            raise ValidationError("shape과 center의 차원이 다릅니다.", 'shape')
        if not is_psd(shape) or np.linalg.eigvalsh(shape)[0] <= 0.0:
            raise NotPSDError("shape은 양의 정부호여야 합니다.", 'shape')
        object.__setattr__(self, 'center', frozen(center))
        object.__setattr__(self, 'shape', frozen(0.5 * (shape + shape.T)))
        object.__setattr__(self, '_root', frozen(psd_sqrt(self.shape)))
        object.__setattr__(self, '_inverse', frozen(np.linalg.inv(self.shape)))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def measure(self) -> float:
        return unit_ball_volume(self.dim) * math.sqrt(np.linalg.det(self.shape))

    @property
    def bbox(self):
        half = np.sqrt(np.diag(self.shape))
        return self.center - half, self.center + half

    def contains(self, points) -> np.ndarray:
        diff = self._points(points) - self.center
        return np.einsum('ij,jk,ik->i', diff, self._inverse, diff) < 1.0

    def sample_uniform(self, rng, m):
        direction = rng.standard_normal((m, self.dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = rng.random(m) ** (1.0 / self.dim)
        return self.center + (direction * radius[:, None]) @ self._root.T

    def scaled(self, factors):
        D = np.diag(np.asarray(factors, dtype=float))
        return Ellipsoid(center=D @ self.center, shape=D @ self.shape @ D)

    def to_dict(self):
        return {'shape': 'ellipsoid', 'center': self.center.tolist(), 'matrix': self.shape.tolist()}

    def as_box(self):
        if self.dim != 1:
            return None
        lo, hi = self.bbox
        return Box(lo=lo, hi=hi)


class Ball(Ellipsoid):
    """중심 c, 반지름 r인 열린 공."""

    def __init__(self, center, radius: float):
        radius = ValidationService.validate_time(radius, 'radius')
        center = np.asarray(center, dtype=float).reshape(-1)
        super().__init__(center=center, shape=radius ** 2 * np.eye(center.size))
        object.__setattr__(self, 'radius', radius)

    @property
    def measure(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def to_dict(self):
        return {'shape': 'ball', 'center': self.center.tolist(), 'radius': self.radius}


@dataclass(frozen=True, eq=False)
class Box(Region):
    """축 정렬 상자 Π (lo_i, hi_i)."""
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape or not np.all(hi > lo):
            raise ValidationError("상자는 모든 축에서 lo < hi 여야 합니다.", 'box')
        object.__setattr__(self, 'lo', frozen(lo))
        object.__setattr__(self, 'hi', frozen(hi))

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def measure(self) -> float:
        return float(np.prod(self.hi - self.lo))

    @property
    def bbox(self):
        return self.lo.copy(), self.hi.copy()

    def contains(self, points):
        points = self._points(points)
        return np.all((points > self.lo) & (points < self.hi), axis=1)

    def sample_uniform(self, rng, m):
        return self.lo + rng.random((m, self.dim)) * (self.hi - self.lo)

    def scaled(self, factors):
        factors = np.asarray(factors, dtype=float)
        corners = np.stack([self.lo * factors, self.hi * factors])
        return Box(lo=corners.min(axis=0), hi=corners.max(axis=0))

    def to_dict(self):
        return {'shape': 'box', 'lo': self.lo.tolist(), 'hi': self.hi.tolist()}

    def as_box(self):
        return self


@dataclass(frozen=True, eq=False)
class Union(Region):
    """서로소 영역들의 합집합.

    생성 시 경계 상자가 겹치는 쌍마다 MC 겹침 검사를 수행합니다.
    """
    parts: Tuple[Region, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValidationError("합집합은 최소 한 개의 영역이 필요합니다.", 'parts')
        if len({part.dim for part in parts}) != 1:
            raise ValidationError("합집합의 모든 영역은 같은 차원이어야 합니다.", 'parts')
        object.__setattr__(self, 'parts', parts)
        for i, first in enumerate(parts):
            for j in range(i + 1, len(parts)):
                if _boxes_overlap(first.bbox, parts[j].bbox) and _parts_overlap(first, parts[j], i, j):
                    raise ValidationError(f"합집합의 {i}번과 {j}번 영역이 겹칩니다.", 'parts')

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    @property
    def measure(self) -> float:
        return float(sum(part.measure for part in self.parts))

    @property
    def bbox(self):
        los, his = zip(*(part.bbox for part in self.parts))
        return np.min(los, axis=0), np.max(his, axis=0)

    def contains(self, points):
        points = self._points(points)
        inside = np.zeros(points.shape[0], dtype=bool)
        for part in self.parts:
            inside |= part.contains(points)
        return inside

    def sample_uniform(self, rng, m):
        weights = np.array([part.measure for part in self.parts])
        counts = rng.multinomial(m, weights / weights.sum())
        samples = np.concatenate([
            part.sample_uniform(rng, count) for part, count in zip(self.parts, counts)
        ])
        return samples[rng.permutation(m)]

    def scaled(self, factors):
        return Union(parts=tuple(part.scaled(factors) for part in self.parts))

    def to_dict(self):
        return {'shape': 'union', 'parts': [part.to_dict() for part in self.parts]}


def _boxes_overlap(first, second) -> bool:
    return bool(np.all(first[0] < second[1]) and np.all(second[0] < first[1]))


def _parts_overlap(first: Region, second: Region, i: int, j: int) -> bool:
    rng = stream(OVERLAP_TEST_SEED, i, j)
    if np.any(second.contains(first.sample_uniform(rng, OVERLAP_TEST_SAMPLES))):
        return True
    return bool(np.any(first.contains(second.sample_uniform(rng, OVERLAP_TEST_SAMPLES))))


def interval(a: float, b: float) -> Box:
    """1차원 구간 (a, b)."""
    return Box(lo=[a], hi=[b])
