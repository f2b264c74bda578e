"""R^N 위의 스칼라 시험 함수.

가우스, 다항식 범프, 선형(상수 포함), 영역 지시함수, 유한 선형결합을 제공합니다.
모든 함수는 점 배열 (m, N)에서 벡터화되어 평가됩니다. 가능한 경우
생성자 𝒜f와 반군 작용 P_t f를 닫힌 형태로 계산합니다.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import beta, ndtr

from .matlin import frozen, is_psd, psd_sqrt
from .operators import OperatorSpec, covariance, unit_ball_volume
from .regions import Ellipsoid, Region
from .validators import DomainError, NotPSDError, ValidationError, ValidationService

logger = logging.getLogger(__name__)


GAUSSIAN_SUPPORT_SIGMAS = 4.0


def as_points(points, dim: int) -> Tuple[np.ndarray, bool]:
    """입력을 (m, dim) 배열로 바꾸고 단일 점 여부를 함께 반환합니다."""
    array = np.asarray(points, dtype=float)
    single = array.ndim == 1
    array = np.atleast_2d(array)
    if array.shape[1] != dim:
        raise ValidationError(f"점은 {dim}차원이어야 합니다.", 'points')
    return array, single


class ScalarField:
    """스칼라 함수의 공통 인터페이스.

    Attributes:
        dim: 공간 차원.
    """

    dim: int
    kind = 'field'

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, points):
        array, single = as_points(points, self.dim)
        values = self.evaluate(array)
        return float(values[0]) if single else values

    @property
    def sup_norm(self) -> float:
        raise NotImplementedError

    @property
    def l1_norm(self) -> Optional[float]:
        """‖f‖₁ (선형결합은 Σ|w_i|‖f_i‖₁ 상한). 적분 불가능하면 None."""
        return None

    @property
    def is_constant(self) -> bool:
        return False

    def supports(self) -> List[Tuple[np.ndarray, float]]:
        """유효 지지 영역 (중심, 반지름) 목록."""
        return []

    @property
    def support_radius(self) -> float:
        radii = [radius for _, radius in self.supports()]
        return max(radii) if radii else math.inf

    # 중요도 샘플링용 지배 밀도 h ≥ |f|, ∫h = dominating_mass
    def dominating(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{self.kind}는 지배 밀도를 제공하지 않습니다.")

    @property
    def dominating_mass(self) -> float:
        raise NotImplementedError(f"{self.kind}는 지배 밀도를 제공하지 않습니다.")

    def sample_dominating(self, rng: np.random.Generator, m: int) -> np.ndarray:
        raise NotImplementedError(f"{self.kind}는 지배 밀도를 제공하지 않습니다.")

    def generator(self, spec: OperatorSpec, points) -> np.ndarray:
        """𝒜f = tr(Q∇²f) + <BY, ∇f>의 닫힌 형태."""
        raise NotImplementedError(f"{self.kind}는 생성자의 닫힌 형태가 없습니다.")

    @property
    def has_heat_flow(self) -> bool:
        return False

    def heat_flow(self, spec: OperatorSpec, t: float, points) -> np.ndarray:
        """P_t f의 닫힌 형태."""
        raise NotImplementedError(f"{self.kind}는 반군 작용의 닫힌 형태가 없습니다.")

    def heat_image(self, spec: OperatorSpec, t: float) -> 'ScalarField':
        """X ↦ P_t f(X) 자체를 닫힌 형태의 스칼라 함수로."""
        raise NotImplementedError(f"{self.kind}는 반군 상의 닫힌 형태가 없습니다.")

    def to_dict(self) -> dict:
        raise NotImplementedError


class GaussianField(ScalarField):
    """f(Y) = a · exp(−½ (Y − c)ᵀ Σ^{−1} (Y − c))."""

    kind = 'gaussian'

    def __init__(self, center, covariance_matrix, amplitude: float = 1.0):
        self.center = frozen(np.asarray(center, dtype=float).reshape(-1))
        self.dim = self.center.size
        sigma = ValidationService.validate_matrix(covariance_matrix, 'covariance')
        if sigma.shape[0] != self.dim:
            raise ValidationError("covariance와 center의 차원이 다릅니다.", 'covariance')
        if not is_psd(sigma) or np.linalg.eigvalsh(sigma)[0] <= 0.0:
            raise NotPSDError("covariance는 양의 정부호여야 합니다.", 'covariance')
        self.covariance = frozen(0.5 * (sigma + sigma.T))
        self.amplitude = float(amplitude)
        self._inverse = np.linalg.inv(self.covariance)
        self._root = psd_sqrt(self.covariance)
        self._det = float(np.linalg.det(self.covariance))

    def evaluate(self, points):
        diff = points - self.center
        return self.amplitude * np.exp(-0.5 * np.einsum('ij,jk,ik->i', diff, self._inverse, diff))

    @property
    def sup_norm(self):
        return abs(self.amplitude)

    @property
    def l1_norm(self):
        return abs(self.amplitude) * (2 * math.pi) ** (self.dim / 2) * math.sqrt(self._det)

    @property
    def is_constant(self):
        return self.amplitude == 0.0

    def supports(self):
        radius = GAUSSIAN_SUPPORT_SIGMAS * math.sqrt(np.linalg.eigvalsh(self.covariance)[-1])
        return [(self.center, radius)]

    def dominating(self, points):
        return np.abs(self.evaluate(points))

    @property
    def dominating_mass(self):
        return self.l1_norm

    def sample_dominating(self, rng, m):
        return self.center + rng.standard_normal((m, self.dim)) @ self._root.T

    def generator(self, spec, points):
        array, single = as_points(points, self.dim)
        values = self.evaluate(array)
        w = (array - self.center) @ self._inverse
        second = np.einsum('ij,jk,ik->i', w, spec.Q, w) - np.trace(spec.Q @ self._inverse)
        drift = np.einsum('ij,ij->i', array @ spec.B.T, w)
        result = values * (second - drift)
        return float(result[0]) if single else result

    @property
    def has_heat_flow(self):
        return True

    def heat_flow(self, spec, t, points):
        array, single = as_points(points, self.dim)
        bundle = covariance(spec, t)
        spread = self.covariance + 2.0 * bundle.tK
        diff = array @ bundle.exp_tB.T - self.center
        solved = np.linalg.solve(spread, diff.T).T
        ratio = math.sqrt(self._det / np.linalg.det(spread))
        result = self.amplitude * ratio * np.exp(-0.5 * np.einsum('ij,ij->i', diff, solved))
        return float(result[0]) if single else result

    def heat_image(self, spec: OperatorSpec, t: float) -> 'GaussianField':
        """P_t f 자체도 가우스 함수입니다.

        중심 e^{−tB}c, 공분산 e^{−tB}(Σ + 2tK)e^{−tB*},
        진폭 a·(det Σ / det(Σ + 2tK))^{1/2}.
        """
        bundle = covariance(spec, t)
        spread = self.covariance + 2.0 * bundle.tK
        inverse = np.linalg.inv(bundle.exp_tB)
        image = inverse @ spread @ inverse.T
        return GaussianField(
            center=inverse @ self.center,
            covariance_matrix=0.5 * (image + image.T),
            amplitude=self.amplitude * math.sqrt(self._det / np.linalg.det(spread)),
        )

    def to_dict(self):
        return {
            'kind': 'gaussian',
            'center': self.center.tolist(),
            'covariance': self.covariance.tolist(),
            'amplitude': self.amplitude,
        }


class BumpField(ScalarField):
    """f(Y) = a · (1 − ρ²)^k, ρ² = (Y − c)ᵀ S^{−1} (Y − c) < 1, 바깥은 0.

    k는 매끄러움 차수로, f는 C^{k−1}입니다. 생성자의 닫힌 형태를 위해 k ≥ 2를 요구합니다.
    """

    kind = 'bump'

    def __init__(self, center, radius: Optional[float] = None, amplitude: float = 1.0,
                 order: int = 3, shape=None):
        self.center = frozen(np.asarray(center, dtype=float).reshape(-1))
        self.dim = self.center.size
        if shape is None:
            radius = ValidationService.validate_time(1.0 if radius is None else radius, 'radius')
            shape = radius ** 2 * np.eye(self.dim)
        self.region = Ellipsoid(center=self.center, shape=shape)
        self.shape = self.region.shape
        if int(order) != order or order < 2:
            raise DomainError("order는 2 이상의 정수여야 합니다.", 'order')
        self.order = int(order)
        self.amplitude = float(amplitude)
        self._inverse = np.linalg.inv(self.shape)
        self._root = psd_sqrt(self.shape)

    def _rho2(self, points):
        diff = points - self.center
        return np.einsum('ij,jk,ik->i', diff, self._inverse, diff)

    def evaluate(self, points):
        base = np.clip(1.0 - self._rho2(points), 0.0, None)
        return self.amplitude * base ** self.order

    @property
    def sup_norm(self):
        return abs(self.amplitude)

    @property
    def l1_norm(self):
        N = self.dim
        radial = 0.5 * N * beta(N / 2, self.order + 1)
        return abs(self.amplitude) * unit_ball_volume(N) * math.sqrt(np.linalg.det(self.shape)) * radial

    @property
    def is_constant(self):
        return self.amplitude == 0.0

    def supports(self):
        return [(self.center, math.sqrt(np.linalg.eigvalsh(self.shape)[-1]))]

    def dominating(self, points):
        return np.abs(self.evaluate(points))

    @property
    def dominating_mass(self):
        return self.l1_norm

    def sample_dominating(self, rng, m):
        direction = rng.standard_normal((m, self.dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = np.sqrt(rng.beta(self.dim / 2, self.order + 1, size=m))
        return self.center + (direction * radius[:, None]) @ self._root.T

    def generator(self, spec, points):
        array, single = as_points(points, self.dim)
        k = self.order
        g = 1.0 - self._rho2(array)
        inside = g > 0.0
        g = np.where(inside, g, 0.0)
        grad_g = -2.0 * (array - self.center) @ self._inverse
        outer = np.einsum('ij,jk,ik->i', grad_g, spec.Q, grad_g)
        trace = -2.0 * np.trace(spec.Q @ self._inverse)
        drift = np.einsum('ij,ij->i', array @ spec.B.T, grad_g)
        g_k2 = g ** (k - 2)
        g_k1 = g_k2 * g
        result = self.amplitude * (k * (k - 1) * g_k2 * outer + k * g_k1 * (trace + drift))
        result = np.where(inside, result, 0.0)
        return float(result[0]) if single else result

    def level_region(self, sigma: float) -> Optional[Ellipsoid]:
        """{f > σ}. σ ≥ 최댓값이면 None."""
        if self.amplitude <= 0.0:
            raise DomainError("등위 집합은 양의 진폭에서만 정의합니다.", 'amplitude')
        if sigma >= self.amplitude:
            return None
        if sigma <= 0.0:
            return self.region
        scale = 1.0 - (sigma / self.amplitude) ** (1.0 / self.order)
        return Ellipsoid(center=self.center, shape=scale * self.shape)

    def to_dict(self):
        return {
            'kind': 'bump',
            'center': self.center.tolist(),
            'shape': self.shape.tolist(),
            'amplitude': self.amplitude,
            'order': self.order,
        }


class LinearField(ScalarField):
    """f(Y) = <a, Y> + b. a = 0이면 상수 함수입니다."""

    kind = 'linear'

    def __init__(self, coeffs, offset: float = 0.0):
        self.coeffs = frozen(np.asarray(coeffs, dtype=float).reshape(-1))
        self.dim = self.coeffs.size
        self.offset = float(offset)

    def evaluate(self, points):
        return points @ self.coeffs + self.offset

    @property
    def sup_norm(self):
        return abs(self.offset) if self.is_constant else math.inf

    @property
    def l1_norm(self):
        return 0.0 if self.is_constant and self.offset == 0.0 else None

    @property
    def is_constant(self):
        return not np.any(self.coeffs)

    def generator(self, spec, points):
        array, single = as_points(points, self.dim)
        result = array @ spec.B.T @ self.coeffs
        return float(result[0]) if single else result

    @property
    def has_heat_flow(self):
        return True

    def heat_flow(self, spec, t, points):
        array, single = as_points(points, self.dim)
        result = array @ covariance(spec, t).exp_tB.T @ self.coeffs + self.offset
        return float(result[0]) if single else result

    def heat_image(self, spec: OperatorSpec, t: float) -> 'LinearField':
        return LinearField(covariance(spec, t).exp_tB.T @ self.coeffs, self.offset)

    def to_dict(self):
        return {'kind': 'linear', 'coeffs': self.coeffs.tolist(), 'offset': self.offset}


def constant(dim: int, value: float = 1.0) -> LinearField:
    """상수 함수 f ≡ value."""
    return LinearField(np.zeros(dim), value)


class IndicatorField(ScalarField):
    """영역 E의 지시함수 1_E."""

    kind = 'indicator'

    def __init__(self, region: Region):
        self.region = region
        self.dim = region.dim

    def evaluate(self, points):
        return self.region.contains(points).astype(float)

    @property
    def sup_norm(self):
        return 1.0

    @property
    def l1_norm(self):
        return self.region.measure

    def supports(self):
        lo, hi = self.region.bbox
        return [(0.5 * (lo + hi), 0.5 * float(np.linalg.norm(hi - lo)))]

    def dominating(self, points):
        return self.evaluate(points)

    @property
    def dominating_mass(self):
        return self.region.measure

    def sample_dominating(self, rng, m):
        return self.region.sample_uniform(rng, m)

    @property
    def has_heat_flow(self):
        return False

    def heat_flow(self, spec, t, points):
        box = self.region.as_box()
        if box is None or not spec.is_laplacian:
            return super().heat_flow(spec, t, points)
        array, single = as_points(points, self.dim)
        result = laplace_box_flow(box, t, array)
        return float(result[0]) if single else result

    def heat_image(self, spec, t):
        box = self.region.as_box()
        if box is None or not spec.is_laplacian:
            return super().heat_image(spec, t)
        return BoxFlowField(box, t)

    def to_dict(self):
        return {'kind': 'indicator', 'region': self.region.to_dict()}


def laplace_box_flow(box, t: float, points: np.ndarray) -> np.ndarray:
    """라플라시안에서 P_t 1_box(X) = Π_i [Φ((hi_i − x_i)/√2t) − Φ((lo_i − x_i)/√2t)]."""
    t = ValidationService.validate_time(t)
    scale = math.sqrt(2.0 * t)
    upper = ndtr((box.hi - points) / scale)
    lower = ndtr((box.lo - points) / scale)
    return np.prod(upper - lower, axis=1)


class SumField(ScalarField):
    """유한 선형결합 Σ w_i f_i."""

    kind = 'sum'

    def __init__(self, terms: Sequence[Tuple[float, ScalarField]]):
        self.terms = tuple((float(weight), term) for weight, term in terms)
        if not self.terms:
            raise ValidationError("합은 최소 한 개의 항이 필요합니다.", 'terms')
        dims = {term.dim for _, term in self.terms}
        if len(dims) != 1:
            raise ValidationError("모든 항은 같은 차원이어야 합니다.", 'terms')
        self.dim = dims.pop()

    def evaluate(self, points):
        return sum(weight * term.evaluate(points) for weight, term in self.terms)

    @property
    def sup_norm(self):
        return float(sum(abs(weight) * term.sup_norm for weight, term in self.terms))

    @property
    def l1_norm(self):
        norms = [term.l1_norm for _, term in self.terms]
        if any(norm is None for norm in norms):
            return None
        return float(sum(abs(weight) * norm for (weight, _), norm in zip(self.terms, norms)))

    @property
    def is_constant(self):
        return all(term.is_constant for _, term in self.terms)

    def supports(self):
        return [support for _, term in self.terms for support in term.supports()]

    def _integrable_terms(self):
        terms = [(weight, term) for weight, term in self.terms if weight != 0.0 and term.l1_norm]
        if len(terms) != sum(1 for weight, term in self.terms if weight != 0.0 and not term.is_constant):
            raise NotImplementedError("적분 불가능한 항이 있어 지배 밀도가 없습니다.")
        return terms

    def dominating(self, points):
        return sum(abs(weight) * term.dominating(points) for weight, term in self._integrable_terms())

    @property
    def dominating_mass(self):
        return float(sum(abs(weight) * term.dominating_mass for weight, term in self._integrable_terms()))

    def sample_dominating(self, rng, m):
        terms = self._integrable_terms()
        masses = np.array([abs(weight) * term.dominating_mass for weight, term in terms])
        counts = rng.multinomial(m, masses / masses.sum())
        samples = np.concatenate([
            term.sample_dominating(rng, count) for (_, term), count in zip(terms, counts)
        ])
        return samples[rng.permutation(m)]

    def generator(self, spec, points):
        array, single = as_points(points, self.dim)
        result = sum(weight * term.generator(spec, array) for weight, term in self.terms)
        return float(result[0]) if single else result

    @property
    def has_heat_flow(self):
        return all(term.has_heat_flow for _, term in self.terms)

    def heat_flow(self, spec, t, points):
        array, single = as_points(points, self.dim)
        result = sum(weight * term.heat_flow(spec, t, array) for weight, term in self.terms)
        return float(result[0]) if single else result

    def to_dict(self):
        return {
            'kind': 'sum',
            'terms': [{'weight': weight, 'field': term.to_dict()} for weight, term in self.terms],
        }


class BoxFlowField(ScalarField):
    """라플라시안 아래의 P_t 1_box. 다시 P_r을 적용하면 P_{t+r} 1_box입니다."""

    kind = 'box-flow'

    def __init__(self, box, t: float):
        self.box = box
        self.dim = box.dim
        self.t = ValidationService.validate_time(t)

    def evaluate(self, points):
        return laplace_box_flow(self.box, self.t, points)

    @property
    def sup_norm(self):
        return 1.0

    @property
    def l1_norm(self):
        return self.box.measure

    def supports(self):
        center = 0.5 * (self.box.lo + self.box.hi)
        half = 0.5 * float(np.linalg.norm(self.box.hi - self.box.lo))
        return [(center, half + GAUSSIAN_SUPPORT_SIGMAS * math.sqrt(2.0 * self.t))]

    @property
    def has_heat_flow(self):
        return True

    def heat_flow(self, spec, t, points):
        if not spec.is_laplacian:
            return super().heat_flow(spec, t, points)
        array, single = as_points(points, self.dim)
        result = laplace_box_flow(self.box, self.t + t, array)
        return float(result[0]) if single else result

    def heat_image(self, spec, t):
        if not spec.is_laplacian:
            return super().heat_image(spec, t)
        return BoxFlowField(self.box, self.t + t)

    def to_dict(self):
        return {'kind': 'box-flow', 'box': self.box.to_dict(), 't': self.t}
