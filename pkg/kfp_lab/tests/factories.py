"""Factory Boy를 사용한 테스트 입력 팩토리.

연산자, 영역, 함수 객체를 기본값과 함께 생성합니다.
"""

import factory
import numpy as np

from kfp_lab.fields import BumpField, GaussianField
from kfp_lab.operators import OperatorSpec
from kfp_lab.regions import Ball, Box


class OperatorSpecFactory(factory.Factory):
    """OperatorSpec 팩토리. 기본값은 2차원 라플라시안입니다.

    Example:
        >>> spec = OperatorSpecFactory()
        >>> spec = OperatorSpecFactory(dim=3)
        >>> spec = OperatorSpecFactory(kolmogorov=True)
        >>> spec = OperatorSpecFactory(degenerate=True)  # Q = diag(1, 0), B = 0
    """

    class Meta:
        model = OperatorSpec

    class Params:
        kolmogorov = factory.Trait(
            dim=2,
            Q=factory.LazyFunction(lambda: np.diag([1.0, 0.0])),
            B=factory.LazyFunction(lambda: np.array([[0.0, 0.0], [1.0, 0.0]])),
            dilation_weights=(1.0, 3.0),
        )
        degenerate = factory.Trait(
            dim=2,
            Q=factory.LazyFunction(lambda: np.diag([1.0, 0.0])),
            B=factory.LazyFunction(lambda: np.zeros((2, 2))),
        )

    dim = 2
    Q = factory.LazyAttribute(lambda o: np.eye(o.dim))
    B = factory.LazyAttribute(lambda o: np.zeros((o.dim, o.dim)))
    name = factory.Sequence(lambda n: f'operator-{n}')


class BallFactory(factory.Factory):
    """원점 중심 단위 공 팩토리.

    Example:
        >>> ball = BallFactory(dim=1, radius=0.5)
    """

    class Meta:
        model = Ball

    class Params:
        dim = 2

    center = factory.LazyAttribute(lambda o: np.zeros(o.dim))
    radius = 1.0


class BoxFactory(factory.Factory):
    """원점 중심 정육면체 팩토리 (반폭 half_width)."""

    class Meta:
        model = Box

    class Params:
        dim = 2
        half_width = 1.0

    lo = factory.LazyAttribute(lambda o: -o.half_width * np.ones(o.dim))
    hi = factory.LazyAttribute(lambda o: o.half_width * np.ones(o.dim))


class GaussianFieldFactory(factory.Factory):
    """등방 가우스 함수 팩토리 (공분산 sigma² I)."""

    class Meta:
        model = GaussianField

    class Params:
        dim = 2
        sigma = 1.0

    center = factory.LazyAttribute(lambda o: np.zeros(o.dim))
    covariance_matrix = factory.LazyAttribute(lambda o: o.sigma ** 2 * np.eye(o.dim))
    amplitude = 1.0


class BumpFieldFactory(factory.Factory):
    """원점 중심 범프 함수 팩토리."""

    class Meta:
        model = BumpField

    class Params:
        dim = 2

    center = factory.LazyAttribute(lambda o: np.zeros(o.dim))
    radius = 1.0
    amplitude = 1.0
    order = 3
