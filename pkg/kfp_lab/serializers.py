"""실험 입력 직렬화 모듈.

Django REST Framework Serializer로 연산자 파일, 영역, 스칼라 함수, 실험 설정을
검증하고 도메인 객체로 변환합니다. 명령행의 짧은 표기('ball:1', 'gaussian:0.5')도
여기서 같은 사전 형식으로 풀어 씁니다.
"""

import json
import logging
from pathlib import Path

import numpy as np
from rest_framework import serializers

from . import operators
from .fields import BumpField, GaussianField, IndicatorField, LinearField, ScalarField, SumField
from .operators import OperatorSpec
from .regions import Ball, Box, Ellipsoid, Region, Union, interval
from .validators import MAX_DIMENSION, ValidationError

logger = logging.getLogger(__name__)


TASK_CHOICES = ('operator', 'kernel', 'semigroup', 'frac', 'perimeter', 'sweep', 'besov', 'verify')
FORMAT_CHOICES = ('csv', 'json')
METHOD_CHOICES = ('auto', 'mc', 'exact')
REGION_SHAPES = ('ball', 'box', 'interval', 'ellipsoid', 'union')
FIELD_KINDS = ('gaussian', 'bump', 'linear', 'constant', 'indicator', 'sum')


def _matrix_field(**kwargs):
    return serializers.ListField(child=serializers.ListField(child=serializers.FloatField()), **kwargs)


def _vector_field(**kwargs):
    return serializers.ListField(child=serializers.FloatField(), **kwargs)


def _domain(build, *args):
    """도메인 ValidationError를 직렬화기 오류로 바꿔 전달합니다."""
    try:
        return build(*args)
    except ValidationError as e:
        raise serializers.ValidationError({e.field or 'non_field_errors': e.message})


def _numbers(text: str) -> list:
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise serializers.ValidationError(f"숫자 목록이 아닙니다: {text}")


def read_json(path) -> dict:
    """JSON 파일을 읽습니다. 읽을 수 없으면 OSError/ValueError를 그대로 올립니다."""
    with open(Path(path), encoding='utf-8') as handle:
        return json.load(handle)


# ============ 연산자 ============

class OperatorSerializer(serializers.Serializer):
    """연산자 입력.

    카탈로그 이름(catalog, size) 또는 행렬(dim, Q, B) 중 하나를 받습니다.
    """

    catalog = serializers.CharField(required=False, help_text='laplace, kolmogorov, kramers, ornstein_uhlenbeck')
    size = serializers.IntegerField(required=False, min_value=1, help_text='카탈로그 크기 인자')
    dim = serializers.IntegerField(required=False, min_value=1, max_value=MAX_DIMENSION)
    Q = _matrix_field(required=False)
    B = _matrix_field(required=False)
    name = serializers.CharField(required=False, allow_blank=True, default='')
    dilation_weights = _vector_field(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        if attrs.get('catalog'):
            attrs['spec'] = _domain(operators.catalog, attrs['catalog'], attrs.get('size'))
            return attrs
        missing = [key for key in ('dim', 'Q', 'B') if key not in attrs]
        if missing:
            raise serializers.ValidationError(f"catalog 또는 dim/Q/B가 필요합니다 (누락: {', '.join(missing)}).")
        attrs['spec'] = _domain(
            lambda: OperatorSpec(
                dim=attrs['dim'], Q=np.array(attrs['Q']), B=np.array(attrs['B']),
                name=attrs.get('name', ''), dilation_weights=attrs.get('dilation_weights'),
            )
        )
        return attrs


def build_operator(data) -> OperatorSpec:
    """사전, 카탈로그 이름, 연산자 JSON 경로 중 하나로 OperatorSpec을 만듭니다."""
    if isinstance(data, OperatorSpec):
        return data
    if isinstance(data, str):
        data = read_json(data) if data.endswith('.json') else {'catalog': data}
    serializer = OperatorSerializer(data=data)
    try:
        valid = serializer.is_valid()
    except ValueError as e:
        raise ValidationError(f"연산자 입력이 올바르지 않습니다: {e}", 'operator')
    if not valid:
        raise ValidationError(f"연산자 입력이 올바르지 않습니다: {serializer.errors}", 'operator')
    return serializer.validated_data['spec']


# ============ 영역 ============

class RegionSerializer(serializers.Serializer):
    """영역 입력.

    Example:
        >>> {'shape': 'ball', 'radius': 1.0}
        >>> {'shape': 'box', 'lo': [0, 0], 'hi': [1, 2]}
        >>> {'shape': 'union', 'parts': [{'shape': 'ball', 'center': [-3, 0], 'radius': 1}, ...]}
    """

    shape = serializers.ChoiceField(choices=REGION_SHAPES)
    center = _vector_field(required=False)
    radius = serializers.FloatField(required=False)
    matrix = _matrix_field(required=False)
    lo = _vector_field(required=False)
    hi = _vector_field(required=False)
    half_width = serializers.FloatField(required=False)
    parts = serializers.ListField(child=serializers.DictField(), required=False)

    def build(self, dim: int) -> Region:
        data = self.validated_data
        shape = data['shape']
        center = data.get('center', [0.0] * dim)
        if shape == 'ball':
            return _domain(Ball, center, data.get('radius', 1.0))
        if shape == 'ellipsoid':
            if 'matrix' not in data:
                raise ValidationError("ellipsoid에는 matrix가 필요합니다.", 'matrix')
            return _domain(Ellipsoid, np.array(center), np.array(data['matrix']))
        if shape == 'box':
            if 'lo' in data and 'hi' in data:
                return _domain(Box, np.array(data['lo']), np.array(data['hi']))
            half = data.get('half_width', 1.0)
            return _domain(Box, np.array(center) - half, np.array(center) + half)
        if shape == 'interval':
            if dim != 1:
                raise ValidationError("interval은 1차원 연산자에서만 쓸 수 있습니다.", 'region')
            lo, hi = data.get('lo', [0.0])[0], data.get('hi', [1.0])[0]
            return _domain(interval, lo, hi)
        parts = [build_region(part, dim) for part in data.get('parts', [])]
        return _domain(Union, tuple(parts))


def parse_region(text: str) -> dict:
    """짧은 표기를 RegionSerializer 사전으로 바꿉니다.

    'ball:r', 'box:h' (반폭 h인 정육면체), 'box:lo1,lo2:hi1,hi2', 'interval:a,b'를 받습니다.
    """
    shape, _, rest = text.partition(':')
    shape = shape.strip().lower()
    if shape == 'ball':
        return {'shape': 'ball', 'radius': float(rest or 1.0)}
    if shape == 'box':
        if rest.count(':') == 1:
            lo, hi = rest.split(':')
            return {'shape': 'box', 'lo': _numbers(lo), 'hi': _numbers(hi)}
        return {'shape': 'box', 'half_width': float(rest or 1.0)}
    if shape == 'interval':
        bounds = _numbers(rest or '0,1')
        if len(bounds) != 2:
            raise serializers.ValidationError("interval은 'interval:a,b' 형식입니다.")
        return {'shape': 'interval', 'lo': [bounds[0]], 'hi': [bounds[1]]}
    raise serializers.ValidationError(f"알 수 없는 영역 표기입니다: {text}")


def build_region(data, dim: int) -> Region:
    """짧은 표기, JSON 경로, 사전 중 하나로 영역을 만듭니다."""
    if isinstance(data, Region):
        return data
    try:
        if isinstance(data, str):
            data = read_json(data) if data.endswith('.json') else parse_region(data)
        serializer = RegionSerializer(data=data)
        if not serializer.is_valid():
            raise ValidationError(f"영역 입력이 올바르지 않습니다: {serializer.errors}", 'region')
        region = serializer.build(dim)
    except (serializers.ValidationError, ValueError) as e:
        raise ValidationError(f"영역 입력이 올바르지 않습니다: {e}", 'region')
    if region.dim != dim:
        raise ValidationError(f"영역은 {dim}차원이어야 합니다.", 'region')
    return region


# ============ 스칼라 함수 ============

class FieldSerializer(serializers.Serializer):
    """스칼라 함수 입력.

    Example:
        >>> {'kind': 'gaussian', 'sigma': 0.5}
        >>> {'kind': 'bump', 'radius': 1.0, 'order': 3}
        >>> {'kind': 'indicator', 'region': 'ball:1'}
    """

    kind = serializers.ChoiceField(choices=FIELD_KINDS)
    center = _vector_field(required=False)
    covariance = _matrix_field(required=False)
    sigma = serializers.FloatField(required=False, min_value=0.0)
    amplitude = serializers.FloatField(required=False, default=1.0)
    radius = serializers.FloatField(required=False)
    shape = _matrix_field(required=False)
    order = serializers.IntegerField(required=False, default=3)
    coeffs = _vector_field(required=False)
    offset = serializers.FloatField(required=False, default=0.0)
    value = serializers.FloatField(required=False, default=1.0)
    region = serializers.JSONField(required=False)
    terms = serializers.ListField(child=serializers.DictField(), required=False)

    def build(self, dim: int) -> ScalarField:
        data = self.validated_data
        kind = data['kind']
        center = np.array(data.get('center', [0.0] * dim))
        if kind == 'gaussian':
            if 'covariance' in data:
                cov = np.array(data['covariance'])
            else:
                cov = data.get('sigma', 1.0) ** 2 * np.eye(dim)
            return _domain(GaussianField, center, cov, data['amplitude'])
        if kind == 'bump':
            shape = np.array(data['shape']) if 'shape' in data else None
            return _domain(lambda: BumpField(center, data.get('radius'), data['amplitude'], data['order'], shape))
        if kind == 'linear':
            return _domain(LinearField, data.get('coeffs', [0.0] * dim), data['offset'])
        if kind == 'constant':
            return _domain(LinearField, [0.0] * dim, data['value'])
        if kind == 'indicator':
            return IndicatorField(build_region(data.get('region', 'ball:1'), dim))
        terms = []
        for term in data.get('terms', []):
            terms.append((float(term.get('weight', 1.0)), build_field(term.get('field', {}), dim)))
        return _domain(SumField, terms)


def parse_field(text: str) -> dict:
    """짧은 표기를 FieldSerializer 사전으로 바꿉니다.

    'gaussian[:σ]', 'bump[:r[:k]]', 'constant[:c]', 'linear:a1,a2,...',
    'indicator:<영역 표기>'를 받습니다.
    """
    kind, _, rest = text.partition(':')
    kind = kind.strip().lower()
    if kind == 'gaussian':
        return {'kind': 'gaussian', 'sigma': float(rest or 1.0)}
    if kind == 'bump':
        radius, _, order = rest.partition(':')
        data = {'kind': 'bump', 'radius': float(radius or 1.0)}
        if order:
            data['order'] = int(order)
        return data
    if kind == 'constant':
        return {'kind': 'constant', 'value': float(rest or 1.0)}
    if kind == 'linear':
        return {'kind': 'linear', 'coeffs': _numbers(rest)}
    if kind == 'indicator':
        return {'kind': 'indicator', 'region': rest or 'ball:1'}
    raise serializers.ValidationError(f"알 수 없는 함수 표기입니다: {text}")


def build_field(data, dim: int) -> ScalarField:
    """짧은 표기, JSON 경로, 사전 중 하나로 스칼라 함수를 만듭니다."""
    if isinstance(data, ScalarField):
        return data
    try:
        if isinstance(data, str):
            data = read_json(data) if data.endswith('.json') else parse_field(data)
        serializer = FieldSerializer(data=data)
        if not serializer.is_valid():
            raise ValidationError(f"함수 입력이 올바르지 않습니다: {serializer.errors}", 'field')
        field = serializer.build(dim)
    except (serializers.ValidationError, ValueError) as e:
        raise ValidationError(f"함수 입력이 올바르지 않습니다: {e}", 'field')
    if field.dim != dim:
        raise ValidationError(f"함수는 {dim}차원이어야 합니다.", 'field')
    return field


# ============ 실험 설정 ============

class ExperimentConfigSerializer(serializers.Serializer):
    """실행 하나의 완전한 설정.

    --config 파일의 내용과 명령행 플래그를 합친 결과를 검증합니다.
    """

    task = serializers.ChoiceField(choices=TASK_CHOICES)
    action = serializers.CharField(required=False, allow_blank=True, default='')
    operator = serializers.JSONField(required=False, allow_null=True, default=None)
    params = serializers.DictField(required=False, default=dict)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1)
    samples = serializers.IntegerField(min_value=1)
    workers = serializers.IntegerField(min_value=1, max_value=256)
    tol = serializers.FloatField(min_value=0.0)
    out = serializers.CharField(required=False, allow_blank=True, allow_null=True, default=None)
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default='json')

    def validate(self, attrs):
        if attrs['task'] != 'verify' and attrs.get('operator') in (None, ''):
            raise serializers.ValidationError({'operator': "--catalog, --operator 또는 설정 파일의 operator가 필요합니다."})
        return attrs


class ResultMetadataSerializer(serializers.Serializer):
    """결과 파일 머리말."""

    config = serializers.DictField()
    generated = serializers.DateTimeField()
    package = serializers.CharField()
