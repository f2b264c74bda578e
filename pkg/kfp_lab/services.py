"""실험 실행 서비스.

명령행과 검증 모음이 공유하는 실행 경로입니다. ExperimentService가 설정을
도메인 객체로 풀어 계산을 맡기고, ResultWriter가 결과를 CSV/JSON으로 씁니다.
"""

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from django.conf import settings
from django.utils import timezone
from rest_framework.utils.encoders import JSONEncoder

from . import besov, fractional, operators, perimeter, semigroup
from .serializers import ResultMetadataSerializer, build_field, build_operator, build_region
from .validators import HypoellipticityError, PreconditionError, ValidationError, ValidationService

logger = logging.getLogger(__name__)


PACKAGE_NAME = 'kfp_lab'
ACTIONS = {
    'operator': ('info', 'validate'),
    'kernel': ('eval',),
    'semigroup': ('apply',),
    'frac': ('apply', 'invert'),
    'perimeter': ('',),
    'sweep': ('iso',),
    'besov': ('seminorm', 'coarea', 'sobolev'),
    'verify': ('',),
}


# ============ 설정, 결과 ============

@dataclass
class ExperimentConfig:
    """해석이 끝난 실행 설정.

    Attributes:
        task: 작업 이름 (operator, kernel, ..., verify).
        action: 하위 작업 (info, eval, ...). 없으면 빈 문자열.
        operator: 카탈로그 이름, 연산자 JSON 경로, 또는 인라인 사전.
        params: 작업별 인자 (t, s, region, field, ...).
        seed: 마스터 시드.
        samples: 몬테카를로 표본 수.
        workers: 작업자 수 (결정성은 이 값에 상대적입니다).
        tol: 허용 오차.
        out: 결과 파일 경로 (없으면 표준 출력).
        format: csv 또는 json.
    """
    task: str
    action: str = ''
    operator: Optional[object] = None
    params: Dict[str, object] = field(default_factory=dict)
    seed: int = 0xB5EED
    samples: int = 20000
    workers: int = 4
    tol: float = 1e-2
    out: Optional[str] = None
    format: str = 'json'

    @classmethod
    def from_settings(cls, task: str, **overrides) -> 'ExperimentConfig':
        """Django 설정의 KFP_* 기본값 위에 overrides를 덮어씁니다."""
        values = {
            'seed': settings.KFP_SEED,
            'samples': settings.KFP_SAMPLES,
            'workers': settings.KFP_WORKERS,
            'tol': settings.KFP_TOLERANCE,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(task=task, **values)

    def param(self, name: str, default=None):
        return self.params.get(name, default)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['params'] = {key: value for key, value in sorted(self.params.items()) if value is not None}
        return data


@dataclass
class ExperimentResult:
    """실행 결과.

    Attributes:
        payload: JSON 결과 본문.
        rows: CSV 행 (없으면 payload를 한 행으로 펼칩니다).
        header: CSV 열 순서.
        failed: 검증 모음에서 허용 오차를 넘은 검사가 있는지 여부.
    """
    payload: dict
    rows: Optional[List[dict]] = None
    header: Optional[Sequence[str]] = None
    failed: bool = False


def _flatten(payload: dict) -> dict:
    """중첩 값을 JSON 문자열로 바꿔 CSV 한 행으로 만듭니다."""
    row = {}
    for key, value in payload.items():
        if isinstance(value, (dict, list, tuple)):
            row[key] = json.dumps(value, cls=JSONEncoder, sort_keys=True)
        else:
            row[key] = value
    return row


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.generic):
        return repr(value.item())
    return value


# ============ 결과 기록 ============

class ResultWriter:
    """결과를 CSV 또는 JSON으로 기록합니다.

    CSV는 '# config:'와 '# generated:' 주석 두 줄 뒤에 본문이 오고, JSON은
    {"metadata", "result"} 객체입니다. 같은 설정과 작업자 수로 다시 실행하면
    본문은 바이트 단위로 같습니다 (generated 시각만 다릅니다).

    Attributes:
        config: 결과에 포함할 실행 설정.
    """

    def __init__(self, config: ExperimentConfig, clock: Optional[Callable] = None):
        self.config = config
        self.clock = clock or timezone.now

    def metadata(self) -> dict:
        return ResultMetadataSerializer({
            'config': self.config.to_dict(),
            'generated': self.clock(),
            'package': PACKAGE_NAME,
        }).data

    def body(self, result: ExperimentResult) -> str:
        """시각 줄을 뺀 본문. 결정성 비교는 이 문자열로 합니다."""
        if self.config.format == 'json':
            return json.dumps(result.payload, cls=JSONEncoder, sort_keys=True, indent=2)
        rows = result.rows if result.rows is not None else [_flatten(result.payload)]
        header = list(result.header) if result.header else sorted({key for row in rows for key in row})
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=header, extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _cell(row.get(key)) for key in header})
        return buffer.getvalue()

    def render(self, result: ExperimentResult) -> str:
        metadata = self.metadata()
        if self.config.format == 'json':
            document = {'metadata': metadata, 'result': result.payload}
            return json.dumps(document, cls=JSONEncoder, sort_keys=True, indent=2) + '\n'
        config_line = json.dumps(metadata['config'], cls=JSONEncoder, sort_keys=True)
        return f"# config: {config_line}\n# generated: {metadata['generated']}\n" + self.body(result)

    def write(self, result: ExperimentResult) -> Optional[Path]:
        """out이 있으면 파일에 쓰고 경로를 돌려줍니다. 상대 경로는 KFP_OUTPUT_DIR 기준입니다."""
        if not self.config.out:
            return None
        path = Path(self.config.out)
        if not path.is_absolute():
            path = Path(settings.KFP_OUTPUT_DIR) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(result), encoding='utf-8')
        logger.info(f"결과 저장: {path}")
        return path


# ============ 실행 ============

class ExperimentService:
    """설정 하나를 실행합니다.

    Example:
        >>> config = ExperimentConfig(task='operator', action='info', operator='kramers')
        >>> ExperimentService(config).run().payload['dimensions']['regime']
        'crossing'
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._spec = None

    @property
    def spec(self) -> operators.OperatorSpec:
        if self._spec is None:
            self._spec = build_operator(self.config.operator)
        return self._spec

    @property
    def common(self) -> dict:
        config = self.config
        return {'n': config.samples, 'seed': config.seed, 'workers': config.workers}

    def run(self) -> ExperimentResult:
        """작업을 실행합니다.

        Raises:
            ValidationError: 설정 또는 계산 전제 조건 위반.
        """
        task, action = self.config.task, self.config.action or ''
        if task not in ACTIONS or action not in ACTIONS[task]:
            raise ValidationError(f"알 수 없는 작업입니다: {task} {action}".strip(), 'task')
        ValidationService.validate_seed(self.config.seed)
        ValidationService.validate_samples(self.config.samples)
        handler = getattr(self, f"_{task}_{action}" if action else f"_{task}")
        logger.info(f"실행: {task} {action} (seed={self.config.seed}, n={self.config.samples}, "
                    f"workers={self.config.workers})")
        return handler()

    # ---- 입력 해석 ----

    def _float(self, name: str, default=None) -> float:
        value = self.config.param(name, default)
        if value is None:
            raise ValidationError(f"--{name} 인자가 필요합니다.", name)
        return float(value)

    def _point(self, name: str):
        value = self.config.param(name)
        if value is None:
            return np.zeros(self.spec.dim)
        if isinstance(value, str):
            value = [float(part) for part in value.split(',') if part.strip()]
        return ValidationService.validate_point(value, self.spec.dim)

    def _field(self):
        return build_field(self.config.param('field', 'gaussian'), self.spec.dim)

    def _region(self):
        return build_region(self.config.param('region', 'ball:1'), self.spec.dim)

    def _method(self) -> str:
        return self.config.param('method', 'auto') or 'auto'

    def _quad(self, s: float) -> fractional.FracQuadSpec:
        return fractional.FracQuadSpec(s=s, tolerance=self.config.tol)

    def _list(self, name: str, default: Sequence[float]) -> List[float]:
        value = self.config.param(name)
        if value is None:
            return list(default)
        if isinstance(value, str):
            return [float(part) for part in value.split(',') if part.strip()]
        return [float(item) for item in value]

    # ---- operator ----

    def _operator_info(self) -> ExperimentResult:
        spec = self.spec
        dims = operators.intrinsic_dimensions(spec)
        hypo = operators.check_hypoelliptic(spec)
        payload = {
            'operator': spec.to_dict(),
            'dim': spec.dim,
            'trace': spec.trace,
            'trace_flag': spec.trace_flag,
            'kalman_rank': operators.kalman_rank(spec),
            'hypoelliptic': hypo.ok,
            'worst_min_eig': hypo.worst_min_eig,
            'dimensions': dims.to_dict(),
            'volume_at_1': operators.volume(spec, 1.0) if hypo.ok else None,
            'kernel_constant': operators.kernel_constant(spec.dim),
        }
        return ExperimentResult(payload=payload)

    def _operator_validate(self) -> ExperimentResult:
        spec = self.spec
        hypo = operators.check_hypoelliptic(spec)
        rank = operators.kalman_rank(spec)
        if not hypo.ok:
            raise HypoellipticityError(
                f"K(t)가 t={hypo.worst_t:g}에서 양의 정부호가 아닙니다 (최소 고유값 {hypo.worst_min_eig:.3g}).",
                'spec',
            )
        gap = operators.van_loan_gap(spec, 1.0)
        payload = {'operator': spec.name, 'hypoelliptic': True, 'kalman_rank': rank,
                   'worst_min_eig': hypo.worst_min_eig, 'worst_t': hypo.worst_t, 'van_loan_gap': gap}
        return ExperimentResult(payload=payload)

    # ---- kernel, semigroup ----

    def _kernel_eval(self) -> ExperimentResult:
        spec, t = self.spec, self._float('t', 1.0)
        X, Y = self._point('x'), self._point('y')
        bundle = operators.covariance(spec, t)
        payload = {
            't': bundle.t,
            'x': X.tolist(),
            'y': Y.tolist(),
            'density': float(operators.kernel_density(spec, X, Y, t)),
            'pseudo_distance': float(operators.pseudo_distance(spec, t, X, Y)),
            'volume': bundle.V,
            'K': bundle.K.tolist(),
        }
        if self.config.param('mass'):
            payload['forward_mass'] = semigroup.kernel_mass(spec, X, t, **self.common).to_dict()
            payload['adjoint_mass'] = semigroup.adjoint_mass(spec, Y, t, **self.common).to_dict()
            payload['expected_adjoint_mass'] = math.exp(-t * spec.trace)
        return ExperimentResult(payload=payload)

    def _semigroup_apply(self) -> ExperimentResult:
        spec, f, t, X = self.spec, self._field(), self._float('t', 1.0), self._point('x')
        if self.config.param('adjoint'):
            estimate = semigroup.apply_adjoint(spec, f, X, t, **self.common)
        else:
            estimate = semigroup.apply_semigroup(spec, f, X, t, **self.common)
        payload = {'t': t, 'x': X.tolist(), 'field': f.to_dict(), 'adjoint': bool(self.config.param('adjoint')),
                   **estimate.to_dict()}
        if f.has_heat_flow and not self.config.param('adjoint'):
            payload['closed_form'] = float(f.heat_flow(spec, t, X))
        return ExperimentResult(payload=payload)

    # ---- frac ----

    def _frac_apply(self) -> ExperimentResult:
        spec, f, X = self.spec, self._field(), self._point('x')
        s = self._float('s')
        method = self._method()
        estimate = fractional.balakrishnan_apply(spec, f, X, s, self._quad(s), method=method, **self.common)
        payload = {'s': s, 'x': X.tolist(), 'method': method, 'field': f.to_dict(), **estimate.to_dict()}
        if spec.is_laplacian and spec.dim == 1 and f.kind == 'gaussian':
            payload['fourier_oracle'] = fractional.fourier_oracle(f, float(X[0]), s)
        return ExperimentResult(payload=payload)

    def _frac_invert(self) -> ExperimentResult:
        spec, f, X = self.spec, self._field(), self._point('x')
        alpha = self._float('alpha')
        method = self._method()
        estimate = fractional.riesz_apply(spec, f, X, alpha, method=method, **self.common)
        payload = {'alpha': alpha, 'x': X.tolist(), 'method': method, 'field': f.to_dict(), **estimate.to_dict()}
        if self.config.param('residual'):
            report = fractional.inversion_residual(spec, f, X, 0.5 * alpha, **self.common)
            payload['inversion'] = report.to_dict()
        return ExperimentResult(payload=payload)

    # ---- perimeter, sweep ----

    def _perimeter(self) -> ExperimentResult:
        spec, region, s = self.spec, self._region(), self._float('s')
        estimate = perimeter.frac_perimeter(spec, region, s, self._quad(s), method=self._method(), **self.common)
        warnings = list(estimate.warnings)
        try:
            bound = perimeter.interpolation_bound(spec, region.measure, estimate.s, estimate.value)
            ratio = bound.ratio
        except PreconditionError as e:
            logger.warning(f"등주 비 생략: {e.message}")
            warnings.append(e.message)
            bound, ratio = None, math.nan
        row = perimeter.SweepRow(
            measure=region.measure, s=estimate.s, per_value=estimate.value,
            quad_err=estimate.quad_error, mc_err=estimate.mc_error, ratio=ratio,
        )
        payload = {
            **row.to_dict(),
            'region': region.to_dict(),
            'estimate': estimate.to_dict(),
            'interpolation': None if bound is None else bound.to_dict(),
            'warnings': warnings,
        }
        return ExperimentResult(payload=payload, rows=[row.to_dict()], header=perimeter.SWEEP_HEADER)

    def _sweep_iso(self) -> ExperimentResult:
        spec, region, s = self.spec, self._region(), self._float('s')
        lams = self._list('lams', perimeter.DEFAULT_DILATIONS)
        weights = self._list('weights', ()) or None
        result = perimeter.iso_ratio_sweep(spec, region, s, lams, method=self._method(), quad=self._quad(s),
                                           weights=weights, **self.common)
        return ExperimentResult(payload=result.to_dict(), rows=result.to_rows(), header=perimeter.SWEEP_HEADER)

    # ---- besov ----

    def _besov_seminorm(self) -> ExperimentResult:
        spec, f = self.spec, self._field()
        alpha = self._float('alpha')
        estimate = besov.besov_seminorm(spec, f, alpha, int(self.config.param('p', 1)), **self.common)
        payload = {'alpha': alpha, 'field': f.to_dict(), **estimate.to_dict()}
        if spec.is_laplacian and spec.dim == 1 and f.kind == 'gaussian':
            payload['gagliardo_oracle'] = besov.gagliardo_oracle(f, alpha)
        return ExperimentResult(payload=payload)

    def _besov_coarea(self) -> ExperimentResult:
        spec, f, s = self.spec, self._field(), self._float('s')
        levels = int(self.config.param('levels', besov.DEFAULT_LEVELS))
        report = besov.coarea_residual(spec, besov.LevelSetProfile(f), s, levels, quad=self._quad(s),
                                       **self.common)
        return ExperimentResult(payload=report.to_dict(), rows=report.level_rows(), header=besov.LEVEL_HEADER)

    def _besov_sobolev(self) -> ExperimentResult:
        spec, f, s = self.spec, self._field(), self._float('s')
        report = besov.sobolev_ratio(spec, f, s, **self.common)
        return ExperimentResult(payload=report.to_dict())

    # ---- verify ----

    def _verify(self) -> ExperimentResult:
        from .verification import run_suite

        report = run_suite(
            level=self.config.param('suite', 'core') or 'core',
            seed=self.config.seed,
            workers=self.config.workers,
            names=self.config.param('checks'),
        )
        return ExperimentResult(payload=report.to_dict(), rows=report.to_rows(), header=report.header,
                                failed=not report.passed)
