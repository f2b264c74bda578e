"""kfp 명령.

    python manage.py kfp operator info --catalog kramers
    python manage.py kfp perimeter --catalog kolmogorov --region ball:1 --s 0.25
    python manage.py kfp verify --suite core --seed 7

종료 코드: 0 성공, 2 검증 실패, 3 허용 오차 위반, 64 사용법 오류, 66 설정 파일을 읽을 수 없음.
"""

import argparse
import json
import logging

from django.core.management.base import BaseCommand, CommandError

from kfp_lab.serializers import ExperimentConfigSerializer, read_json
from kfp_lab.services import ExperimentConfig, ExperimentService, ResultWriter
from kfp_lab.validators import ToleranceBreach, ValidationError

logger = logging.getLogger(__name__)


EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3
EXIT_USAGE = 64
EXIT_NO_INPUT = 66

GLOBAL_KEYS = ('seed', 'samples', 'workers', 'tol', 'out', 'format')
CSV_TASKS = ('perimeter', 'sweep', 'verify')
PARAM_KEYS = ('x', 'y', 't', 'mass', 'field', 'adjoint', 's', 'method', 'alpha', 'residual', 'region', 'lams',
              'weights', 'p', 'levels', 'suite', 'checks')


def _common_arguments() -> argparse.ArgumentParser:
    """모든 하위 명령이 공유하는 플래그."""
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group('공통 옵션')
    group.add_argument('--seed', type=lambda text: int(text, 0), default=None,
                       help='마스터 시드 (기본값: KFP_SEED = 0xB5EED)')
    group.add_argument('--samples', type=int, default=None, help='몬테카를로 표본 수 (기본값: KFP_SAMPLES)')
    group.add_argument('--workers', type=int, default=None, help='작업자 수 (기본값: KFP_WORKERS)')
    group.add_argument('--tol', type=float, default=None, help='허용 오차 (기본값: KFP_TOLERANCE)')
    group.add_argument('--out', default=None, help='결과 파일 경로 (상대 경로는 KFP_OUTPUT_DIR 기준)')
    group.add_argument('--format', choices=('csv', 'json'), default=None, help='출력 형식')
    group.add_argument('--config', default=None, help='JSON 설정 파일 (명령행 플래그가 우선)')
    source = group.add_mutually_exclusive_group()
    source.add_argument('--catalog', default=None, help='카탈로그 연산자 (예: kolmogorov, laplace:3)')
    source.add_argument('--operator', default=None, help='연산자 JSON 파일 경로')
    return common


class Command(BaseCommand):
    help = '퇴화 콜모고로프-포커-플랑크 연산자 수치 실험을 실행합니다'

    def add_arguments(self, parser):
        common = _common_arguments()
        tasks = parser.add_subparsers(dest='task', metavar='task')
        tasks.required = True

        operator = tasks.add_parser('operator', help='연산자 정보와 검증')
        operator_actions = operator.add_subparsers(dest='action', metavar='action')
        operator_actions.required = True
        operator_actions.add_parser('info', parents=[common], help='내재 차원, tr B, 칼만 계수')
        operator_actions.add_parser('validate', parents=[common], help='hypoellipticity 검사')

        kernel = tasks.add_parser('kernel', help='열 핵')
        kernel_actions = kernel.add_subparsers(dest='action', metavar='action')
        kernel_actions.required = True
        evaluate = kernel_actions.add_parser('eval', parents=[common], help='p(X, Y, t)')
        evaluate.add_argument('--x', default=None, help='X (쉼표 구분, 기본값: 원점)')
        evaluate.add_argument('--y', default=None, help='Y (쉼표 구분, 기본값: 원점)')
        evaluate.add_argument('--t', type=float, default=None, help='시간 (기본값: 1)')
        evaluate.add_argument('--mass', action='store_true', help='핵 질량도 추정')

        group = tasks.add_parser('semigroup', help='열 반군')
        group_actions = group.add_subparsers(dest='action', metavar='action')
        group_actions.required = True
        apply = group_actions.add_parser('apply', parents=[common], help='P_t f(X)')
        self._field_arguments(apply)
        apply.add_argument('--t', type=float, default=None, help='시간 (기본값: 1)')
        apply.add_argument('--adjoint', action='store_true', help='수반 반군 P*_t f(X)')

        frac = tasks.add_parser('frac', help='분수 거듭제곱')
        frac_actions = frac.add_subparsers(dest='action', metavar='action')
        frac_actions.required = True
        frac_apply = frac_actions.add_parser('apply', parents=[common], help='(−𝒜)^s f(X)')
        self._field_arguments(frac_apply)
        frac_apply.add_argument('--s', type=float, default=None, help='차수 (0, 1)')
        frac_apply.add_argument('--method', choices=('auto', 'mc', 'exact'), default=None)
        invert = frac_actions.add_parser('invert', parents=[common], help='리스 퍼텐셜 ℐ_α f(X)')
        self._field_arguments(invert)
        invert.add_argument('--alpha', type=float, default=None, help='차수 α (0, D∞)')
        invert.add_argument('--method', choices=('auto', 'mc', 'exact'), default=None)
        invert.add_argument('--residual', action='store_true', help='역연산 잔차도 계산')

        per = tasks.add_parser('perimeter', parents=[common], help='분수 둘레 Per_s(E)')
        self._region_arguments(per)

        sweep = tasks.add_parser('sweep', help='등주 비 스윕')
        sweep_actions = sweep.add_subparsers(dest='action', metavar='action')
        sweep_actions.required = True
        iso = sweep_actions.add_parser('iso', parents=[common], help='비등방 확대 가족의 등주 비')
        self._region_arguments(iso)
        iso.add_argument('--lams', default=None, help='확대 배율 (쉼표 구분, 기본값: 0.5,1,2)')
        iso.add_argument('--weights', default=None, help='확대 가중치 (쉼표 구분, 기본값: 연산자의 가중치)')

        besov = tasks.add_parser('besov', help='베소프 반노름과 매장')
        besov_actions = besov.add_subparsers(dest='action', metavar='action')
        besov_actions.required = True
        seminorm = besov_actions.add_parser('seminorm', parents=[common], help='𝒩_{α,1}(f)')
        self._field_arguments(seminorm)
        seminorm.add_argument('--alpha', type=float, default=None, help='차수 α (0, 1)')
        seminorm.add_argument('--p', type=int, default=None, help='지수 (1만 지원)')
        coarea = besov_actions.add_parser('coarea', parents=[common], help='여면적 공식 잔차')
        self._field_arguments(coarea)
        coarea.add_argument('--s', type=float, default=None, help='차수 (0, 1/2)')
        coarea.add_argument('--levels', type=int, default=None, help='등위 노드 수')
        sobolev = besov_actions.add_parser('sobolev', parents=[common], help='소볼레프 매장 비')
        self._field_arguments(sobolev)
        sobolev.add_argument('--s', type=float, default=None, help='차수 (0, 1/2)')

        verify = tasks.add_parser('verify', parents=[common], help='검증 모음')
        verify.add_argument('--suite', choices=('core', 'full'), default=None, help='검사 수준 (기본값: core)')
        verify.add_argument('--checks', default=None, help='특정 검사만 실행 (쉼표 구분)')

    @staticmethod
    def _field_arguments(parser):
        parser.add_argument('--field', default=None,
                            help="함수 (예: gaussian:0.5, bump:1, indicator:ball:1, 또는 JSON 경로)")
        parser.add_argument('--x', default=None, help='평가 점 (쉼표 구분, 기본값: 원점)')

    @staticmethod
    def _region_arguments(parser):
        parser.add_argument('--region', default=None,
                            help="영역 (예: ball:1, box:0.5, interval:0,1, 또는 JSON 경로)")
        parser.add_argument('--s', type=float, default=None, help='차수 (0, 1/2)')
        parser.add_argument('--method', choices=('auto', 'mc', 'exact'), default=None)

    def run_from_argv(self, argv):
        """argparse 사용법 오류의 종료 코드를 64로 바꿉니다."""
        self._handling = False
        try:
            super().run_from_argv(argv)
        except SystemExit as e:
            if e.code == 2 and not self._handling:
                raise SystemExit(EXIT_USAGE) from e
            raise

    def handle(self, *args, **options):
        self._handling = True
        config = self._resolve(options)
        try:
            result = ExperimentService(config).run()
        except ToleranceBreach as e:
            logger.warning(f"허용 오차 위반: {e.message}")
            raise CommandError(e.message, returncode=EXIT_TOLERANCE)
        except ValidationError as e:
            logger.warning(f"검증 실패 ({e.field}): {e.message}")
            raise CommandError(f"{e.field}: {e.message}" if e.field else e.message, returncode=EXIT_VALIDATION)
        except (OSError, json.JSONDecodeError) as e:
            raise CommandError(f"입력 파일을 읽을 수 없습니다: {e}", returncode=EXIT_NO_INPUT)

        writer = ResultWriter(config)
        path = writer.write(result)
        if path is None:
            self.stdout.write(writer.render(result), ending='')
        else:
            self.stdout.write(self.style.SUCCESS(f'결과 저장: {path}'))

        if result.failed:
            failures = ', '.join(result.payload.get('failures', []))
            raise CommandError(f"허용 오차를 넘은 검사: {failures}", returncode=EXIT_TOLERANCE)

    def _resolve(self, options) -> ExperimentConfig:
        """설정 파일 < 명령행 순으로 값을 합치고 직렬화기로 검증합니다."""
        task, action = options['task'], options.get('action') or ''
        file_values = {}
        if options.get('config'):
            try:
                file_values = read_json(options['config'])
            except (OSError, ValueError) as e:
                raise CommandError(f"설정 파일을 읽을 수 없습니다: {e}", returncode=EXIT_NO_INPUT)
            if not isinstance(file_values, dict):
                raise CommandError("설정 파일은 JSON 객체여야 합니다.", returncode=EXIT_NO_INPUT)

        params = dict(file_values.get('params', {}))
        for key in PARAM_KEYS:
            if options.get(key) not in (None, False):
                params[key] = options[key]

        operator = options.get('catalog') or options.get('operator') or file_values.get('operator')
        defaults = ExperimentConfig.from_settings(task)
        data = {
            'task': task,
            'action': action,
            'operator': operator,
            'params': params,
            'format': 'csv' if task in CSV_TASKS or (task, action) == ('besov', 'coarea') else 'json',
        }
        for key in GLOBAL_KEYS:
            value = options.get(key)
            if value is None:
                value = file_values.get(key)
            if value is None and key != 'format':
                value = getattr(defaults, key)
            if value is not None:
                data[key] = value

        serializer = ExperimentConfigSerializer(data=data)
        if not serializer.is_valid():
            raise CommandError(f"설정이 올바르지 않습니다: {json.dumps(serializer.errors, ensure_ascii=False)}",
                               returncode=EXIT_VALIDATION)
        return ExperimentConfig(**serializer.validated_data)
