"""
Django settings for config project.

kfp_lab 수치 실험 도구의 설정입니다. 데이터베이스와 웹 화면은 쓰지 않으며,
관리 명령 `kfp`와 테스트 실행기에 필요한 앱만 등록합니다.
"""

import os
from pathlib import Path


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent
from dotenv import load_dotenv  # noqa: E402
load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'kfp-lab-local')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = os.environ.get('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    # Third-party apps
    'rest_framework',
    # Local apps
    'kfp_lab',
]




# 저장하는 상태가 없으므로 데이터베이스를 쓰지 않습니다
DATABASES = {}


TIME_ZONE = 'UTC'

USE_TZ = True


# Django REST Framework 설정 (직렬화기만 사용)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}


# ============ 실험 기본값 ============
# 명령행 플래그 > --config 파일 > 환경 변수 > 아래 기본값 순으로 적용됩니다

KFP_SEED = int(os.environ.get('KFP_SEED', str(0xB5EED)), 0)
KFP_WORKERS = int(os.environ.get('KFP_WORKERS', '4'))
KFP_SAMPLES = int(os.environ.get('KFP_SAMPLES', '20000'))
KFP_TOLERANCE = float(os.environ.get('KFP_TOLERANCE', '1e-2'))
KFP_OUTPUT_DIR = Path(os.environ.get('KFP_OUTPUT_DIR', str(BASE_DIR / 'results')))
KFP_LOG_LEVEL = os.environ.get('KFP_LOG_LEVEL', 'INFO')


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '[{asctime}] {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'kfp_lab': {
            'handlers': ['console'],
            'level': KFP_LOG_LEVEL,
            'propagate': False,
        },
    },
}
