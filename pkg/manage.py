#!/usr/bin/env python
"""Django 관리 명령 실행기.

    python manage.py kfp verify --suite core
    python manage.py test kfp_lab
"""
import os
import sys


def main():
    """관리 명령을 실행합니다."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django를 불러올 수 없습니다. 가상 환경이 활성화되어 있는지, "
            "requirements.txt 가 설치되어 있는지 확인하세요."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
