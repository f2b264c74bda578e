"""pytest 실행 시 Django 설정을 불러옵니다 (manage.py test 와 같은 설정)."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()
