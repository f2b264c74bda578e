#!/usr/bin/env python
"""품질 검사 스크립트.

정적 분석, 보안 스캔, 단위 테스트, 핵심 검증 모음을 차례로 실행하고 결과를 요약합니다.

    python scripts/quality_check.py           # 전체
    python scripts/quality_check.py --fast    # 검증 모음 생략
"""

import argparse
import subprocess  # nosec B404
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
PACKAGES = ['kfp_lab', 'config']


def run_command(name, command):
    """명령어 실행 및 결과 반환."""
    print(f"\n{'=' * 50}")
    print(f"실행: {name}")
    print('=' * 50)

    try:
        result = subprocess.run(command, cwd=ROOT, capture_output=True, text=True)  # nosec B603
    except OSError as e:
        print(f"에러: {e}")
        return False
    print(result.stdout)
    if result.stderr:
        print(result.stderr)
    return result.returncode == 0


def main():
    """메인 함수."""
    parser = argparse.ArgumentParser(description='kfp_lab 품질 검사')
    parser.add_argument('--fast', action='store_true', help='검증 모음(verify --suite core) 생략')
    args = parser.parse_args()

    steps = [
        ("Flake8", "Flake8 (코드 스타일)", ['flake8', *PACKAGES]),
        ("Pylint", "Pylint (정적 분석)", ['pylint', *PACKAGES]),
        ("Bandit", "Bandit (보안 취약점 스캔)", ['bandit', '-r', *PACKAGES, '--skip', 'B101', '-x', 'kfp_lab/tests']),
        ("Tests", "Django 테스트", [sys.executable, 'manage.py', 'test', 'kfp_lab']),
    ]
    if not args.fast:
        steps.append(("Verify", "검증 모음 (core)", [sys.executable, 'manage.py', 'kfp', 'verify', '--suite', 'core']))

    results = [(name, run_command(title, command)) for name, title, command in steps]

    # 결과 요약
    print(f"\n{'=' * 50}")
    print("품질 검사 결과 요약")
    print('=' * 50)
    for name, passed in results:
        print(f"{'[PASS]' if passed else '[FAIL]'} {name}")
    print('=' * 50)

    return 0 if all(passed for _, passed in results) else 1


if __name__ == "__main__":
    sys.exit(main())
