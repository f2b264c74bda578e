"""퇴화 콜모고로프-포커-플랑크 연산자 수치 실험 라이브러리.

행렬 유틸리티(matlin), 연산자 모델(operators), 열 반군(semigroup),
분수 거듭제곱(fractional), 분수 둘레(perimeter), 베소프 매장(besov)과
``kfp`` 관리 명령으로 구성됩니다.
"""
