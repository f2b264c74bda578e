from django.apps import AppConfig


class KfpLabConfig(AppConfig):
    name = 'kfp_lab'
    verbose_name = 'KFP 수치 실험'
