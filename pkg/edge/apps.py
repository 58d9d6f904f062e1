from django.apps import AppConfig


class EdgeConfig(AppConfig):
    name = 'edge'
    verbose_name = 'Soft-edge determinants and Painleve II'
