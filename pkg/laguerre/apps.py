from django.apps import AppConfig


class LaguerreConfig(AppConfig):
    name = 'laguerre'
    verbose_name = 'Laguerre ensemble gap probabilities'
