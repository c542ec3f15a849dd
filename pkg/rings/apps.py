from django.apps import AppConfig


class RingsConfig(AppConfig):
    name = 'rings'
    verbose_name = 'Coefficient rings, patch rings and their reductions'
