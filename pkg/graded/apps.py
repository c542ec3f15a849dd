from django.apps import AppConfig


class GradedConfig(AppConfig):
    name = 'graded'
    verbose_name = 'Groebner bases, resolutions and support heights over F_p[T]'
