from django.apps import AppConfig


class ComplexesConfig(AppConfig):
    name = 'complexes'
    verbose_name = 'Free complexes, minimization and cohomology'
