from django.apps import AppConfig


class LinalgConfig(AppConfig):
    name = 'linalg'
    verbose_name = 'Howell forms, kernels and scalar expansion'
