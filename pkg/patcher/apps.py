from django.apps import AppConfig


class PatcherConfig(AppConfig):
    name = 'patcher'
    verbose_name = 'Patching towers, chain selection and freeness certificates'
