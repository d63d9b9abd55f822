from django.apps import AppConfig


class SmoothingConfig(AppConfig):
    name = 'smoothing'
    verbose_name = "Mesh smoothing"
