from django.apps import AppConfig

class SpectralConfig(AppConfig):
    name = "apps.spectral"
    label = "spectral"
    verbose_name = "Spectral"
