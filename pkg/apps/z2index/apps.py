from django.apps import AppConfig

class Z2IndexConfig(AppConfig):
    name = "apps.z2index"
    label = "z2index"
    verbose_name = "Z2 projection index"
