from django.apps import AppConfig

class SelfDualConfig(AppConfig):
    name = "apps.selfdual"
    label = "selfdual"
    verbose_name = "Self-dual core"
