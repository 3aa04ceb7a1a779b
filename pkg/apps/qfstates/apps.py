from django.apps import AppConfig

class QFStatesConfig(AppConfig):
    name = "apps.qfstates"
    label = "qfstates"
    verbose_name = "Quasi-free states"
