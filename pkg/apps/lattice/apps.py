from django.apps import AppConfig

class LatticeConfig(AppConfig):
    name = "apps.lattice"
    label = "lattice"
    verbose_name = "Lattice models"
