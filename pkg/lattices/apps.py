from django.apps import AppConfig


class LatticesConfig(AppConfig):
    name = "lattices"
    verbose_name = "Integer lattices"
