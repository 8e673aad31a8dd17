from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = "core"
    verbose_name = "k3-equivariant core"

    def ready(self):
        import core.checks  # noqa
