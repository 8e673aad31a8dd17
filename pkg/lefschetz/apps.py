from django.apps import AppConfig


class LefschetzConfig(AppConfig):
    name = "lefschetz"
