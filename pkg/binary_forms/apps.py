from django.apps import AppConfig


class BinaryFormsConfig(AppConfig):
    name = "binary_forms"
    verbose_name = "Even binary forms"
