from django.apps import AppConfig


class HoareConfig(AppConfig):
    name = "hoare"
    verbose_name = "Hoare-logic verification"
