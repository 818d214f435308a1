from django.apps import AppConfig


class LangConfig(AppConfig):
    name = "lang"
    verbose_name = "Program syntax and typing"
