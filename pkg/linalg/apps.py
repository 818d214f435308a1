from django.apps import AppConfig


class LinalgConfig(AppConfig):
    name = "linalg"
    verbose_name = "Matrices, states and predicates"
