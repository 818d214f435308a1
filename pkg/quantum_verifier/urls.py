"""
URL configuration for quantum_verifier project.

The `urlpatterns` list routes URLs to views. Every app exposes its JSON endpoints
under its own prefix; the same operations are available offline through
`python manage.py qhl`.
"""
from django.urls import path, include

urlpatterns = [
    path("lang/", include('lang.urls')),
    path("semantics/", include('semantics.urls')),
    path("hoare/", include('hoare.urls')),
    path("casestudy/", include('casestudy.urls')),
]
