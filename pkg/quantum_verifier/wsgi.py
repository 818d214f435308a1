"""WSGI callable serving the verifier's JSON endpoints (``runserver`` and any WSGI host)."""
import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantum_verifier.settings")

application = get_wsgi_application()
