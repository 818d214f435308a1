import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantum_verifier.settings")
django.setup()
