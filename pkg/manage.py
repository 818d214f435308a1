#!/usr/bin/env python
"""
Project entry point.

``python manage.py qhl <subcommand>`` runs the verifier offline, ``test`` runs every
app's suite and ``runserver`` serves the JSON endpoints.
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantum_verifier.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError("Django is not importable; install requirements.txt into the active environment") from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
