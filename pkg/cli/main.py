"""``qhl`` entry point outside ``manage.py``: same subcommands, exit code returned instead of raised."""
import os
import sys


def main(argv=None, stdout=None, stderr=None) -> int:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "quantum_verifier.settings")
    import django
    django.setup()

    from cli.management.commands.qhl import Command

    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        Command(stdout=stdout, stderr=stderr).run_from_argv(["qhl", "qhl", *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
