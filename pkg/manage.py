#!/usr/bin/env python
"""Command-line entry point: python manage.py <verb> [options]."""
import os
import sys

USAGE_EXIT = 64
VERBS = ('constants', 'tw', 'gap', 'residual', 'laguerre', 'verify')


def main():
    """Run a verb, or any standard Django management command."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tracyApp.settings')
    try:
        import django
        from django.core.management import execute_from_command_line, get_commands
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    django.setup()
    if len(sys.argv) > 1:
        verb = sys.argv[1]
        if verb not in get_commands() and verb not in ('help', 'version') and not verb.startswith('-'):
            sys.stderr.write(f"Unknown verb {verb!r}. Usage: manage.py {{{','.join(VERBS)}}} [options]\n")
            sys.exit(USAGE_EXIT)
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
