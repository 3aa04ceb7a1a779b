#!/usr/bin/env python
"""sdcar command-line utility.

    python manage.py sweep --config apps/experiments/fixtures/kitaev_intra.toml
    python manage.py selftest
"""
import os
import sys


def main():
    """Run experiment / administrative commands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install requirements.txt into the active "
            "virtual environment first."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
