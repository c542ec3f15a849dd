#!/usr/bin/env python
"""
patchtower command line.

    python manage.py gen --q 2 --r 1 --out-dir scenario
    python manage.py patch scenario/tower.json --precision 2
    python manage.py verify_ha complex.json --format text
    python manage.py test
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'patchtower.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError("patchtower runs on Django; install requirements.txt first") from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
