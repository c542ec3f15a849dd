import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "patchtower.settings")
django.setup()
