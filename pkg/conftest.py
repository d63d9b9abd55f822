"""Configure Django for pytest so the smoothing test suite can run outside `manage.py test`."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "mdmsmooth.settings")
django.setup()
