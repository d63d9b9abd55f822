"""
Settings for the mdmsmooth project.

There is no web surface and no database: Django provides the command-line
subcommands (see smoothing/management/commands) and the test runner.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing here signs data.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "django-insecure-mdmsmooth-local-only")

DEBUG = False

INSTALLED_APPS = [
    "smoothing",
]

DATABASES = {}

USE_TZ = True

# Default worker count for `smooth --threads`
MDM_THREADS = int(os.environ.get("MDM_THREADS", "1"))

LOGLEVEL = os.environ.get("LOGLEVEL", "INFO")
