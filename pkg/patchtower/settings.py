"""
Django settings for the patchtower project.

The project has no web surface and no database: Django provides the
configuration layer, the management-command CLI and the test runner.
Every tunable is read through python-decouple, so it can be overridden
from the environment or a .env file.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config("SECRET_KEY", default="patchtower-insecure-key")

DEBUG = config("DEBUG", default=False, cast=bool)

ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost", cast=lambda v: v.split(","))

# Application definition

INSTALLED_APPS = [
    'core',
    'rings',
    'linalg',
    'complexes',
    'graded',
    'patcher',
    'cli',
]

# No models anywhere; the test suite only uses SimpleTestCase.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

USE_TZ = True

# Logging

LOG_LEVEL = config("LOG_LEVEL", default="WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        app: {"handlers": ["console"], "level": LOG_LEVEL, "propagate": False}
        for app in ("core", "rings", "linalg", "complexes", "graded", "patcher", "cli")
    },
}

# Engine limits

# Largest number of variables the graded (polynomial) engine accepts
MAX_GRADED_VARIABLES = config("MAX_GRADED_VARIABLES", default=4, cast=int)

# Hilbert functions are compared on this many degrees above the lowest generator
HILBERT_TRUNCATION_DEGREE = config("HILBERT_TRUNCATION_DEGREE", default=6, cast=int)

# Candidate basis changes tried by the pigeonhole fallback before giving up
BASIS_CHANGE_BUDGET = config("BASIS_CHANGE_BUDGET", default=5000, cast=int)

# Scenario generation

DEFAULT_TRUNCATION_DEGREE = config("DEFAULT_TRUNCATION_DEGREE", default=2, cast=int)
DEFAULT_SEED = config("DEFAULT_SEED", default=7, cast=int)

# Size of the seeded random suites in the test modules
RANDOM_SAMPLE_COUNT = config("RANDOM_SAMPLE_COUNT", default=100, cast=int)
