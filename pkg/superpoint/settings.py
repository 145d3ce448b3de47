"""
Django settings for superpoint project.

Generated by 'django-admin startproject' using Django 4.2.7 and trimmed to
what the command-line tooling needs: no URL routing, no middleware.

For more information on this file, see
https://docs.djangoproject.com/en/4.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    "SUPERPOINT_SECRET_KEY",
    "django-insecure-3k$v!p0w9s+1f@q7mz#c2r(l8t4x)e6n5y_d&h*gj%ub^ia0o",
)

DEBUG = os.environ.get("DEBUG", "False") == "True"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "rest_framework",
    "fieldtheories",
]

REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
}


# Database
# https://docs.djangoproject.com/en/4.2/ref/settings/#databases
# Nothing is persisted; the sqlite file only satisfies the test runner.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "superpoint.sqlite3",
    }
}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Field-theory computations
SUPERPOINT_MAX_CELLS = int(os.environ.get("SUPERPOINT_MAX_CELLS", "10000"))
SUPERPOINT_POLYDEG_BOUND = int(os.environ.get("SUPERPOINT_POLYDEG_BOUND", "4"))
SUPERPOINT_TWIST_DEGREE_CAP = int(os.environ.get("SUPERPOINT_TWIST_DEGREE_CAP", "6"))
SUPERPOINT_SEARCH_FIELD = int(os.environ.get("SUPERPOINT_SEARCH_FIELD", "101"))
SUPERPOINT_SEARCH_MAX_DEGREE = int(os.environ.get("SUPERPOINT_SEARCH_MAX_DEGREE", "3"))

LOG_LEVEL = os.environ.get("SUPERPOINT_LOG_LEVEL", "INFO")
LOG_DIR = BASE_DIR / "logs"
LOG_DIR.mkdir(exist_ok=True)

# Logging configuration
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
        },
        "file": {
            "class": "logging.FileHandler",
            "filename": LOG_DIR / "superpoint.log",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console", "file"],
            "level": "WARNING",
            "propagate": False,
        },
        "fieldtheories": {
            "handlers": ["console", "file"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
    },
}
