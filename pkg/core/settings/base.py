"""
Base Django settings for the k3-equivariant lattice toolkit.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

load_dotenv(BASE_DIR / ".env")

# Only management commands run; nothing is signed or stored.
SECRET_KEY = os.environ.get("SECRET_KEY", "django-insecure-k3eq-command-line-only")

# Application definition
DJANGO_APPS: list[str] = []

LOCAL_APPS = [
    "core.apps.CoreConfig",
    "lattices",
    "binary_forms",
    "lefschetz",
    "actions",
]

INSTALLED_APPS = DJANGO_APPS + LOCAL_APPS

# No models: every domain object is an immutable value
DATABASES: dict[str, dict] = {}

# Internationalization
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True


def env_int(name: str, default: int) -> int | str:
    """The variable as an integer; other text is kept for core.checks to report."""
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        return value


# Search limits shared by the lattice, form and Lefschetz searches
K3EQ_SEARCH_BUDGET = env_int("K3EQ_SEARCH_BUDGET", 10_000_000)
DISCRIMINANT_ORDER_LIMIT = env_int("K3EQ_DISCRIMINANT_ORDER_LIMIT", 2**16)
LEFSCHETZ_MAX_POINTS = env_int("K3EQ_MAX_POINTS", 24)

K3EQ_APPS = ["core", "lattices", "binary_forms", "lefschetz", "actions"]


def build_logging(level: str) -> dict:
    """Console logging on stderr so that stdout stays machine-readable."""
    return {
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
                "formatter": "verbose",
                "stream": "ext://sys.stderr",
            },
        },
        "root": {
            "handlers": ["console"],
            "level": "WARNING",
        },
        "loggers": {
            "django": {
                "handlers": ["console"],
                "level": "WARNING",
                "propagate": False,
            },
            **{
                app: {"handlers": ["console"], "level": level, "propagate": False}
                for app in K3EQ_APPS
            },
        },
    }
