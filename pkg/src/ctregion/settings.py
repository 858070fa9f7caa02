"""
Django settings for the ctregion project.

The project carries no web surface; Django provides configuration, logging
setup and the management-command CLI for the completion app.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
import warnings
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv()


def _bool_env(var_name: str, default: bool = False) -> bool:
    raw = os.getenv(var_name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _int_env(var_name: str, default: int) -> int:
    raw = os.getenv(var_name)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except (TypeError, ValueError) as exc:
        raise ImproperlyConfigured(f"{var_name} must be an integer, got {raw!r}") from exc


def _float_env(var_name: str, default: float) -> float:
    raw = os.getenv(var_name)
    if raw is None:
        return default
    try:
        return float(raw.strip())
    except (TypeError, ValueError) as exc:
        raise ImproperlyConfigured(f"{var_name} must be a number, got {raw!r}") from exc


DEBUG = _bool_env("DJANGO_DEBUG", default=True)

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY")
if not SECRET_KEY:
    if DEBUG:
        SECRET_KEY = "dev-insecure-placeholder-key"
        warnings.warn(
            "DJANGO_SECRET_KEY was not set; using insecure development key.",
            RuntimeWarning,
        )
    else:
        raise ImproperlyConfigured("DJANGO_SECRET_KEY environment variable must be set.")


# Application definition

INSTALLED_APPS = [
    'completion',
]

# No database-backed models exist; commands and tests run without a connection.
DATABASES = {}

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Numeric policy shared by every completion-time computation.
CTR_EPS_MEMBER = _float_env("CTR_EPS_MEMBER", 1e-9)
CTR_EPS_ROOT = _float_env("CTR_EPS_ROOT", 1e-12)
CTR_GRID_N = _int_env("CTR_GRID_N", 2000)
CTR_MAX_BISECTIONS = _int_env("CTR_MAX_BISECTIONS", 200)

# Oracle / export knobs.
CTR_BAND_STEPS = _int_env("CTR_BAND_STEPS", 3)
CTR_BOUNDARY_SAMPLES = _int_env("CTR_BOUNDARY_SAMPLES", 200)
CTR_OUTPUT_DIGITS = _int_env("CTR_OUTPUT_DIGITS", 12)
CTR_FIXTURES_DIR = Path(os.getenv("CTR_FIXTURES_DIR") or str(BASE_DIR / "fixtures"))

CTR_LOG_LEVEL = os.getenv("CTR_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "completion": {
            "handlers": ["console"],
            "level": CTR_LOG_LEVEL,
            "propagate": False,
        },
    },
}
