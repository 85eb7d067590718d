import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# The toolkit has no web surface; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "fpg-toolkit-local-only")

DEBUG = os.environ.get("DJANGO_DEBUG", "False") == "True"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "groups",
]

MIDDLEWARE = []


# Database
# Nothing is persisted; the in-memory database keeps pytest-django happy.

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": ":memory:",
    }
}


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}")


# Finitely presented group toolkit configuration
FPG = {
    # Bundled presentations and derivation scripts
    'FIXTURES_DIR': Path(os.environ.get('FPG_FIXTURES', BASE_DIR / 'groups' / 'fixtures')),
    'DERIVATIONS_DIR': Path(os.environ.get(
        'FPG_DERIVATIONS', BASE_DIR / 'groups' / 'fixtures' / 'derivations'
    )),

    # Coset enumeration
    'MAX_COSETS': _env_int('FPG_MAX_COSETS', 1_000_000),
    'STRATEGY': os.environ.get('FPG_STRATEGY', 'hlt'),  # 'hlt' or 'felsch'
    'LOOKAHEAD': os.environ.get('FPG_LOOKAHEAD', 'True') == 'True',

    # Parser guards
    'MAX_WORD_LENGTH': 100_000,    # letters per expanded word
}

# Reports are rendered through DRF's JSON renderer; no API views are served.
REST_FRAMEWORK = {
    "DEFAULT_RENDERER_CLASSES": ["rest_framework.renderers.JSONRenderer"],
    "COMPACT_JSON": False,
}

# Diagnostics go to stderr so that stdout stays a clean report stream.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': False,
        },
        'groups': {
            'handlers': ['console'],
            'level': os.environ.get('FPG_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
