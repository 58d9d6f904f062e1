"""
Django settings for the tracy project.

The project has no web surface and no database: it is driven entirely through
management commands (see console/management/commands).
"""
import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing is signed.
SECRET_KEY = "tracy-local-numerics"

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'rest_framework',
    'numerics.apps.NumericsConfig',
    'edge.apps.EdgeConfig',
    'laguerre.apps.LaguerreConfig',
    'console.apps.ConsoleConfig',
]

DATABASES = {}

REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': (
        "rest_framework.renderers.JSONRenderer",
    ),
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

# Numerical defaults; command-line flags override them per run.
TRACY = {
    'Y_START': 16.0,
    'Y_END': -12.0,
    'STEP': 1.0 / 128.0,
    'FREDHOLM_NODES': 80,
    'FREDHOLM_DD_NODES': 96,
    'CSV_DIGITS': 17,
    'THREADS': 1,
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {
        "console": {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    "formatters": {
        "verbose": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s (%(filename)s:%(lineno)d)",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "INFO",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "celery": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "numerics": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "edge": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "laguerre": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "console": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}

# Sweep points run as tasks in-process; no broker is needed.
CELERY_TASK_ALWAYS_EAGER = True
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_BROKER_URL = "memory://"
CELERY_RESULT_BACKEND = "cache+memory://"

THREADS_ENV = 'TRACY_THREADS'
if os.getenv(THREADS_ENV, '').strip().isdigit():
    TRACY['THREADS'] = max(1, int(os.getenv(THREADS_ENV)))
