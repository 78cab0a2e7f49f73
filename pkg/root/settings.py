"""
Django settings for the geometry optimization simulator.

The project has no web surface: Django provides settings, management
commands and the test runner. Experiment settings live in GEOMOPT.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-geomopt-local-only')

DEBUG = os.environ.get('DJANGO_DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    # Config schema
    'rest_framework',
    # App
    'geomopt',
]


# No models; runs write to GEOMOPT['OUTPUT_ROOT'].
DATABASES = {}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# =============================================================================
# Geometry optimization
# =============================================================================

GEOMOPT = {
    # Largest electronic block diagonalized densely (4096 for the LiH preset)
    'DENSE_CAP': int(os.environ.get('GEOMOPT_DENSE_CAP', 8192)),
    # Largest composite amplitude array allocated
    'MAX_AMPLITUDES': int(os.environ.get('GEOMOPT_MAX_AMPLITUDES', 2 ** 28)),
    'OUTPUT_ROOT': Path(os.environ.get('GEOMOPT_OUTPUT_ROOT', BASE_DIR / 'runs')),
    'DEFAULT_THREADS': int(os.environ.get('GEOMOPT_THREADS', 1)),
    'PRESETS_DIR': BASE_DIR / 'geomopt' / 'presets',
}


# =============================================================================
# Logging
# =============================================================================

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'geomopt': {
            'handlers': ['console'],
            'level': os.environ.get('GEOMOPT_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
