"""
CycloneTrend - Django Settings
==============================

This file contains all Django configuration settings for the CycloneTrend
toolkit. CycloneTrend has no web surface: Django provides the settings layer,
the management commands that make up the command line, logging configuration
and the test runner.

Every numerical default can be overridden from the environment or a `.env`
file placed next to `manage.py`.

For more information on Django settings, see:
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

# Load environment variables from .env file (if present)
try:
    from dotenv import load_dotenv
    # settings.py lives at cyclonetrend/config/settings.py
    # .env lives at the cyclonetrend/ root
    load_dotenv(Path(__file__).resolve().parent.parent / '.env')
except ImportError:
    pass  # python-dotenv not installed: use OS environment variables directly


# =============================================================================
# BASE CONFIGURATION
# =============================================================================

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Django refuses to start without one; nothing here is signed or served.
SECRET_KEY = os.environ.get(
    'SECRET_KEY',
    'django-insecure-cyclonetrend-local-key'
)

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# =============================================================================
# APPLICATION DEFINITION
# =============================================================================

# No django.contrib apps: nothing here has models, sessions or a web surface.

# CycloneTrend apps
LOCAL_APPS = [
    'core.apps.CoreConfig',                 # Ingestion, outputs, run configuration
    'intensity.apps.IntensityConfig',       # Spline basis, Poisson regression, bands
    'changepoint.apps.ChangepointConfig',   # Exact conditional-binomial test
    'simulation.apps.SimulationConfig',     # Synthetic NHPP data and bootstrap
]

INSTALLED_APPS = LOCAL_APPS


# =============================================================================
# DATABASE CONFIGURATION
# =============================================================================

# The toolkit keeps no state in a database; SQLite is declared so that the
# standard management commands (check, test) run without extra setup.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# =============================================================================
# INTERNATIONALIZATION
# =============================================================================

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True


# =============================================================================
# LOGGING
# =============================================================================

LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('core', 'intensity', 'changepoint', 'simulation')
    },
}


# =============================================================================
# CYCLONETREND CUSTOM SETTINGS
# =============================================================================

APP_NAME = 'CycloneTrend'
APP_VERSION = '1.0.0'

# --- Spline basis and evaluation grid ---------------------------------------
# One interior knot roughly every 12.5 years over a 125-year record.
INTENSITY_INTERIOR_KNOTS = int(os.environ.get('INTENSITY_INTERIOR_KNOTS', '9'))
INTENSITY_GRID_POINTS = int(os.environ.get('INTENSITY_GRID_POINTS', '1001'))

# --- Fisher scoring ---------------------------------------------------------
FIT_TOLERANCE = float(os.environ.get('FIT_TOLERANCE', '1e-10'))
FIT_SCORE_TOLERANCE = float(os.environ.get('FIT_SCORE_TOLERANCE', '1e-8'))
FIT_MAX_ITERATIONS = int(os.environ.get('FIT_MAX_ITERATIONS', '100'))
FIT_MAX_HALVINGS = int(os.environ.get('FIT_MAX_HALVINGS', '30'))

# --- Change-point test ------------------------------------------------------
# 'strict' excludes the observed value from the tail, 'inclusive' keeps it.
CHANGEPOINT_TEST_VARIANT = os.environ.get('CHANGEPOINT_TEST_VARIANT', 'strict')
CHANGEPOINT_LEVEL = float(os.environ.get('CHANGEPOINT_LEVEL', '0.05'))

# --- Simulation and bootstrap -----------------------------------------------
SIMULATION_RNG = os.environ.get('SIMULATION_RNG', 'PCG64')
BOOTSTRAP_MAX_FAILURE_SHARE = float(os.environ.get('BOOTSTRAP_MAX_FAILURE_SHARE', '0.10'))

# --- Outputs ----------------------------------------------------------------
OUTPUT_DIR = Path(os.environ.get('OUTPUT_DIR', BASE_DIR / 'output'))
EMIT_FORMAT = os.environ.get('EMIT_FORMAT', 'csv')

# Directory holding yearly series exported from the IMD cyclone e-Atlas
# (depressions.csv, cyclonic_storms.csv, severe_cyclonic_storms.csv).
# The series are not redistributed with the project.
BOB_SERIES_DIR = os.environ.get('BOB_SERIES_DIR', '')
