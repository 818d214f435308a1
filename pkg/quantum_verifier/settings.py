"""
Django settings for quantum_verifier project.

Generated by 'django-admin startproject' using Django 5.1.4.

For more information on this file, see
https://docs.djangoproject.com/en/5.1/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.1/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get("SECRET_KEY", "fallback-insecure-key")


# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get("DEBUG", "1") == "1"

ALLOWED_HOSTS = os.environ.get("ALLOWED_HOSTS", "localhost,127.0.0.1,testserver").split(",")

# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "linalg.apps.LinalgConfig",
    "lang.apps.LangConfig",
    "semantics.apps.SemanticsConfig",
    "hoare.apps.HoareConfig",
    "casestudy.apps.CasestudyConfig",
    "cli.apps.CliConfig",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.middleware.common.CommonMiddleware",
]

ROOT_URLCONF = "quantum_verifier.urls"

WSGI_APPLICATION = "quantum_verifier.wsgi.application"

# Nothing is persisted: programs, states and predicates only live for one request.
DATABASES = {}

# Internationalization
# https://docs.djangoproject.com/en/5.1/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [
        "rest_framework.permissions.AllowAny",
    ],
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "DEFAULT_PARSER_CLASSES": [
        "rest_framework.parsers.JSONParser",
    ],
    "UNAUTHENTICATED_USER": None,
}

# Verification defaults, each overridable per call, per CLI flag or per request.

QHL_TOL = float(os.environ.get("QHL_TOL", "1e-9"))

QHL_LOOP_MAX_ITERS = int(os.environ.get("QHL_LOOP_MAX_ITERS", "1000"))

QHL_LOOP_MASS_EPS = float(os.environ.get("QHL_LOOP_MASS_EPS", "1e-9"))

QHL_FIX_EPS = float(os.environ.get("QHL_FIX_EPS", "1e-9"))

QHL_FIX_MAX_ITERS = int(os.environ.get("QHL_FIX_MAX_ITERS", "10000"))

QHL_QUNIT_DIM = int(os.environ.get("QHL_QUNIT_DIM", "8"))

QHL_KRAUS_LIMIT = int(os.environ.get("QHL_KRAUS_LIMIT", "4096"))

QHL_DJ_MAX_K = int(os.environ.get("QHL_DJ_MAX_K", "6"))

QHL_LOG_LEVEL = os.environ.get("QHL_LOG_LEVEL", "WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {message}",
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
        app: {"handlers": ["console"], "level": QHL_LOG_LEVEL, "propagate": False}
        for app in ("linalg", "lang", "semantics", "hoare", "casestudy", "cli")
    },
}
