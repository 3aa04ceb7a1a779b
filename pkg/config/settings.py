"""
Django settings for the sdcar project.

수치 라이브러리 + management command CLI 구성. DB/HTTP 없음.
환경변수(.env)로 허용오차와 출력 경로를 덮어쓸 수 있다.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / ".env")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {"format": "[%(levelname)s] %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "simple"},
    },
    "loggers": {
        "apps.selfdual": {"handlers": ["console"], "level": "INFO"},
        "apps.lattice": {"handlers": ["console"], "level": "INFO"},
        "apps.spectral": {"handlers": ["console"], "level": "INFO"},
        "apps.flow": {"handlers": ["console"], "level": "INFO"},
        "apps.z2index": {"handlers": ["console"], "level": "INFO"},
        "apps.qfstates": {"handlers": ["console"], "level": "INFO"},
        "apps.experiments": {"handlers": ["console"], "level": "INFO"},
    },
}

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "django-insecure-sdcar-local-only")

DEBUG = os.environ.get("DJANGO_DEBUG", "1") == "1"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'apps.selfdual',
    'apps.lattice',
    'apps.spectral',
    'apps.flow',
    'apps.z2index',
    'apps.qfstates',
    'apps.experiments',
]

INSTALLED_APPS += ['rest_framework']

# DB 없음: SimpleTestCase 전용
DATABASES = {}

# ---------- 수치 허용오차 ----------
SELFDUAL_RTOL = float(os.environ.get("SELFDUAL_RTOL", "1e-10"))
SPECTRAL_ZERO_RTOL = float(os.environ.get("SPECTRAL_ZERO_RTOL", "1e-8"))
Z2INDEX_TOL_ONE = float(os.environ.get("Z2INDEX_TOL_ONE", "1e-6"))
FLOW_TRANSPORT_TOL = float(os.environ.get("FLOW_TRANSPORT_TOL", "1e-6"))
FLOW_H_INITIAL = float(os.environ.get("FLOW_H_INITIAL", "1e-2"))
FLOW_H_MIN = float(os.environ.get("FLOW_H_MIN", "1e-5"))

# ---------- 실험 출력 ----------
EXPERIMENTS_OUT_DIR = os.environ.get("EXPERIMENTS_OUT_DIR", str(BASE_DIR / "out"))
EXPERIMENTS_WORKERS = int(os.environ.get("EXPERIMENTS_WORKERS", "4"))


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'ko-kr'

TIME_ZONE = 'Asia/Seoul'

USE_I18N = True

USE_TZ = True
