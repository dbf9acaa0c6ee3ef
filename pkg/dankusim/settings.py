import environ
import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

root = environ.Path(__file__) - 2
env = environ.Env(DEBUG=(bool, False))
environ.Env.read_env(".env")

BASE_DIR = root()
DEBUG = env("DEBUG")
SECRET_KEY = env("SECRET_KEY", default="danku-simulator-has-no-secrets")
ALLOWED_HOSTS = []


# Application definition
INSTALLED_APPS = [
    "django.contrib.contenttypes",
    # Project apps
    "commitments",
    "chain",
    "partitioning",
    "fixed_point",
    "contract",
    "scenarios",
]

# The simulator keeps everything in memory; a database is configured only
# because Django (and pytest-django) expect one.
DATABASES = {"default": env.db("DATABASE_URL", default=f"sqlite:///{root.path('db.sqlite3')}")}

USE_TZ = True
TIME_ZONE = "UTC"


# Fixed-point arithmetic
DANKU_SCALE_BITS = env.int("DANKU_SCALE_BITS", default=20)

# Gas schedule (storage figure and gas limit as measured in Jan 2018)
DANKU_STORAGE_GAS_PER_KIB = env.int("DANKU_STORAGE_GAS_PER_KIB", default=6068352)
DANKU_GAS_LIMIT = env.int("DANKU_GAS_LIMIT", default=8_000_000)
DANKU_GAS_PRICE_GWEI = env("DANKU_GAS_PRICE_GWEI", default="4")
DANKU_ETH_USD = env("DANKU_ETH_USD", default="1100")

# Contract defaults
DANKU_GROUP_SIZE = env.int("DANKU_GROUP_SIZE", default=5)
DANKU_TRAINING_FRACTION = env("DANKU_TRAINING_FRACTION", default="4/5")
DANKU_INIT2_BLOCK_LIMIT = env.int("DANKU_INIT2_BLOCK_LIMIT", default=5)

# Analytics
DANKU_MC_TRIALS = env.int("DANKU_MC_TRIALS", default=10_000)
DANKU_MC_WORKERS = env.int("DANKU_MC_WORKERS", default=1)
DANKU_SHOW_PROGRESS = env.bool("DANKU_SHOW_PROGRESS", default=True)
BUNDLED_SCENARIOS_DIR = root.path("scenarios", "data")()

# Sentry config
SENTRY_DSN = env("SENTRY_DSN", default="")
if SENTRY_DSN:
    sentry_sdk.init(SENTRY_DSN, integrations=[DjangoIntegration()])
