"""
Development settings for the k3-equivariant lattice toolkit.
"""

from .base import *

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = True

K3EQ_LOG_LEVEL = os.environ.get("K3EQ_LOG_LEVEL", "INFO")

# Logging configuration for development
LOGGING = build_logging(K3EQ_LOG_LEVEL)
