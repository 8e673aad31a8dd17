"""
Production settings: used by the installed ``k3eq`` command.
"""

import logging
import os

from .base import *

K3EQ_LOG_LEVEL = os.environ.get("K3EQ_LOG_LEVEL", "INFO")

# Configure basic logging early
logging.basicConfig(
    level=K3EQ_LOG_LEVEL,
    format="%(levelname)s %(asctime)s %(module)s %(message)s",
    handlers=[logging.StreamHandler()],
)

logger = logging.getLogger(__name__)
logger.debug("Loading production settings for k3eq")

DEBUG = False

# Logging configuration for production
LOGGING = build_logging(K3EQ_LOG_LEVEL)
