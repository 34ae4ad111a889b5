"""
Production configuration for debranges-lab.

Acceptance runs and batch reproductions use the full truncation and C4
grids of BaseConfig; logging is configured from ``logging.json``.
"""
import json
import logging
import logging.config
import os

from .base_config import BaseConfig

LOGGING_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)), "logging.json")


def apply_logging_config(path=LOGGING_CONFIG):
    """
    dictConfig from a JSON file; basic stderr logging when it cannot be read.

    Returns:
        bool: True when the file was applied
    """
    try:
        with open(path, "r") as f:
            logging.config.dictConfig(json.load(f))
        return True
    except (OSError, ValueError) as e:
        logging.basicConfig(level=logging.INFO, format='%(asctime)s [%(levelname)s] %(name)s: %(message)s')
        logging.getLogger(__name__).warning(f"Falling back to basic logging: {e}")
        return False


class ProductionConfig(BaseConfig):
    """Full-size runs with rotating structured logs."""

    DEBUG = False
    TESTING = False

    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "logs/debranges_lab.log")
    LOG_MAX_BYTES = int(os.getenv("LOG_MAX_BYTES", 20971520))  # 20MB
    LOG_BACKUP_COUNT = int(os.getenv("LOG_BACKUP_COUNT", 10))

    @classmethod
    def init_app(cls, app=None):
        os.makedirs("logs", mode=0o755, exist_ok=True)
        apply_logging_config()
