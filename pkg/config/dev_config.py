"""
Development configuration for debranges-lab.
"""
import logging
import os

from .base_config import BaseConfig


class DevelopmentConfig(BaseConfig):
    """Half-size truncations and coarse C4 grids for interactive work."""

    DEBUG = True
    TESTING = False

    LOG_LEVEL = os.getenv("LOG_LEVEL", "DEBUG")
    LOG_FILE = os.getenv("LOG_FILE", "logs/debranges_lab_dev.log")

    TRUNCATION = int(os.getenv("DEBRANGES_LAB_TRUNCATION", 64))
    GRID_SIZE = int(os.getenv("DEBRANGES_LAB_GRID", 2048))
    C4_THETA_GRID = int(os.getenv("DEBRANGES_LAB_C4_THETA", 180))
    C4_PSI_GRID = int(os.getenv("DEBRANGES_LAB_C4_PSI", 180))

    @classmethod
    def init_app(cls, app=None):
        """Console logging at DEBUG; residuals and ranks show up as they are computed."""
        super().init_app(app)
        logging.basicConfig(level=logging.DEBUG, format='%(asctime)s [%(levelname)s] %(name)s: %(message)s')
