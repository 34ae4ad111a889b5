"""
Configuration classes for debranges-lab, selected by the ENVIRONMENT variable.

    production (default)  full truncation and C4 grids, dictConfig logging
    development           smaller grids, DEBUG console logging
    testing               grids sized for the test suite, quiet logs
"""
import logging
import os

from .base_config import BaseConfig
from .dev_config import DevelopmentConfig
from .prod_config import ProductionConfig
from .test_config import TestingConfig

DEFAULT_ENVIRONMENT = "production"

CONFIG_BY_ENVIRONMENT = {
    "production": ProductionConfig,
    "prod": ProductionConfig,
    "development": DevelopmentConfig,
    "dev": DevelopmentConfig,
    "testing": TestingConfig,
    "test": TestingConfig,
}


def get_config(environment=None):
    """
    Config class for an environment name, $ENVIRONMENT when not given.

    Unknown names get the production settings. ``init_app`` runs on every
    call so the log directory exists before a handler opens it.
    """
    name = (environment or os.getenv("ENVIRONMENT", DEFAULT_ENVIRONMENT)).strip().lower()
    config_class = CONFIG_BY_ENVIRONMENT.get(name)
    if config_class is None:
        config_class = ProductionConfig
        logging.getLogger(__name__).warning(f"unknown ENVIRONMENT {name!r}, using production settings")
    config_class.init_app()
    return config_class


def validated_config():
    """
    The active config class after ``validate()``.

    Raises:
        ValueError: when an environment override broke a numeric default
    """
    try:
        return Config.validate()
    except ValueError as e:
        logging.getLogger(__name__).error(f"Configuration validation failed: {e}")
        raise


# Active configuration for this process
Config = get_config()
