"""
Logging setup for debranges-lab.

The CLI calls setup_logging once per package (core, services, data_modules
and its own logger); modules only call get_logger(__name__) and inherit
the package handlers.
"""

import logging
import os
from logging.handlers import RotatingFileHandler

from pythonjsonlogger import jsonlogger

from config import Config

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
JSON_FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'


def _formatter(log_format):
    if log_format == "json":
        return jsonlogger.JsonFormatter(JSON_FORMAT)
    return logging.Formatter(TEXT_FORMAT)


def setup_logging(name, log_file=None, level=None, log_format=None):
    """
    Attach a stderr handler and a rotating file handler to a package logger.

    Handlers are added once per logger; later calls only change the level,
    so repeated CLI runs in one process do not duplicate output.

    Args:
        name: package name such as "core", or a module __name__
        log_file: log file path (default Config.LOG_FILE)
        level: level name overriding Config.LOG_LEVEL
        log_format: "text" or "json" (default Config.LOG_FORMAT)

    Returns:
        logging.Logger
    """
    log_file = log_file or Config.LOG_FILE
    log_format = log_format or Config.LOG_FORMAT
    os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)

    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, (level or Config.LOG_LEVEL).upper()))
    if logger.handlers:
        return logger

    formatter = _formatter(log_format)

    # stdout carries the report
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    file_handler = RotatingFileHandler(
        log_file,
        mode='a',
        maxBytes=Config.LOG_MAX_BYTES,
        backupCount=Config.LOG_BACKUP_COUNT
    )
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)
    return logger


def get_logger(name):
    return logging.getLogger(name)
