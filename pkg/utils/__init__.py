"""
debranges-lab utilities package.

Logging setup and run configuration shared by the CLI and the services.
"""

from .logging import setup_logging, get_logger
from .config import RunConfig

__all__ = [
    'setup_logging',
    'get_logger',
    'RunConfig',
]
