"""
Centralized logging configuration using Loguru.

This module initializes a Loguru logger that can be imported and used throughout the application.
"""

import inspect
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

# Constants for log directory and default log level
DEFAULT_LOG_LEVEL = "INFO"
APP_NAME = "nudge_bandit"

# Get log directory
LOG_DIR = str(Path.home() / f".{APP_NAME}" / "logs")

LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan> - <level>{message}</level>"
)


def get_logger(module_name: str = None):
    """
    Get a logger instance with the module name.

    Args:
        module_name: Optional module name. If not provided, uses the caller's module name.

    Returns:
        A configured logger instance
    """
    # If module_name not provided, use the caller's module name
    if module_name is None:
        frame = inspect.stack()[1]
        module = inspect.getmodule(frame[0])
        module_name = module.__name__ if module else "unnamed"

    return logger.bind(name=module_name)


def configure_logging(level: str = DEFAULT_LOG_LEVEL, log_file: Optional[str] = None) -> None:
    """
    Replace the default stderr sink with one at the requested level.

    Args:
        level: Minimum level for the stderr sink
        log_file: Optional file name, written under LOG_DIR
    """
    logger.remove()
    logger.configure(extra={"name": APP_NAME})
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)

    if log_file:
        Path(LOG_DIR).mkdir(parents=True, exist_ok=True)
        logger.add(str(Path(LOG_DIR) / log_file), level="DEBUG", rotation="10 MB")

