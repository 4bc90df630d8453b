"""Logging configuration for the toolkit"""

import logging
import sys
from pathlib import Path
from typing import Optional

import coloredlogs

CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'


def setup_logger(level: str = 'INFO', log_file: Optional[str] = None) -> logging.Logger:
    """Setup the 'selfsim' logger with a colored stderr handler and an optional file handler"""
    logger = logging.getLogger('selfsim')
    logger.setLevel(getattr(logging, level.upper()))
    logger.propagate = False

    # Clear existing handlers
    logger.handlers.clear()

    # stdout carries JSON reports, so the console handler writes to stderr
    coloredlogs.install(level=level.upper(), logger=logger, fmt=CONSOLE_FORMAT, stream=sys.stderr)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
        logger.addHandler(file_handler)

    return logger
