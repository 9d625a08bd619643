"""Logger Configuration"""
import logging
import os
import sys


def setup_logger(name: str) -> logging.Logger:
    """Configure a named logger; stdout is reserved for reports, so logs go to stderr."""
    logger = logging.getLogger(name)
    level_name = os.getenv('HSOLV_LOG_LEVEL', 'INFO').upper()
    logger.setLevel(getattr(logging, level_name, logging.INFO))

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger
