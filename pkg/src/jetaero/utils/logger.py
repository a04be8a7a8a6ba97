"""
Logging framework for jetaero.

Structured logging with a rotating file handler and a console handler on
stderr; stdout stays free for the CLI summary lines.
"""
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

try:
    from icecream import ic
except ImportError:
    def ic(*args, **kwargs):
        return args[0] if len(args) == 1 else (args or None)

PACKAGE_LOGGER = 'jetaero'

_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logger(name: str, log_file: Optional[str] = None, level: int = logging.INFO) -> logging.Logger:
    """
    Attach a rotating file handler (10 MB x 5) and a stderr handler to `name`.

    The console only shows WARNING and above. `log_file` defaults to the
    configured LOG_FILE. Calling again on a configured logger is a no-op.
    """
    logger = logging.getLogger(name)

    if logger.handlers:
        return logger

    logger.setLevel(level)
    formatter = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    if log_file is None:
        from jetaero.config import LOG_FILE
        log_file = LOG_FILE

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=10 * 1024 * 1024,  # 10MB
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(max(level, logging.WARNING))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger for `name`; jetaero.* loggers share the package handlers, set up on first use."""
    root_name = name.split('.')[0]
    if root_name == PACKAGE_LOGGER:
        package_logger = logging.getLogger(PACKAGE_LOGGER)
        if not package_logger.handlers:
            from jetaero.config import LOG_LEVEL
            setup_logger(PACKAGE_LOGGER, level=getattr(logging, LOG_LEVEL.upper(), logging.INFO))
        return logging.getLogger(name)

    logger = logging.getLogger(name)
    if not logger.handlers:
        return setup_logger(name)
    return logger


def configure_tracing(enabled: bool = False) -> None:
    """Route icecream traces into the DEBUG log of the package logger."""
    trace_logger = logging.getLogger(f'{PACKAGE_LOGGER}.trace')
    if hasattr(ic, 'configureOutput'):
        ic.configureOutput(prefix='ic| ', outputFunction=trace_logger.debug)
        if enabled:
            ic.enable()
        else:
            ic.disable()
