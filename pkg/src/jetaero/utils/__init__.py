# utils/__init__.py
from jetaero.utils.logger import setup_logger, get_logger
from jetaero.utils.error_messages import ErrorMessageMapper

__all__ = ['setup_logger', 'get_logger', 'ErrorMessageMapper']
