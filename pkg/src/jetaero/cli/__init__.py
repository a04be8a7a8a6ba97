# cli/__init__.py
from jetaero.cli.commands import build_parser, dispatch, parse_args
from jetaero.cli.report import build_report

__all__ = ['build_parser', 'dispatch', 'parse_args', 'build_report']
