# main.py
import logging
import sys

from jetaero.cli.commands import dispatch, parse_args
from jetaero.config import LOG_FILE, LOG_LEVEL, validate_config, ConfigurationError
from jetaero.utils.error_messages import ErrorMessageMapper, EXIT_VALIDATION
from jetaero.utils.logger import configure_tracing, setup_logger

# Set up the package logger for the command line
logger = setup_logger('jetaero', log_file=LOG_FILE, level=getattr(logging, LOG_LEVEL.upper(), logging.INFO))


def run(argv=None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = parse_args(argv)
    configure_tracing(args.trace)
    logger.info(f"Command {args.command} started")
    try:
        # Validate configuration before touching any file
        try:
            validate_config()
        except ConfigurationError as e:
            logger.critical(f"Configuration error: {e}")
            print(f"Configuration Error: {e}", file=sys.stderr)
            return EXIT_VALIDATION

        code = dispatch(args)
        logger.info(f"Command {args.command} finished with exit code {code}")
        return code
    except Exception as e:
        context = {'command': args.command}
        logger.error(ErrorMessageMapper.get_log_message(e, context), exc_info=True)
        print(ErrorMessageMapper.format_error_for_user(e, context), file=sys.stderr)
        return ErrorMessageMapper.get_exit_code(e)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
