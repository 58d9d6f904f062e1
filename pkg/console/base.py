import logging
import sys

from django.core.management import BaseCommand, CommandError
from django.core.management.base import CommandParser
from pydantic import ValidationError

from numerics.exceptions import NumericsError

logger = logging.getLogger(__name__)

DOMAIN_EXIT = 1
VERIFY_EXIT = 2
USAGE_EXIT = 64

APP_LOGGERS = ('numerics', 'edge', 'laguerre', 'console')
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG, 3: logging.DEBUG}


class VerificationFailed(Exception):
    """Raised by a command whose document must still be emitted before exiting non-zero."""

    def __init__(self, message: str, text: str):
        super().__init__(message)
        self.text = text


class UsageParser(CommandParser):

    def error(self, message):
        if self.called_from_command_line:
            self.print_usage(sys.stderr)
            self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")
        raise CommandError(f"Error: {message}", returncode=USAGE_EXIT)


def one_line(text) -> str:
    return ' '.join(str(text).split())


def format_errors(errors) -> str:
    parts = []
    for field, messages in errors.items():
        if not isinstance(messages, (list, tuple)):
            messages = [messages]
        parts.append(f"{field}: {' '.join(str(message) for message in messages)}")
    return '; '.join(parts)


class TracyCommand(BaseCommand):
    """
    Validates options with serializer_class, runs the computation and writes
    the document to stdout or --output. Subclasses implement run(config, echo).
    """
    requires_system_checks = []
    serializer_class = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = UsageParser
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--format', help="csv or json")
        parser.add_argument('--output', help="write the document to this path instead of stdout")
        parser.add_argument('--threads', help="worker threads for sweeps (default TRACY_THREADS or 1)")

    def configure_logging(self, verbosity: int):
        level = VERBOSITY_LEVELS.get(verbosity, logging.DEBUG)
        for name in APP_LOGGERS:
            logging.getLogger(name).setLevel(level)

    def collect(self, options) -> dict:
        fields = self.serializer_class().fields
        return {key: value for key, value in options.items() if key in fields and value is not None}

    def emit(self, text: str, output=None):
        if output:
            try:
                with open(output, 'w', encoding='utf-8', newline='') as handle:
                    handle.write(text)
            except OSError as e:
                raise CommandError(f"Cannot write {output}: {one_line(e)}", returncode=DOMAIN_EXIT)
            logger.info(f"Wrote {len(text)} characters to {output}")
        else:
            self.stdout.write(text, ending='')

    def run(self, config: dict, echo: dict) -> str:
        raise NotImplementedError

    def handle(self, *args, **options):
        self.configure_logging(options['verbosity'])
        serializer = self.serializer_class(data=self.collect(options))
        if not serializer.is_valid():
            message = format_errors(serializer.errors)
            logger.error(f"Invalid options: {message}")
            raise CommandError(message, returncode=USAGE_EXIT)
        config = serializer.validated_data
        try:
            text = self.run(config, serializer.echo())
        except VerificationFailed as e:
            self.emit(e.text, config.get('output'))
            raise CommandError(str(e), returncode=VERIFY_EXIT)
        except (NumericsError, ValidationError) as e:
            logger.error(f"{type(e).__name__}: {one_line(e)}")
            raise CommandError(one_line(e), returncode=DOMAIN_EXIT)
        self.emit(text, config.get('output'))
