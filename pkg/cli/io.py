from pathlib import Path
from typing import Any, Callable, Dict, Tuple
import logging

from django.core.management.base import BaseCommand, CommandError

from core.errors import PatchtowerError
from core.serialization import canonical_json, read_json

logger = logging.getLogger(__name__)

Report = Tuple[Dict, str]


def load(path: str, parse: Callable[[Any], Any]) -> Any:
    """
    Reads a JSON file and parses it with one of the from_dict constructors.
    """
    return parse(read_json(Path(path)))


class ReportCommand(BaseCommand):
    """
    Base of the engine commands: run() returns a report as (JSON data, text).
    Engine errors are written to stdout as structured error objects and end
    the command with their exit code.
    """

    def add_arguments(self, parser):
        parser.add_argument(
            '--format',
            choices=['json', 'text'],
            default='json',
            help="Report format on stdout"
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options) -> Report:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            data, text = self.run(**options)
        except PatchtowerError as e:
            logger.info("%s failed with %s", self.__module__.rsplit(".", 1)[-1], e.__class__.__name__)
            if options['format'] == 'json':
                self.stdout.write(canonical_json(e.to_dict()), ending="")
            else:
                self.stdout.write(f"{e.__class__.__name__}: {e.message}")
            raise CommandError(e.message, returncode=e.exit_code)
        if options['format'] == 'json':
            self.stdout.write(canonical_json(data), ending="")
        else:
            self.stdout.write(text)
