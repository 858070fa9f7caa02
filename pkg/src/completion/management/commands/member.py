"""Decide whether a completion-time pair is achievable."""

import logging
import sys

from django.core.management.base import BaseCommand

from completion.services.core import CompletionTimeError
from completion.services.ctmap import ct_achievable

from ._inputs import (
    EXIT_NEGATIVE,
    add_channel_arguments,
    command_errors,
    input_error,
    load_problem,
    parse_point,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Print 'achievable' or 'not-achievable' for --point d1,d2 (exit 1 when not)."

    def add_arguments(self, parser):
        add_channel_arguments(parser)
        parser.add_argument("--point", required=True, help="Completion times as 'd1,d2'.")

    def handle(self, *args, **options):
        try:
            point = parse_point(options["point"])
        except CompletionTimeError as exc:
            raise input_error(str(exc)) from exc
        problem = load_problem(options)
        with command_errors():
            achievable = ct_achievable(
                problem.predicate(), problem.caps, problem.load, problem.point(point)
            )
        logger.info("member %s -> %s", point.as_tuple(), achievable)
        if achievable:
            self.stdout.write("achievable")
            return
        self.stdout.write("not-achievable")
        sys.exit(EXIT_NEGATIVE)
