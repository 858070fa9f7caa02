"""Minimize the weighted completion time w*d1 + (1-w)*d2."""

import logging
import math

from django.core.management.base import BaseCommand

from completion.services import export

from ._inputs import add_channel_arguments, command_errors, input_error, load_problem

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Print the weighted-sum completion-time minimizer as JSON."

    def add_arguments(self, parser):
        add_channel_arguments(parser)
        parser.add_argument("--weight", type=float, required=True, help="Weight w in [0, 1].")
        parser.add_argument(
            "--per-side", action="store_true", help="Include both per-side minimizers."
        )

    def handle(self, *args, **options):
        weight = options["weight"]
        if not (math.isfinite(weight) and 0.0 <= weight <= 1.0):
            raise input_error("weight out of [0,1]")
        problem = load_problem(options)
        with command_errors():
            best, sides = problem.minimize(weight)
        payload = problem.result_payload(best)
        if options["per_side"]:
            payload["per_side"] = [problem.result_payload(result) for result in sides]
        logger.info("minimize w=%g: objective %.12g", weight, best.objective)
        self.stdout.write(export.dumps(payload), ending="")
