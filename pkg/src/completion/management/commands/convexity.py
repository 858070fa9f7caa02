"""Non-convexity certificate of a broadcast-channel CTR."""

import logging

from django.core.management.base import BaseCommand

from completion.services import export
from completion.services.optimize import nonconvexity_certificate

from ._inputs import add_channel_arguments, command_errors, input_error, load_problem

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Print the tangent weights at C and whether the GBC region is non-convex."

    def add_arguments(self, parser):
        add_channel_arguments(parser, region=False)

    def handle(self, *args, **options):
        problem = load_problem(options)
        if problem.polygon is not None:
            raise input_error("convexity requires gbc")
        with command_errors():
            certificate = nonconvexity_certificate(problem.channel, problem.load, policy=problem.policy)
        payload = {**certificate.as_dict(), "users_swapped": problem.swapped}
        logger.info("convexity: nonconvex=%s", certificate.nonconvex)
        self.stdout.write(export.dumps(payload), ending="")
