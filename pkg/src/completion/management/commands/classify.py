"""Print the interference regime of a GIC channel file."""

import logging

from django.core.management.base import BaseCommand

from completion.services.channels import GBCChannel, classify_gic, load_channel_file

from ._inputs import command_errors, input_error

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Classify a Gaussian interference channel as very-strong, strong, weak or mixed."

    def add_arguments(self, parser):
        parser.add_argument("channel", help="Channel JSON file of type gic.")

    def handle(self, *args, **options):
        with command_errors():
            channel = load_channel_file(options["channel"])
        if isinstance(channel, GBCChannel):
            raise input_error("classify requires gic")
        regime = classify_gic(channel)
        logger.info("classified %s as %s", options["channel"], regime.value)
        self.stdout.write(regime.value)
