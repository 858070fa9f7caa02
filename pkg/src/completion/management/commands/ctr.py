"""Build the completion-time region of a channel and write it out."""

import logging

from django.conf import settings
from django.core.management.base import BaseCommand

from completion.services import export
from completion.services.regions import ctr_boundary

from ._inputs import add_channel_arguments, command_errors, input_error, load_problem

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Compute the completion-time region and write it as JSON or a boundary CSV."

    def add_arguments(self, parser):
        add_channel_arguments(parser)
        parser.add_argument("--out", required=True, help="Output file.")
        parser.add_argument("--format", choices=("json", "csv"), default="json")
        parser.add_argument(
            "--samples",
            type=int,
            default=None,
            help="Boundary points to sample (JSON: adds a 'boundary' list; CSV: row count).",
        )
        parser.add_argument("--plot", help="Also draw the region into this SVG file.")
        parser.add_argument(
            "--plot-vertices",
            action="store_true",
            help="Mark the region's vertices in the SVG.",
        )

    def handle(self, *args, **options):
        problem = load_problem(options)
        samples = options["samples"]
        if samples is not None and samples < 2:
            raise input_error("--samples must be at least 2")

        with command_errors():
            ctr = problem.output_ctr(problem.build_ctr())
            count = samples or settings.CTR_BOUNDARY_SAMPLES
            if options["format"] == "csv":
                export.write_boundary_csv(options["out"], ctr_boundary(ctr, count))
            else:
                payload = ctr.as_dict()
                if samples:
                    payload["boundary"] = [
                        {"d1": p.d1, "d2": p.d2, "marker": p.marker}
                        for p in ctr_boundary(ctr, samples)
                    ]
                export.write_json(options["out"], payload)
            if options["plot"]:
                export.plot_ctr_svg(
                    ctr, options["plot"], samples=count, show_vertices=options["plot_vertices"]
                )

        logger.info("ctr (%s) written to %s", ctr.tag, options["out"])
        self.stdout.write(f"{ctr.tag} completion time region written to {options['out']}")
