"""Cross-check an analytic CTR against the brute-force achievability oracle."""

import logging
import sys

from django.core.management.base import BaseCommand

from completion.services import export
from completion.services.channels import Regime
from completion.services.oracle import compare_regions
from completion.services.regions import strong_ctr_closed_form

from ._inputs import (
    EXIT_NEGATIVE,
    add_channel_arguments,
    command_errors,
    input_error,
    load_problem,
    mismatch_error,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Compare the analytic region with the oracle on an n x n grid; exit 1 on FAIL."

    def add_arguments(self, parser):
        add_channel_arguments(parser)
        parser.add_argument(
            "--grid", type=int, default=None, help="Grid resolution n (default: CTR_GRID_N)."
        )
        parser.add_argument(
            "--closed-form",
            action="store_true",
            help="Strong channels: compare the literal case constraints instead.",
        )
        parser.add_argument("--band-steps", type=int, default=None)
        parser.add_argument("--out", help="Also write the report JSON to this file.")

    def handle(self, *args, **options):
        problem = load_problem(options)
        grid = problem.policy.grid_n if options["grid"] is None else options["grid"]
        if grid < 10:
            raise input_error("--grid must be at least 10")
        with command_errors():
            if options["closed_form"]:
                if problem.regime is not Regime.STRONG:
                    raise mismatch_error("--closed-form applies to strong gic channels only")
                analytic = strong_ctr_closed_form(problem.channel, problem.load, policy=problem.policy)
                subject = {"closed_form": analytic.as_dict()}
            else:
                analytic = problem.build_ctr()
                subject = {"tag": analytic.tag}
            report = compare_regions(
                analytic,
                problem.predicate(),
                problem.caps,
                problem.load,
                grid,
                band_steps=options["band_steps"],
                policy=problem.policy,
            )
        payload = {**report.as_dict(), "subject": subject, "users_swapped": problem.swapped}
        text = export.dumps(payload)
        if options["out"]:
            export.write_atomic(options["out"], text)
        self.stdout.write(text, ending="")
        if not report.passed:
            logger.warning(
                "verify FAIL: %d analytic-only, %d oracle-only",
                report.counts["analytic_only"],
                report.counts["oracle_only"],
            )
            sys.exit(EXIT_NEGATIVE)
