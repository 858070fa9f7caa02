"""Argument parsing and channel dispatch shared by the completion commands."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Dict, Iterator, Tuple

from django.core.management.base import CommandError

from completion.services.channels import (
    GBCChannel,
    GICChannel,
    PolygonalRateRegion,
    Regime,
    classify_gic,
    etw_polygon,
    gbc_predicate,
    load_channel_file,
    load_polygon_file,
    strong_ic_polygon,
    very_strong_rectangle,
)
from completion.services.core import (
    CompletionTimeError,
    CompletionTimePair,
    LoadSpec,
    NumericPolicy,
    RegimeMismatchError,
    SoloCaps,
    default_policy,
)
from completion.services.optimize import (
    SolverResult,
    gbc_min_weighted,
    polygon_min_weighted_best,
)
from completion.services.regions import CTRegion, gbc_ctr, polygon_ctr

logger = logging.getLogger(__name__)

EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_MISMATCH = 3


def input_error(message: str) -> CommandError:
    """CommandError carrying the input-error exit code."""
    return CommandError(message, returncode=EXIT_INPUT)


def mismatch_error(message: str) -> CommandError:
    """CommandError carrying the regime-mismatch exit code."""
    return CommandError(message, returncode=EXIT_MISMATCH)


@contextmanager
def command_errors() -> Iterator[None]:
    """Translate library errors into CommandError exit codes."""
    try:
        yield
    except RegimeMismatchError as exc:
        raise mismatch_error(str(exc)) from exc
    except CompletionTimeError as exc:
        raise input_error(str(exc)) from exc


def parse_pair(raw: str, name: str) -> Tuple[float, float]:
    """Parse ``"x,y"`` into two strictly positive floats."""
    parts = [part.strip() for part in str(raw).split(",")]
    if len(parts) != 2:
        raise input_error(f"{name} must look like 'x,y', got {raw!r}")
    try:
        first, second = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise input_error(f"{name} must contain two numbers, got {raw!r}") from exc
    if not (first > 0 and second > 0) or first == float("inf") or second == float("inf"):
        raise input_error(f"{name} values must be positive and finite, got {raw!r}")
    return first, second


def parse_load(raw: str) -> LoadSpec:
    """``--load t1,t2``."""
    return LoadSpec(*parse_pair(raw, "--load"))


def parse_point(raw: str) -> CompletionTimePair:
    """``--point d1,d2``."""
    return CompletionTimePair(*parse_pair(raw, "--point"))


def add_channel_arguments(parser, *, region: bool = True) -> None:
    """Channel file, load and the region/relabeling options."""
    parser.add_argument("channel", help="Channel JSON file (type gbc or gic).")
    parser.add_argument("--load", required=True, help="Per-sample bit loads as 't1,t2'.")
    parser.add_argument(
        "--swap-users",
        action="store_true",
        help="Exchange users 1 and 2 before computing; outputs use the file's labels.",
    )
    if region:
        parser.add_argument("--region", help="Polygon JSON replacing the built-in weak/mixed region.")
        parser.add_argument(
            "--kind",
            choices=("achievable", "outer"),
            default="achievable",
            help="Weak/mixed region: achievable scheme or outer bound.",
        )


@dataclass(frozen=True)
class Problem:
    """A channel, a load and the rate region every computation runs on.

    When ``swapped`` is set everything is held in relabeled coordinates and
    converted back on output.
    """

    channel: GBCChannel | GICChannel
    load: LoadSpec
    swapped: bool
    polygon: PolygonalRateRegion | None
    policy: NumericPolicy

    @property
    def caps(self) -> SoloCaps:
        return self.channel.caps

    @property
    def regime(self) -> Regime | None:
        return None if isinstance(self.channel, GBCChannel) else classify_gic(self.channel)

    def predicate(self):
        """Vectorized rate-region membership."""
        if self.polygon is None:
            return gbc_predicate(self.channel, self.policy)
        return self.polygon.contains

    def build_ctr(self) -> CTRegion:
        """The CTR in computation labels."""
        if self.polygon is None:
            return gbc_ctr(self.channel, self.load, policy=self.policy)
        return polygon_ctr(self.polygon, self.caps, self.load, policy=self.policy)

    def output_ctr(self, ctr: CTRegion) -> CTRegion:
        """The CTR in the file's labels."""
        return ctr.mirrored() if self.swapped else ctr

    def minimize(self, w: float) -> Tuple[SolverResult, Tuple[SolverResult, SolverResult]]:
        """Combined and per-side minimizers at weight ``w`` (file labels)."""
        weight = 1.0 - w if self.swapped else w
        if self.polygon is None:
            return gbc_min_weighted(self.channel, self.load, weight, policy=self.policy)
        return polygon_min_weighted_best(
            self.polygon, self.caps, self.load, weight, policy=self.policy
        )

    def point(self, d: CompletionTimePair) -> CompletionTimePair:
        """Map a user-supplied pair into computation labels."""
        return CompletionTimePair(d.d2, d.d1) if self.swapped else d

    def result_payload(self, result: SolverResult) -> Dict[str, Any]:
        """Serialize a solver result in the file's labels."""
        payload = result.as_dict()
        if not self.swapped:
            return payload
        interval = result.weight_interval
        payload.update(
            minimizer_rate=payload["minimizer_rate"][::-1],
            minimizer_ct=payload["minimizer_ct"][::-1],
            side=3 - result.side,
            weight_interval={
                "lo": 1.0 - interval.hi,
                "hi": 1.0 - interval.lo,
                "lo_closed": interval.hi_closed,
                "hi_closed": interval.lo_closed,
            },
        )
        return payload


def load_problem(options: Dict[str, Any], *, policy: NumericPolicy | None = None) -> Problem:
    """Read the channel file and pick the rate region for the requested options."""
    policy = policy or default_policy()
    swapped = bool(options.get("swap_users"))
    load = parse_load(options["load"])
    if swapped:
        load = load.swapped()
    region_path = options.get("region")
    kind = options.get("kind") or "achievable"

    with command_errors():
        channel = load_channel_file(options["channel"], swap_users=swapped)
        if isinstance(channel, GBCChannel):
            if region_path:
                raise mismatch_error("--region applies to gic channels only")
            if kind != "achievable":
                raise mismatch_error("--kind outer applies to weak/mixed gic channels only")
            return Problem(channel, load, swapped, None, policy)

        regime = classify_gic(channel)
        if regime in (Regime.WEAK, Regime.MIXED):
            if region_path:
                polygon = load_polygon_file(
                    region_path, tag=kind, swap_users=swapped, policy=policy
                )
            else:
                polygon = etw_polygon(channel, kind, policy=policy)
        else:
            if region_path:
                raise mismatch_error(
                    f"--region applies to weak/mixed channels, this one is {regime.value}"
                )
            if kind != "achievable":
                raise mismatch_error(
                    f"--kind outer applies to weak/mixed channels, this one is {regime.value}"
                )
            if regime is Regime.VERY_STRONG:
                polygon = very_strong_rectangle(channel, policy=policy)
            else:
                polygon = strong_ic_polygon(channel, policy=policy)

    max_r1, max_r2 = polygon.max_coordinates()
    caps = channel.caps
    if max_r1 > caps.cap1 + policy.eps_member or max_r2 > caps.cap2 + policy.eps_member:
        raise mismatch_error(
            f"region extends beyond the channel's solo caps {caps.as_tuple()}"
        )
    logger.info("problem: %s, load %s, region %s", channel, load, polygon.tag)
    return Problem(channel, load, swapped, polygon, policy)
