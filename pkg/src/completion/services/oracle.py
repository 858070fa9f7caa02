"""Brute-force checks of the analytic constructions.

Everything here works on dense numpy grids and relies only on the rate
region predicate and the mappings, never on the constructors it verifies.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Protocol, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .channels import RegionPredicate
from .core import DomainError, LoadSpec, NumericPolicy, SoloCaps, _get_setting, _resolve
from .ctmap import ct_achievable_grid, map_rates_grid

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 10


class AnalyticRegion(Protocol):
    """Anything with vectorized membership and a finite set of corners."""

    def contains(self, d1: Any, d2: Any) -> Any: ...

    def corner_points(self) -> List[Tuple[float, float]]: ...


def _check_resolution(n: int) -> int:
    if int(n) < MIN_RESOLUTION:
        raise DomainError(f"grid resolution must be at least {MIN_RESOLUTION}, got {n}")
    return int(n)


def band_steps_setting() -> int:
    """Boundary band half-width in grid steps."""
    return int(_get_setting("CTR_BAND_STEPS", 3))


@dataclass(frozen=True)
class CTCloud:
    """Images of the member points of a rate grid."""

    r1: np.ndarray
    r2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    side: np.ndarray
    n: int

    def __len__(self) -> int:
        return int(self.d1.size)


def grid_ct_cloud(
    region_contains: RegionPredicate, caps: SoloCaps, load: LoadSpec, n: int
) -> CTCloud:
    """Map every member of an n x n grid over [0, cap1] x [0, cap2]."""
    n = _check_resolution(n)
    r1, r2 = np.meshgrid(
        np.linspace(0.0, caps.cap1, n), np.linspace(0.0, caps.cap2, n), indexing="ij"
    )
    member = np.asarray(region_contains(r1, r2), dtype=bool)
    d1, d2, side = map_rates_grid(r1, r2, load, caps)
    keep = member & (side > 0) & np.isfinite(d1) & np.isfinite(d2)
    logger.debug("rate grid %dx%d: %d members mapped", n, n, int(keep.sum()))
    return CTCloud(r1=r1[keep], r2=r2[keep], d1=d1[keep], d2=d2[keep], side=side[keep], n=n)


@dataclass(frozen=True)
class GridMinimum:
    """Smallest weighted completion time found on the cloud."""

    value: float
    d: Tuple[float, float]
    r: Tuple[float, float]
    side: int
    n: int

    def as_dict(self) -> Dict[str, object]:
        return {"value": self.value, "d": list(self.d), "r": list(self.r), "side": self.side,
                "n": self.n}


def grid_min_weighted(
    region_contains: RegionPredicate,
    caps: SoloCaps,
    load: LoadSpec,
    w: float,
    n: int,
    *,
    cloud: CTCloud | None = None,
) -> GridMinimum:
    """Weighted-sum minimum over the cloud; pass ``cloud`` to reuse a grid."""
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"weight out of [0,1]: {w}")
    cloud = cloud if cloud is not None else grid_ct_cloud(region_contains, caps, load, n)
    if not len(cloud):
        raise DomainError("rate grid has no member with a finite image")
    values = w * cloud.d1 + (1.0 - w) * cloud.d2
    index = int(np.argmin(values))
    return GridMinimum(
        value=float(values[index]),
        d=(float(cloud.d1[index]), float(cloud.d2[index])),
        r=(float(cloud.r1[index]), float(cloud.r2[index])),
        side=int(cloud.side[index]),
        n=cloud.n,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Agreement between an analytic region and the achievability oracle."""

    passed: bool
    counts: Dict[str, int]
    worst_distance: float
    worst_analytic_only: float
    worst_oracle_only: float
    worst_points: Dict[str, List[float] | None]
    grid: Dict[str, object]

    @property
    def disagreements(self) -> int:
        """Disagreeing points outside the boundary band."""
        return self.counts["analytic_only"] + self.counts["oracle_only"]

    def as_dict(self) -> Dict[str, object]:
        return {
            "result": "PASS" if self.passed else "FAIL",
            "counts": dict(self.counts),
            "worst_distance": self.worst_distance,
            "worst_analytic_only": self.worst_analytic_only,
            "worst_oracle_only": self.worst_oracle_only,
            "worst_points": dict(self.worst_points),
            "grid": dict(self.grid),
        }


def default_box(analytic: AnalyticRegion) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """[0.5 * min vertex, 4 * max vertex] on each axis."""
    corners = np.asarray(analytic.corner_points(), dtype=float)
    if corners.size == 0:
        raise DomainError("analytic region exposes no corner points")
    lo = 0.5 * corners.min(axis=0)
    hi = 4.0 * corners.max(axis=0)
    return (float(lo[0]), float(hi[0])), (float(lo[1]), float(hi[1]))


def _edge(mask: np.ndarray, structure: np.ndarray) -> np.ndarray:
    grown = ndimage.binary_dilation(mask, structure=structure)
    shrunk = ndimage.binary_erosion(mask, structure=structure, border_value=1)
    return grown & ~shrunk


def _worst(mask: np.ndarray, distance: np.ndarray, d1: np.ndarray, d2: np.ndarray):
    if not mask.any():
        return 0.0, None
    masked = np.where(mask, distance, -1.0)
    index = np.unravel_index(int(np.argmax(masked)), masked.shape)
    return float(masked[index]), [float(d1[index]), float(d2[index])]


def compare_regions(
    analytic: AnalyticRegion,
    region_contains: RegionPredicate,
    caps: SoloCaps,
    load: LoadSpec,
    n: int,
    *,
    box: Tuple[Tuple[float, float], Tuple[float, float]] | None = None,
    band_steps: int | None = None,
    policy: NumericPolicy | None = None,
) -> ComparisonReport:
    """Classify an n x n completion-time grid against the oracle.

    Points within ``band_steps`` grid steps of either boundary are only
    counted; disagreement anywhere else fails the comparison.
    """
    n = _check_resolution(n)
    policy = _resolve(policy)
    band_steps = band_steps_setting() if band_steps is None else int(band_steps)
    (lo1, hi1), (lo2, hi2) = box or default_box(analytic)
    axis1 = np.linspace(lo1, hi1, n)
    axis2 = np.linspace(lo2, hi2, n)
    step = (axis1[1] - axis1[0], axis2[1] - axis2[0])
    d1, d2 = np.meshgrid(axis1, axis2, indexing="ij")

    in_analytic = np.asarray(analytic.contains(d1, d2), dtype=bool)
    in_oracle = ct_achievable_grid(region_contains, caps, load, d1, d2)

    structure = np.ones((2 * band_steps + 1, 2 * band_steps + 1), dtype=bool)
    band = _edge(in_analytic, structure) | _edge(in_oracle, structure)
    analytic_only = in_analytic & ~in_oracle & ~band
    oracle_only = in_oracle & ~in_analytic & ~band

    distance = np.where(
        in_analytic,
        ndimage.distance_transform_edt(in_analytic, sampling=step),
        ndimage.distance_transform_edt(~in_analytic, sampling=step),
    )
    worst_a, point_a = _worst(analytic_only, distance, d1, d2)
    worst_o, point_o = _worst(oracle_only, distance, d1, d2)
    worst_all, _ = _worst(in_analytic ^ in_oracle, distance, d1, d2)

    counts = {
        "both_member": int((in_analytic & in_oracle & ~band).sum()),
        "analytic_only": int(analytic_only.sum()),
        "oracle_only": int(oracle_only.sum()),
        "neither": int((~in_analytic & ~in_oracle & ~band).sum()),
        "boundary_band": int(band.sum()),
        "band_disagreements": int(((in_analytic ^ in_oracle) & band).sum()),
    }
    report = ComparisonReport(
        passed=counts["analytic_only"] == 0 and counts["oracle_only"] == 0,
        counts=counts,
        worst_distance=worst_all,
        worst_analytic_only=worst_a,
        worst_oracle_only=worst_o,
        worst_points={"analytic_only": point_a, "oracle_only": point_o},
        grid={
            "n": n,
            "d1_range": [lo1, hi1],
            "d2_range": [lo2, hi2],
            "step": [float(step[0]), float(step[1])],
            "band_steps": band_steps,
            "eps_member": policy.eps_member,
        },
    )
    logger.info(
        "compare n=%d: %s (analytic-only %d, oracle-only %d, band %d)",
        n,
        "PASS" if report.passed else "FAIL",
        counts["analytic_only"],
        counts["oracle_only"],
        counts["boundary_band"],
    )
    return report


@dataclass(frozen=True)
class SweepEntry:
    """One resolution of a sweep."""

    n: int
    disagreements: int
    band_disagreement_fraction: float
    worst_distance: float
    passed: bool

    def as_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "disagreements": self.disagreements,
            "band_disagreement_fraction": self.band_disagreement_fraction,
            "worst_distance": self.worst_distance,
            "passed": self.passed,
        }


def resolution_sweep(
    analytic: AnalyticRegion,
    region_contains: RegionPredicate,
    caps: SoloCaps,
    load: LoadSpec,
    ns: Sequence[int],
    *,
    band_steps: int | None = None,
    policy: NumericPolicy | None = None,
) -> List[SweepEntry]:
    """Run ``compare_regions`` on increasing resolutions over one fixed box."""
    box = default_box(analytic)
    entries = []
    for n in sorted(set(int(value) for value in ns)):
        report = compare_regions(
            analytic, region_contains, caps, load, n, box=box, band_steps=band_steps, policy=policy
        )
        entries.append(
            SweepEntry(
                n=n,
                disagreements=report.disagreements,
                band_disagreement_fraction=report.counts["band_disagreements"] / float(n * n),
                worst_distance=report.worst_distance,
                passed=report.passed,
            )
        )
    return entries


def resolution_bound(caps: SoloCaps, load: LoadSpec, n: int, corner: Tuple[float, float]) -> float:
    """Error bound of the grid minimum around a completion-time corner.

    A rate step h moves d_i by about tau_i * h / r_i**2; the corner's rates
    are tau_i / d_i.
    """
    steps = (caps.cap1 / (n - 1), caps.cap2 / (n - 1))
    slopes = [corner[i] ** 2 / tau for i, tau in enumerate(load.as_tuple())]
    return float(2.0 * math.fsum(h * s for h, s in zip(steps, slopes)))
