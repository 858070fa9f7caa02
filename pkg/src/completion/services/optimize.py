"""Weighted-sum completion-time minimization.

Minimizing ``w*d1 + (1-w)*d2`` over one side of a CTR reduces to a linear
problem over the rate region: a boundary point is optimal exactly when the
weight attached to its supporting line matches ``w``. For the GBC that
weight moves monotonically with the power split, so bisection on P1 finds
the minimizer; for polygons the weights of the segments partition [0, 1].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .channels import (
    GBCChannel,
    PolygonalRateRegion,
    gbc_boundary_point,
    intersect_load_ray_gbc,
    intersect_load_ray_polygon,
)
from .core import (
    CompletionTimePair,
    DomainError,
    LoadSpec,
    NumericPolicy,
    RatePair,
    SoloCaps,
    _resolve,
    bisect_increasing,
)
from .ctmap import map_side, objective_D

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TangentLine:
    """Supporting line ``a*r1 + b*r2 = 1`` of the GBC region at power P1."""

    a: float
    b: float
    g: float
    P1: float
    w1: float
    w2: float
    point: RatePair

    def as_dict(self) -> Dict[str, object]:
        return {
            "a": self.a,
            "b": self.b,
            "g": self.g,
            "P1": self.P1,
            "w1": self.w1,
            "w2": self.w2,
            "point": list(self.point.as_tuple()),
        }


@dataclass(frozen=True)
class WeightInterval:
    """Weights for which a minimizer is active; endpoints may be open."""

    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __contains__(self, w: float) -> bool:
        above = w >= self.lo if self.lo_closed else w > self.lo
        below = w <= self.hi if self.hi_closed else w < self.hi
        return above and below

    def as_dict(self) -> Dict[str, object]:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }


@dataclass(frozen=True)
class SolverResult:
    """Minimizer of the weighted completion time on one side."""

    minimizer_rate: RatePair
    minimizer_ct: CompletionTimePair
    objective: float
    side: int
    weight_interval: WeightInterval
    label: str = ""
    P1: float | None = None

    def as_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "minimizer_rate": list(self.minimizer_rate.as_tuple()),
            "minimizer_ct": list(self.minimizer_ct.as_tuple()),
            "objective": self.objective,
            "side": self.side,
            "weight_interval": self.weight_interval.as_dict(),
            "label": self.label,
        }
        if self.P1 is not None:
            payload["P1"] = self.P1
        return payload


def _check_weight(w: float) -> float:
    w = float(w)
    if not (math.isfinite(w) and 0.0 <= w <= 1.0):
        raise DomainError(f"weight out of [0,1]: {w}")
    return w


def _result(
    side: int,
    rate: RatePair,
    load: LoadSpec,
    w: float,
    caps: SoloCaps,
    interval: WeightInterval,
    label: str,
    P1: float | None = None,
    policy: NumericPolicy | None = None,
) -> SolverResult:
    ct = map_side(side, rate, load, caps, policy=policy)
    return SolverResult(
        minimizer_rate=rate,
        minimizer_ct=ct,
        objective=objective_D(side, rate, load, w, caps, policy=policy),
        side=side,
        weight_interval=interval,
        label=label,
        P1=P1,
    )


def pick_best(first: SolverResult, second: SolverResult) -> SolverResult:
    """Smaller objective; ties go to the side-1 result."""
    if first.side == 2 and second.side == 1:
        first, second = second, first
    return first if first.objective <= second.objective else second


# --- broadcast channel -------------------------------------------------------


def gbc_tangent(ch: GBCChannel, P1: float) -> TangentLine:
    """Tangent line and its weights at the boundary point generated by P1."""
    point = gbc_boundary_point(ch, P1)
    cap1, cap2 = ch.caps.as_tuple()
    g = (1.0 / ch.h1**2 + P1) / (1.0 / ch.h2**2 + P1)
    b = 1.0 / (point.r2 + g * point.r1)
    a = g * b
    return TangentLine(a=a, b=b, g=g, P1=float(P1), w1=1.0 - b * cap2, w2=a * cap1, point=point)


def gbc_min_weighted(
    ch: GBCChannel,
    load: LoadSpec,
    w: float,
    *,
    policy: NumericPolicy | None = None,
) -> Tuple[SolverResult, Tuple[SolverResult, SolverResult]]:
    """Minimize w*d1 + (1-w)*d2 over the GBC CTR.

    Side 1 searches P1 in [P1', P] through w1, side 2 searches [0, P1']
    through w2; both weights increase with P1.
    """
    w = _check_weight(w)
    policy = _resolve(policy)
    caps = ch.caps
    _, p1_prime = intersect_load_ray_gbc(ch, load, policy=policy)
    at_c = gbc_tangent(ch, p1_prime)
    at_b = gbc_tangent(ch, ch.P)
    at_a = gbc_tangent(ch, 0.0)

    if w <= at_c.w1:
        side1 = _result(1, at_c.point, load, w, caps, WeightInterval(0.0, at_c.w1), "C",
                        p1_prime, policy)
    elif w >= at_b.w1:
        side1 = _result(1, at_b.point, load, w, caps, WeightInterval(at_b.w1, 1.0), "B",
                        ch.P, policy)
    else:
        p1 = bisect_increasing(
            lambda p: gbc_tangent(ch, p).w1 - w, p1_prime, ch.P, policy=policy
        )
        side1 = _result(1, gbc_boundary_point(ch, p1), load, w, caps, WeightInterval(w, w),
                        "boundary", p1, policy)

    if w <= at_a.w2:
        side2 = _result(2, at_a.point, load, w, caps, WeightInterval(0.0, at_a.w2), "A",
                        0.0, policy)
    elif w >= at_c.w2:
        side2 = _result(2, at_c.point, load, w, caps, WeightInterval(at_c.w2, 1.0), "C",
                        p1_prime, policy)
    else:
        p1 = bisect_increasing(
            lambda p: gbc_tangent(ch, p).w2 - w, 0.0, p1_prime, policy=policy
        )
        side2 = _result(2, gbc_boundary_point(ch, p1), load, w, caps, WeightInterval(w, w),
                        "boundary", p1, policy)

    best = pick_best(side1, side2)
    logger.debug("gbc min at w=%g: side %d objective %.12g", w, best.side, best.objective)
    return best, (side1, side2)


@dataclass(frozen=True)
class ConvexityCertificate:
    """Tangent weights at C; ``nonconvex`` when w1(C) < w2(C)."""

    w1C: float
    w2C: float
    s1: float | None
    s2: float | None
    nonconvex: bool
    P1_prime: float
    C: RatePair
    s1_unbounded: bool = False
    s2_unbounded: bool = False

    def as_dict(self) -> Dict[str, object]:
        return {
            "w1C": self.w1C,
            "w2C": self.w2C,
            "s1": self.s1,
            "s2": self.s2,
            "s1_unbounded": self.s1_unbounded,
            "s2_unbounded": self.s2_unbounded,
            "nonconvex": self.nonconvex,
            "P1_prime": self.P1_prime,
            "C": list(self.C.as_tuple()),
        }


def _slope(weight: float, eps: float) -> float | None:
    if abs(weight - 1.0) <= eps:
        return None
    return weight / (weight - 1.0) + 0.0


def nonconvexity_certificate(
    ch: GBCChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> ConvexityCertificate:
    """Compare the tangent weights at C; a gap makes the CTR non-convex."""
    policy = _resolve(policy)
    c_point, p1_prime = intersect_load_ray_gbc(ch, load, policy=policy)
    tangent = gbc_tangent(ch, p1_prime)
    s1 = _slope(tangent.w1, policy.eps_member)
    s2 = _slope(tangent.w2, policy.eps_member)
    return ConvexityCertificate(
        w1C=tangent.w1,
        w2C=tangent.w2,
        s1=s1,
        s2=s2,
        nonconvex=tangent.w1 < tangent.w2 - policy.eps_member,
        P1_prime=p1_prime,
        C=c_point,
        s1_unbounded=s1 is None,
        s2_unbounded=s2 is None,
    )


# --- polygonal regions -------------------------------------------------------


@dataclass(frozen=True)
class PartitionSet:
    """Weight partitions of [0, 1] for a polygonal region.

    ``Pi1[l-1]..Pi1[l]`` bounds the l-th side-1 interval (the first one is
    closed at 0, the rest are ``(lo, hi]``); ``Pi2`` likewise for side 2.
    """

    j_star: int
    k1_star: int
    k2_star: int
    w1: Tuple[float, ...]
    w2: Tuple[float, ...]
    Pi1: Tuple[float, ...]
    Pi2: Tuple[float, ...]
    C: RatePair

    def as_dict(self) -> Dict[str, object]:
        return {
            "j_star": self.j_star,
            "k1_star": self.k1_star,
            "k2_star": self.k2_star,
            "w1": list(self.w1),
            "w2": list(self.w2),
            "Pi1": list(self.Pi1),
            "Pi2": list(self.Pi2),
            "C": list(self.C.as_tuple()),
        }


def polygon_partitions(
    region: PolygonalRateRegion, caps: SoloCaps, load: LoadSpec
) -> PartitionSet:
    """Segment weights, the indices j*, k1*, k2* and both breakpoint lists."""
    c_point, j_star = intersect_load_ray_polygon(region, load)
    last = region.J - 1
    w1 = tuple(1.0 - caps.cap2 * b for b in region.coef_b)
    w2 = tuple(a * caps.cap1 for a in region.coef_a)

    candidates1 = [j for j in range(j_star, last + 1) if w1[j - 1] >= 0.0]
    k1_star = min(candidates1, key=lambda j: (w1[j - 1], j))
    candidates2 = [j for j in range(1, j_star + 1) if w2[j - 1] <= 1.0]
    k2_star = max(candidates2, key=lambda j: (w2[j - 1], -j))

    pi1 = (0.0, *(w1[j - 1] for j in range(k1_star, last + 1)))
    pi2 = (*(w2[j - 1] for j in range(1, k2_star + 1)), 1.0)
    partitions = PartitionSet(
        j_star=j_star,
        k1_star=k1_star,
        k2_star=k2_star,
        w1=w1,
        w2=w2,
        Pi1=pi1,
        Pi2=pi2,
        C=c_point,
    )
    logger.debug("partitions: %s", partitions)
    return partitions


def _locate(w: float, breakpoints: Sequence[float]) -> int:
    """1-based interval index of ``w``; ties fall to the lower interval."""
    index = int(np.searchsorted(np.asarray(breakpoints[1:]), w, side="left")) + 1
    return min(index, len(breakpoints) - 1)


def side_label(side: int, l: int, partitions: PartitionSet) -> str:
    """Vertex label minimizing side ``side`` on its l-th weight interval."""
    if side == 1:
        if l == partitions.j_star + 1 - partitions.k1_star:
            return "C"
        return f"A{l + partitions.k1_star - 1}"
    if l == partitions.j_star:
        return "C"
    return f"A{l + 1}"


def label_rate(region: PolygonalRateRegion, partitions: PartitionSet, label: str) -> RatePair:
    """Rate pair named by ``"C"`` or ``"A<j>"``."""
    if label == "C":
        return partitions.C
    return region.point(int(label[1:]))


def _interval(breakpoints: Sequence[float], l: int) -> WeightInterval:
    return WeightInterval(breakpoints[l - 1], breakpoints[l], lo_closed=(l == 1))


def polygon_min_weighted(
    region: PolygonalRateRegion,
    caps: SoloCaps,
    load: LoadSpec,
    w: float,
    side: int,
    *,
    partitions: PartitionSet | None = None,
    policy: NumericPolicy | None = None,
) -> SolverResult:
    """Minimizer of the weighted completion time on one side of a polygon CTR."""
    w = _check_weight(w)
    partitions = partitions or polygon_partitions(region, caps, load)
    if side == 1:
        breakpoints = partitions.Pi1
    elif side == 2:
        breakpoints = partitions.Pi2
    else:
        raise DomainError(f"side must be 1 or 2, got {side!r}")
    l = _locate(w, breakpoints)
    label = side_label(side, l, partitions)
    rate = label_rate(region, partitions, label)
    return _result(side, rate, load, w, caps, _interval(breakpoints, l), label, policy=policy)


def polygon_min_weighted_best(
    region: PolygonalRateRegion,
    caps: SoloCaps,
    load: LoadSpec,
    w: float,
    *,
    policy: NumericPolicy | None = None,
) -> Tuple[SolverResult, Tuple[SolverResult, SolverResult]]:
    """Both sides and the better of the two."""
    partitions = polygon_partitions(region, caps, load)
    side1 = polygon_min_weighted(region, caps, load, w, 1, partitions=partitions, policy=policy)
    side2 = polygon_min_weighted(region, caps, load, w, 2, partitions=partitions, policy=policy)
    return pick_best(side1, side2), (side1, side2)


def polygon_solution_sets(
    region: PolygonalRateRegion,
    caps: SoloCaps,
    load: LoadSpec,
    *,
    partitions: PartitionSet | None = None,
) -> Tuple[List[str], List[str]]:
    """Labels minimizing D1 and D2 over all weights, in interval order.

    Empty intervals (equal consecutive breakpoints after the first) carry
    no minimizer.
    """
    partitions = partitions or polygon_partitions(region, caps, load)
    result: List[List[str]] = []
    for side, breakpoints in ((1, partitions.Pi1), (2, partitions.Pi2)):
        labels: List[str] = []
        for l in range(1, len(breakpoints)):
            if l > 1 and not breakpoints[l] > breakpoints[l - 1]:
                continue
            label = side_label(side, l, partitions)
            if label not in labels:
                labels.append(label)
        result.append(labels)
    return result[0], result[1]

