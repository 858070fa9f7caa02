"""Completion-time regions (CTRs) and their constructors.

A CTR is the union of two convex sub-regions: side 1 holds the pairs with
d1 <= d2 and side 2 those with d1 >= d2. Both share the 45-degree ray from
C-bar, the image of the load-ray boundary point. Vertices of a sub-region
follow its lower-left boundary from the vertical ray to the horizontal one.
That order is not monotone in d1 or d2 in general.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from . import optimize
from .channels import (
    GBCChannel,
    GICChannel,
    PolygonalRateRegion,
    Regime,
    _require_regime,
    gbc_boundary_point,
    intersect_load_ray_gbc,
    strong_ic_polygon,
    very_strong_rectangle,
)
from .core import (
    CompletionTimePair,
    DomainError,
    LoadSpec,
    NumericPolicy,
    SoloCaps,
    _resolve,
    gamma,
    inv_gamma,
)
from .ctmap import map_side1, map_side2
from .geometry import HalfPlane, feasible_vertices, satisfies_all

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

UP = (0.0, 1.0)
RIGHT = (1.0, 0.0)
DIAGONAL = (1.0, 1.0)


@dataclass(frozen=True)
class Ray:
    """Open ray ``origin + t * direction`` for t >= 0."""

    origin: Point
    direction: Point

    def mirrored(self) -> "Ray":
        """The ray with d1 and d2 exchanged."""
        return Ray(self.origin[::-1], self.direction[::-1])

    def as_dict(self) -> Dict[str, object]:
        return {"origin": list(self.origin), "direction": list(self.direction)}


@dataclass(frozen=True)
class GBCArc:
    """Lower-left boundary of a GBC sub-region, parametrized by the power P1."""

    channel: GBCChannel
    load: LoadSpec
    side: int
    p_lo: float
    p_hi: float
    swap: bool = False

    def point(self, p1: float) -> Point:
        """Image of the boundary rate pair generated by ``p1``."""
        caps = self.channel.caps
        rate = gbc_boundary_point(self.channel, p1)
        if self.side == 1:
            point = map_side1(rate, self.load, caps.cap2).as_tuple()
        else:
            point = map_side2(rate, self.load, caps.cap1).as_tuple()
        return (point[1], point[0]) if self.swap else point

    def sample(self, fractions: Sequence[float]) -> List[Point]:
        """Points at the given fractions of the arc, in boundary order."""
        span = self.p_hi - self.p_lo
        if self.swap:
            fractions = [1.0 - t for t in fractions]
        return [self.point(self.p_hi - t * span) for t in fractions]

    def contains(self, d1: Any, d2: Any, eps: float) -> Any:
        """Vectorized membership in the sub-region bounded by this arc."""
        ch, load = self.channel, self.load
        cap1, cap2 = ch.caps.as_tuple()
        d1 = np.asarray(d1, dtype=float)
        d2 = np.asarray(d2, dtype=float)
        if self.swap:
            d1, d2 = d2, d1
        if self.side == 1:
            need = load.tau1 / d1
            inside = (d1 <= d2 + eps) & (need <= cap1 + eps)
            p1 = inv_gamma(np.clip(need, 0.0, cap1)) / ch.h1**2
            p1 = np.clip(p1, self.p_lo, self.p_hi)
            r1 = gamma(ch.h1**2 * p1)
            r2 = cap2 - gamma(ch.h2**2 * p1)
            x = load.tau1 / r1
            y = load.tau2 / cap2 + (cap2 - r2) * load.tau1 / (cap2 * r1)
        else:
            need = load.tau2 / d2
            inside = (d1 >= d2 - eps) & (need <= cap2 + eps)
            p1 = inv_gamma(np.clip(cap2 - need, 0.0, cap2)) / ch.h2**2
            p1 = np.clip(p1, self.p_lo, self.p_hi)
            r1 = gamma(ch.h1**2 * p1)
            r2 = cap2 - gamma(ch.h2**2 * p1)
            y = load.tau2 / r2
            x = load.tau1 / cap1 + (cap1 - r1) * load.tau2 / (cap1 * r2)
        inside &= (d1 >= x - eps) & (d2 >= y - eps)
        return inside

    def as_dict(self) -> Dict[str, object]:
        return {"parameter": "P1", "interval": [self.p_lo, self.p_hi]}


@dataclass(frozen=True)
class ConvexCTSubregion:
    """One convex half of a CTR."""

    side: int
    vertices: Tuple[Point, ...]
    rays: Tuple[Ray, Ray]
    labels: Tuple[str, ...] = ()
    arc: GBCArc | None = None
    eps: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        if self.side not in (1, 2):
            raise DomainError(f"side must be 1 or 2, got {self.side!r}")
        if not self.vertices:
            raise DomainError("a sub-region needs at least one vertex")

    @property
    def c_bar(self) -> Point:
        """Base of the shared 45-degree ray."""
        return self.vertices[-1] if self.side == 1 else self.vertices[0]

    def edges(self) -> List[Tuple[Point, Point]]:
        """Directed boundary lines (point, unit direction), region on the left."""
        entry, exit_ = self.rays
        lines = [(entry.origin, (-entry.direction[0], -entry.direction[1]))]
        for start, end in zip(self.vertices, self.vertices[1:]):
            delta = (end[0] - start[0], end[1] - start[1])
            if math.hypot(*delta) > 0:
                lines.append((start, delta))
        lines.append((exit_.origin, exit_.direction))
        return [(point, _unit(direction)) for point, direction in lines]

    def contains(self, d1: Any, d2: Any) -> Any:
        """Vectorized membership with the sub-region's slack."""
        d1 = np.asarray(d1, dtype=float)
        d2 = np.asarray(d2, dtype=float)
        if self.arc is not None:
            inside = self.arc.contains(d1, d2, self.eps)
        else:
            inside = np.ones(np.broadcast(d1, d2).shape, dtype=bool)
            for (px, py), (vx, vy) in self.edges():
                inside &= vx * (d2 - py) - vy * (d1 - px) >= -self.eps
        return inside if inside.ndim else bool(inside)

    def pieces(self) -> List[Tuple[Point, Point, Any]]:
        """Finite boundary pieces as (start, end, sampler over fractions)."""
        if self.arc is not None:
            arc = self.arc
            return [(self.vertices[0], self.vertices[-1], arc.sample)]
        result = []
        for start, end in zip(self.vertices, self.vertices[1:]):
            result.append((start, end, _segment_sampler(start, end)))
        return result

    def mirrored(self) -> "ConvexCTSubregion":
        """The sub-region seen with users relabeled; it moves to the other side."""
        entry, exit_ = self.rays
        return ConvexCTSubregion(
            side=3 - self.side,
            vertices=tuple(vertex[::-1] for vertex in reversed(self.vertices)),
            rays=(exit_.mirrored(), entry.mirrored()),
            labels=tuple(reversed(self.labels)),
            arc=replace(self.arc, swap=not self.arc.swap) if self.arc else None,
            eps=self.eps,
        )

    def as_dict(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "side": self.side,
            "vertices": [list(vertex) for vertex in self.vertices],
            "labels": list(self.labels),
            "rays": [ray.as_dict() for ray in self.rays],
        }
        if self.arc is not None:
            payload["arc"] = self.arc.as_dict()
        return payload


def _unit(direction: Point) -> Point:
    norm = math.hypot(*direction)
    return (direction[0] / norm, direction[1] / norm)


def _segment_sampler(start: Point, end: Point):
    def sample(fractions: Sequence[float]) -> List[Point]:
        return [
            (start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1]))
            for t in fractions
        ]

    return sample


@dataclass(frozen=True)
class CTRegion:
    """Completion-time region: the union of two convex sub-regions."""

    sub1: ConvexCTSubregion
    sub2: ConvexCTSubregion
    tag: str
    load: LoadSpec
    caps: SoloCaps
    details: Dict[str, object] = field(default_factory=dict, compare=False)

    @property
    def c_bar(self) -> Point:
        """Equal-completion-time corner shared by both sub-regions."""
        return self.sub1.c_bar

    def contains(self, d1: Any, d2: Any) -> Any:
        """Vectorized membership."""
        inside = np.asarray(self.sub1.contains(d1, d2)) | np.asarray(self.sub2.contains(d1, d2))
        return inside if inside.ndim else bool(inside)

    def corner_points(self) -> List[Point]:
        """All vertices of both sub-regions in boundary order."""
        points: List[Point] = []
        for point in (*self.sub1.vertices, *self.sub2.vertices):
            if points and math.dist(point, points[-1]) <= self.sub1.eps:
                continue
            points.append(point)
        return points

    def mirrored(self) -> "CTRegion":
        """The same region with users 1 and 2 relabeled."""
        return CTRegion(
            sub1=self.sub2.mirrored(),
            sub2=self.sub1.mirrored(),
            tag=self.tag,
            load=self.load.swapped(),
            caps=SoloCaps(self.caps.cap2, self.caps.cap1),
            details={**self.details, "users_swapped": True},
        )

    def as_dict(self) -> Dict[str, object]:
        return {
            "tag": self.tag,
            "load": list(self.load.as_tuple()),
            "caps": list(self.caps.as_tuple()),
            "c_bar": list(self.c_bar),
            "sub1": self.sub1.as_dict(),
            "sub2": self.sub2.as_dict(),
            **({"details": self.details} if self.details else {}),
        }


def _dedupe_sorted(points: Sequence[Point], eps: float) -> List[Point]:
    ordered = sorted(points, key=lambda p: (p[0], -p[1]))
    unique: List[Point] = []
    for point in ordered:
        if unique and abs(point[0] - unique[-1][0]) <= eps and abs(point[1] - unique[-1][1]) <= eps:
            continue
        unique.append(point)
    return unique


# --- constructors ------------------------------------------------------------


def gbc_ctr(
    ch: GBCChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> CTRegion:
    """Exact CTR of a Gaussian broadcast channel."""
    policy = _resolve(policy)
    caps = ch.caps
    c_point, p1_prime = intersect_load_ray_gbc(ch, load, policy=policy)
    c_bar = map_side1(c_point, load, caps.cap2, policy=policy).as_tuple()
    b_bar = map_side1(gbc_boundary_point(ch, ch.P), load, caps.cap2, policy=policy).as_tuple()
    a_bar = map_side2(gbc_boundary_point(ch, 0.0), load, caps.cap1, policy=policy).as_tuple()
    sub1 = ConvexCTSubregion(
        side=1,
        vertices=(b_bar, c_bar),
        labels=("B", "C"),
        rays=(Ray(b_bar, UP), Ray(c_bar, DIAGONAL)),
        arc=GBCArc(ch, load, side=1, p_lo=p1_prime, p_hi=ch.P),
        eps=policy.eps_member,
    )
    sub2 = ConvexCTSubregion(
        side=2,
        vertices=(c_bar, a_bar),
        labels=("C", "A"),
        rays=(Ray(c_bar, DIAGONAL), Ray(a_bar, RIGHT)),
        arc=GBCArc(ch, load, side=2, p_lo=0.0, p_hi=p1_prime),
        eps=policy.eps_member,
    )
    logger.debug("gbc ctr for %s, load %s: P1'=%.12g, C-bar=%s", ch, load, p1_prime, c_bar)
    return CTRegion(
        sub1=sub1,
        sub2=sub2,
        tag="exact",
        load=load,
        caps=caps,
        details={"P1_prime": p1_prime, "C": list(c_point.as_tuple())},
    )


def polygon_ctr(
    region: PolygonalRateRegion,
    caps: SoloCaps,
    load: LoadSpec,
    *,
    policy: NumericPolicy | None = None,
) -> CTRegion:
    """CTR of a polygonal rate region via the weight-partition solution sets."""
    policy = _resolve(policy)
    eps = policy.eps_member
    max_r1, max_r2 = region.max_coordinates()
    if max_r1 > caps.cap1 + eps or max_r2 > caps.cap2 + eps:
        raise DomainError(
            f"solo caps {caps.as_tuple()} are below the region's extent ({max_r1}, {max_r2})"
        )
    partitions = optimize.polygon_partitions(region, caps, load)
    side1_labels, side2_labels = optimize.polygon_solution_sets(
        region, caps, load, partitions=partitions
    )
    c_bar = map_side1(partitions.C, load, caps.cap2, policy=policy).as_tuple()

    def chain_position(label: str) -> float:
        # C sits on segment j*, between A_{j*} and A_{j*+1}.
        return partitions.j_star + 0.5 if label == "C" else float(label[1:])

    def assemble(side: int, labels: Sequence[str]) -> ConvexCTSubregion:
        # Walk the rate boundary from the r1 axis toward the r2 axis: side 1
        # ends at C-bar, side 2 starts there.
        chain = sorted({"C", *labels}, key=chain_position, reverse=True)
        vertices: List[Point] = []
        names: List[str] = []
        for name in chain:
            if name == "C":
                point = c_bar
            else:
                rate = optimize.label_rate(region, partitions, name)
                if side == 1:
                    point = map_side1(rate, load, caps.cap2, policy=policy).as_tuple()
                else:
                    point = map_side2(rate, load, caps.cap1, policy=policy).as_tuple()
            if vertices and math.dist(point, vertices[-1]) <= eps:
                if name == "C":
                    vertices[-1], names[-1] = point, name
                continue
            vertices.append(point)
            names.append(name)
        if side == 1:
            rays = (Ray(vertices[0], UP), Ray(c_bar, DIAGONAL))
        else:
            rays = (Ray(c_bar, DIAGONAL), Ray(vertices[-1], RIGHT))
        return ConvexCTSubregion(
            side=side, vertices=tuple(vertices), labels=tuple(names), rays=rays, eps=eps
        )

    ctr = CTRegion(
        sub1=assemble(1, side1_labels),
        sub2=assemble(2, side2_labels),
        tag=region.tag,
        load=load,
        caps=caps,
        details={
            "partitions": partitions.as_dict(),
            "solution_sets": {"side1": list(side1_labels), "side2": list(side2_labels)},
        },
    )
    logger.debug("polygon ctr: sub1 %s, sub2 %s", ctr.sub1.labels, ctr.sub2.labels)
    return ctr


def very_strong_ctr(
    ch: GICChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> CTRegion:
    """Product region {d1 >= tau1/gamma(P1)} x {d2 >= tau2/gamma(P2)}."""
    return polygon_ctr(very_strong_rectangle(ch, policy=policy), ch.caps, load, policy=policy)


def strong_ctr(
    ch: GICChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> CTRegion:
    """Exact strong-regime CTR built from the compound-MAC pentagon."""
    return polygon_ctr(strong_ic_polygon(ch, policy=policy), ch.caps, load, policy=policy)


@dataclass(frozen=True)
class ClosedFormCTR:
    """Literal inequality list of the strong-regime case analysis."""

    case: int
    thresholds: Tuple[float, float]
    constraints: Tuple[HalfPlane, ...]
    r_sum: float
    eps: float = field(default=1e-9, compare=False)

    def contains(self, d1: Any, d2: Any) -> Any:
        """Conjunction of every listed constraint."""
        return satisfies_all(self.constraints, d1, d2, self.eps)

    def corner_points(self) -> List[Point]:
        """Feasible intersections of the constraint lines."""
        return _dedupe_sorted(feasible_vertices(self.constraints, self.eps), self.eps)

    def as_dict(self) -> Dict[str, object]:
        return {
            "case": self.case,
            "thresholds": list(self.thresholds),
            "r_sum": self.r_sum,
            "constraints": [constraint.as_dict() for constraint in self.constraints],
            "corners": [list(point) for point in self.corner_points()],
        }


def strong_ctr_closed_form(
    ch: GICChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> ClosedFormCTR:
    """Case split on tau2/tau1 with the inequality set of each case.

    Kept for comparison against the constrained-membership oracle: in the
    middle case the listed conjunction rejects pairs the oracle accepts.
    """
    policy = _resolve(policy)
    _require_regime(ch, Regime.STRONG)
    g1, g2 = ch.caps.as_tuple()
    r_sum = min(gamma(ch.P1 + ch.b**2 * ch.P2), gamma(ch.a**2 * ch.P1 + ch.P2))
    low = (r_sum - g1) / g1
    high = g2 / (r_sum - g2)
    total = load.tau1 + load.tau2
    constraints = [
        HalfPlane(g1, 0.0, load.tau1, sense=">=", label="user 1 solo"),
        HalfPlane(0.0, g2, load.tau2, sense=">=", label="user 2 solo"),
    ]
    sum_first = HalfPlane(g1, r_sum - g1, total, sense=">=", label="sum, user 1 first")
    sum_second = HalfPlane(r_sum - g2, g2, total, sense=">=", label="sum, user 2 first")
    ratio = load.ratio
    if ratio <= low:
        case = 1
        constraints.append(sum_first)
    elif ratio < high:
        case = 2
        constraints.extend([sum_second, sum_first])
    else:
        case = 3
        constraints.append(sum_second)
    return ClosedFormCTR(
        case=case,
        thresholds=(low, high),
        constraints=tuple(constraints),
        r_sum=r_sum,
        eps=policy.eps_member,
    )


# --- queries -------------------------------------------------------------------


def ctr_contains(ctr: CTRegion, d: CompletionTimePair) -> bool:
    """True iff d lies in either sub-region."""
    return bool(ctr.contains(d.d1, d.d2))


@dataclass(frozen=True)
class BoundaryPoint:
    """Sample of a CTR boundary; ``marker`` tags ray origins and vertices."""

    d1: float
    d2: float
    marker: str = ""

    def as_tuple(self) -> Point:
        return (self.d1, self.d2)


def ctr_boundary(ctr: CTRegion, n: int) -> List[BoundaryPoint]:
    """At least ``n`` points along the lower-left boundary, in boundary order.

    The walk starts at the base of the vertical ray and ends at the base of
    the horizontal ray, passing every vertex; the first point carries the
    ``ray:up`` marker and the last the ``ray:right`` marker. A boundary with
    a single corner repeats it so both ray markers are present.
    """
    if n < 2:
        raise DomainError(f"boundary sampling needs n >= 2, got {n}")
    eps = ctr.sub1.eps
    vertices = ctr.corner_points()
    pieces = [*ctr.sub1.pieces(), *ctr.sub2.pieces()]
    pieces = [piece for piece in pieces if math.dist(piece[0], piece[1]) > eps]
    extra = max(n - len(vertices), 0)
    shares = np.zeros(len(pieces), dtype=int)
    if pieces and extra:
        lengths = np.array([math.dist(start, end) for start, end, _ in pieces])
        shares = np.floor(extra * lengths / lengths.sum()).astype(int)
        for index in np.argsort(-lengths, kind="stable")[: extra - int(shares.sum())]:
            shares[index] += 1

    points: List[BoundaryPoint] = [BoundaryPoint(*vertices[0], "vertex")]
    for (_, end, sampler), count in zip(pieces, shares):
        if count:
            fractions = [(k + 1) / (count + 1) for k in range(count)]
            points.extend(BoundaryPoint(*p, "sample") for p in sampler(fractions))
        points.append(BoundaryPoint(*end, "vertex"))
    while len(points) < n:
        points.append(BoundaryPoint(points[-1].d1, points[-1].d2, points[-1].marker))
    points[0] = BoundaryPoint(points[0].d1, points[0].d2, "ray:up")
    points[-1] = BoundaryPoint(points[-1].d1, points[-1].d2, "ray:right")
    return points
