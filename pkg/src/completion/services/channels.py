"""Channel models, interference regimes and rate-region constructors.

Two-user Gaussian broadcast channels (``GBCChannel``) are described by their
gains and a shared power budget; interference channels (``GICChannel``) use
the standard form ``Y1 = X1 + b X2 + Z1``, ``Y2 = a X1 + X2 + Z2`` with unit
noise. Every polygonal rate region goes through ``validate_polygon`` so the
completion-time pipeline can rely on the ordered-face model.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import geometry
from .core import (
    ChannelFileError,
    DomainError,
    LoadSpec,
    NumericPolicy,
    PolygonValidationError,
    RatePair,
    RegimeMismatchError,
    SoloCaps,
    _resolve,
    bisect_increasing,
    gamma,
    inv_gamma,
)
from .geometry import HalfPlane

logger = logging.getLogger(__name__)

RegionPredicate = Callable[[Any, Any], Any]

MAX_ETW_VERTICES = 6
REGION_TAGS = ("exact", "achievable", "outer")


@dataclass(frozen=True)
class GBCChannel:
    """Degraded Gaussian broadcast channel with the stronger user first."""

    h1: float
    h2: float
    P: float

    def __post_init__(self):
        for name in ("h1", "h2", "P"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
            object.__setattr__(self, name, value)
        if self.h1 < self.h2:
            raise DomainError(
                f"h1 ({self.h1}) must be >= h2 ({self.h2}); relabel the users explicitly"
            )

    @property
    def caps(self) -> SoloCaps:
        """(R1*, R2*) = (gamma(h1^2 P), gamma(h2^2 P))."""
        return SoloCaps(gamma(self.h1**2 * self.P), gamma(self.h2**2 * self.P))

    def as_dict(self) -> Dict[str, object]:
        """Serialize in the channel-file layout."""
        return {"type": "gbc", "h1": self.h1, "h2": self.h2, "P": self.P}


@dataclass(frozen=True)
class GICChannel:
    """Gaussian interference channel in standard form."""

    a: float
    b: float
    P1: float
    P2: float

    def __post_init__(self):
        for name in ("a", "b", "P1", "P2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.a < 0 or self.b < 0:
            raise DomainError("cross gains a and b must be non-negative")
        if self.P1 <= 0 or self.P2 <= 0:
            raise DomainError("powers P1 and P2 must be strictly positive")

    @property
    def caps(self) -> SoloCaps:
        """Single-user rates gamma(P1), gamma(P2)."""
        return SoloCaps(gamma(self.P1), gamma(self.P2))

    def swapped(self) -> "GICChannel":
        """Relabel the users: a<->b and P1<->P2."""
        return GICChannel(a=self.b, b=self.a, P1=self.P2, P2=self.P1)

    def as_dict(self) -> Dict[str, object]:
        """Serialize in the channel-file layout."""
        return {"type": "gic", "a": self.a, "b": self.b, "P1": self.P1, "P2": self.P2}


class Regime(str, Enum):
    """Interference regimes of a GIC."""

    VERY_STRONG = "very-strong"
    STRONG = "strong"
    WEAK = "weak"
    MIXED = "mixed"


def classify_gic(ch: GICChannel) -> Regime:
    """Classify the interference regime; boundaries resolve to the stronger class."""
    limit_a = math.sqrt(1.0 + ch.P2)
    limit_b = math.sqrt(1.0 + ch.P1)
    if ch.a >= limit_a and ch.b >= limit_b:
        regime = Regime.VERY_STRONG
    elif 1.0 <= ch.a < limit_a and 1.0 <= ch.b < limit_b:
        regime = Regime.STRONG
    elif ch.a < 1.0 and ch.b < 1.0:
        regime = Regime.WEAK
    else:
        regime = Regime.MIXED
    logger.debug("classified %s as %s", ch, regime.value)
    return regime


def _require_regime(ch: GICChannel, *allowed: Regime) -> Regime:
    regime = classify_gic(ch)
    if regime not in allowed:
        expected = "/".join(item.value for item in allowed)
        raise RegimeMismatchError(f"channel is {regime.value}, expected {expected}")
    return regime


# --- broadcast channel ---------------------------------------------------


def gbc_boundary_point(ch: GBCChannel, P1: float) -> RatePair:
    """Boundary rate pair when user 1 receives power P1 of the budget."""
    P1 = float(P1)
    if not 0.0 <= P1 <= ch.P:
        raise DomainError(f"P1 must lie in [0, {ch.P}], got {P1}")
    r1 = gamma(ch.h1**2 * P1)
    r2 = gamma(ch.h2**2 * ch.P) - gamma(ch.h2**2 * P1)
    return RatePair(r1, max(r2, 0.0))


def gbc_predicate(ch: GBCChannel, policy: NumericPolicy | None = None) -> RegionPredicate:
    """Vectorized membership test for the GBC capacity region."""
    eps = _resolve(policy).eps_member
    caps = ch.caps

    def contains(r1: Any, r2: Any) -> Any:
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        inside = (r1 >= -eps) & (r2 >= -eps) & (r1 <= caps.cap1 + eps)
        p1_min = np.minimum(inv_gamma(np.clip(r1, 0.0, caps.cap1)) / ch.h1**2, ch.P)
        bound = caps.cap2 - gamma(ch.h2**2 * p1_min)
        inside &= r2 <= bound + eps
        return inside if inside.ndim else bool(inside)

    return contains


def gbc_region_contains(
    ch: GBCChannel, r: RatePair, *, policy: NumericPolicy | None = None
) -> bool:
    """True iff some power split P1 supports the rate pair r."""
    return bool(gbc_predicate(ch, policy)(r.r1, r.r2))


def intersect_load_ray_gbc(
    ch: GBCChannel, load: LoadSpec, *, policy: NumericPolicy | None = None
) -> Tuple[RatePair, float]:
    """Boundary point on the load ray and the power split P1' generating it."""
    cap2 = ch.caps.cap2

    def balance(p1: float) -> float:
        return gamma(ch.h1**2 * p1) * load.tau2 - (cap2 - gamma(ch.h2**2 * p1)) * load.tau1

    p1_prime = bisect_increasing(balance, 0.0, ch.P, policy=policy)
    return gbc_boundary_point(ch, p1_prime), p1_prime


# --- polygonal regions ---------------------------------------------------


@dataclass(frozen=True)
class PolygonalRateRegion:
    """Convex rate region given by its dominant face A_1..A_J.

    Segment j (1-based) is the line ``a_j r1 + b_j r2 = 1`` through A_j and
    A_{j+1}; the region is the first-quadrant part below every segment line.
    """

    points: Tuple[Tuple[float, float], ...]
    coef_a: Tuple[float, ...]
    coef_b: Tuple[float, ...]
    tag: str = "achievable"
    eps: float = field(default=1e-9, compare=False)

    @property
    def J(self) -> int:
        """Number of extreme points."""
        return len(self.points)

    def point(self, j: int) -> RatePair:
        """Extreme point A_j, 1-based."""
        return RatePair(*self.points[j - 1])

    def segment(self, j: int) -> Tuple[float, float]:
        """Coefficients (a_j, b_j) of segment j, 1-based."""
        return (self.coef_a[j - 1], self.coef_b[j - 1])

    def halfplanes(self) -> List[HalfPlane]:
        """Segment constraints as half-planes."""
        return [
            HalfPlane(a, b, 1.0, label=f"segment {index}")
            for index, (a, b) in enumerate(zip(self.coef_a, self.coef_b), start=1)
        ]

    def contains(self, r1: Any, r2: Any) -> Any:
        """Vectorized membership with the region's slack."""
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        inside = (r1 >= -self.eps) & (r2 >= -self.eps)
        for a, b in zip(self.coef_a, self.coef_b):
            inside &= a * r1 + b * r2 <= 1.0 + self.eps
        return inside if inside.ndim else bool(inside)

    def max_coordinates(self) -> Tuple[float, float]:
        """Largest r1 and r2 over the extreme points."""
        return (
            max(point[0] for point in self.points),
            max(point[1] for point in self.points),
        )

    def swapped(self) -> "PolygonalRateRegion":
        """The same region with users relabeled."""
        points = [(r2, r1) for r1, r2 in reversed(self.points)]
        policy = NumericPolicy(eps_member=self.eps, eps_root=min(1e-12, self.eps / 10))
        return validate_polygon(points, tag=self.tag, policy=policy)

    def as_dict(self) -> Dict[str, object]:
        """Serialize points and segment coefficients."""
        return {
            "tag": self.tag,
            "points": [list(point) for point in self.points],
            "a": list(self.coef_a),
            "b": list(self.coef_b),
        }


def validate_polygon(
    points: Sequence[Sequence[float]],
    *,
    tag: str = "achievable",
    policy: NumericPolicy | None = None,
) -> PolygonalRateRegion:
    """Check the ordered-face model and compute normalized segment coefficients."""
    eps = _resolve(policy).eps_member
    if tag not in REGION_TAGS:
        raise DomainError(f"unknown region tag {tag!r}")
    if len(points) < 2:
        raise PolygonValidationError("a polygon needs at least two extreme points")
    try:
        chain = [(float(p[0]), float(p[1])) for p in points]
    except (TypeError, ValueError, IndexError) as exc:
        raise PolygonValidationError(f"malformed point list: {exc}") from exc
    for index, (r1, r2) in enumerate(chain, start=1):
        if not (math.isfinite(r1) and math.isfinite(r2)) or r1 < -eps or r2 < -eps:
            raise PolygonValidationError(f"point {index} ({r1}, {r2}) is not a valid rate pair")
    chain = [(max(r1, 0.0), max(r2, 0.0)) for r1, r2 in chain]
    if chain[0][0] > eps:
        raise PolygonValidationError("first point must lie on the r2 axis", segment=1)
    if chain[-1][1] > eps:
        raise PolygonValidationError("last point must lie on the r1 axis", segment=len(chain) - 1)
    chain[0] = (0.0, chain[0][1])
    chain[-1] = (chain[-1][0], 0.0)

    for index in range(1, len(chain) - 1):
        prev, here, nxt = chain[index - 1], chain[index], chain[index + 1]
        turn = geometry.cross(
            (here[0] - prev[0], here[1] - prev[1]),
            (nxt[0] - here[0], nxt[1] - here[1]),
        )
        if turn > eps:
            logger.warning("polygon rejected: non-convex turn %.3g at point %d", turn, index + 1)
            raise PolygonValidationError(
                f"non-convex at point {index + 1}", segment=index + 1
            )

    coef_a: List[float] = []
    coef_b: List[float] = []
    for index in range(len(chain) - 1):
        (x1, y1), (x2, y2) = chain[index], chain[index + 1]
        if x2 < x1 - eps:
            raise PolygonValidationError("r1 decreases along the face", segment=index + 1)
        matrix = np.array([[x1, y1], [x2, y2]])
        if abs(float(np.linalg.det(matrix))) <= eps * eps:
            raise PolygonValidationError(
                "segment is degenerate or its line passes through the origin",
                segment=index + 1,
            )
        a, b = np.linalg.solve(matrix, np.ones(2))
        coef_a.append(float(a))
        coef_b.append(float(b))

    last = len(coef_a)
    if abs(coef_a[0]) > eps:
        raise PolygonValidationError("first segment is not horizontal", segment=1)
    if abs(coef_b[-1]) > eps:
        raise PolygonValidationError("last segment is not vertical", segment=last)
    coef_a[0] = 0.0
    coef_b[-1] = 0.0
    for index in range(1, last):
        if not coef_a[index] > coef_a[index - 1]:
            raise PolygonValidationError("coefficients a_j must increase", segment=index + 1)
        if not coef_b[index] < coef_b[index - 1]:
            raise PolygonValidationError("coefficients b_j must decrease", segment=index + 1)
    for index, (r1, r2) in enumerate(chain, start=1):
        if any(a * r1 + b * r2 > 1.0 + eps for a, b in zip(coef_a, coef_b)):
            raise PolygonValidationError(f"point {index} lies outside a segment line")

    return PolygonalRateRegion(
        points=tuple(chain),
        coef_a=tuple(coef_a),
        coef_b=tuple(coef_b),
        tag=tag,
        eps=eps,
    )


def strong_ic_polygon(
    ch: GICChannel, *, policy: NumericPolicy | None = None
) -> PolygonalRateRegion:
    """Compound-MAC pentagon, the capacity region of a strong-interference GIC."""
    _require_regime(ch, Regime.STRONG)
    caps = ch.caps
    r_sum = min(gamma(ch.P1 + ch.b**2 * ch.P2), gamma(ch.a**2 * ch.P1 + ch.P2))
    if not r_sum < caps.cap1 + caps.cap2:
        raise PolygonValidationError("sum-rate constraint is inactive for a strong channel")
    points = [
        (0.0, caps.cap2),
        (r_sum - caps.cap2, caps.cap2),
        (caps.cap1, r_sum - caps.cap1),
        (caps.cap1, 0.0),
    ]
    return validate_polygon(points, tag="exact", policy=policy)


def very_strong_rectangle(
    ch: GICChannel, *, policy: NumericPolicy | None = None
) -> PolygonalRateRegion:
    """Capacity region of a very-strong GIC: interference is decoded for free."""
    _require_regime(ch, Regime.VERY_STRONG)
    cap1, cap2 = ch.caps.as_tuple()
    return validate_polygon([(0.0, cap2), (cap1, cap2), (cap1, 0.0)], tag="exact", policy=policy)


def intersect_load_ray_polygon(
    region: PolygonalRateRegion, load: LoadSpec
) -> Tuple[RatePair, int]:
    """Boundary point C on the load ray and its segment index j* (1-based).

    On a vertex the smaller adjacent index is returned.
    """
    slope = load.ratio
    reach = [1.0 / (a + b * slope) for a, b in zip(region.coef_a, region.coef_b)]
    t_min = min(reach)
    j_star = next(j for j, t in enumerate(reach, start=1) if t <= t_min + region.eps)
    return RatePair(t_min, slope * t_min), j_star


# --- weak and mixed interference: Han-Kobayashi evaluation ----------------


@dataclass(frozen=True)
class HKTerms:
    """Mutual-information terms of the fixed-split Gaussian HK scheme.

    For receiver i: ``A`` is I(Xi;Yi|Uj), ``B`` is I(Xi,Uj;Yi), ``C`` is
    I(Xi;Yi|Ui,Uj) and ``E`` is I(Xi,Uj;Yi|Ui).
    """

    private1: float
    private2: float
    A1: float
    B1: float
    C1: float
    E1: float
    A2: float
    B2: float
    C2: float
    E2: float


def _private_power(power: float, cross_gain: float) -> float:
    if cross_gain >= 1.0:
        return 0.0
    if cross_gain == 0.0:
        return power
    return min(power, 1.0 / cross_gain**2)


def hk_terms(ch: GICChannel) -> HKTerms:
    """Evaluate the HK terms with private interference at the noise level."""
    p1p = _private_power(ch.P1, ch.a)
    p2p = _private_power(ch.P2, ch.b)
    noise1 = 1.0 + ch.b**2 * p2p
    noise2 = 1.0 + ch.a**2 * p1p
    return HKTerms(
        private1=p1p,
        private2=p2p,
        A1=gamma(ch.P1 / noise1),
        B1=gamma((ch.P1 + ch.b**2 * (ch.P2 - p2p)) / noise1),
        C1=gamma(p1p / noise1),
        E1=gamma((p1p + ch.b**2 * (ch.P2 - p2p)) / noise1),
        A2=gamma(ch.P2 / noise2),
        B2=gamma((ch.P2 + ch.a**2 * (ch.P1 - p1p)) / noise2),
        C2=gamma(p2p / noise2),
        E2=gamma((p2p + ch.a**2 * (ch.P1 - p1p)) / noise2),
    )


def etw_constraints(ch: GICChannel, kind: str = "achievable") -> List[HalfPlane]:
    """Inequality list of the HK achievable region or the genie-aided outer bound."""
    _require_regime(ch, Regime.WEAK, Regime.MIXED)
    if kind == "achievable":
        t = hk_terms(ch)
        return [
            HalfPlane(1.0, 0.0, t.A1, label="R1"),
            HalfPlane(0.0, 1.0, t.A2, label="R2"),
            HalfPlane(1.0, 1.0, t.B1 + t.C2, label="R1+R2 (a)"),
            HalfPlane(1.0, 1.0, t.B2 + t.C1, label="R1+R2 (b)"),
            HalfPlane(1.0, 1.0, t.E1 + t.E2, label="R1+R2 (c)"),
            HalfPlane(2.0, 1.0, t.B1 + t.C1 + t.E2, label="2R1+R2"),
            HalfPlane(1.0, 2.0, t.B2 + t.C2 + t.E1, label="R1+2R2"),
        ]
    if kind == "outer":
        inr1 = ch.b**2 * ch.P2
        inr2 = ch.a**2 * ch.P1
        snr1, snr2 = ch.P1, ch.P2
        return [
            HalfPlane(1.0, 0.0, gamma(snr1), label="R1"),
            HalfPlane(0.0, 1.0, gamma(snr2), label="R2"),
            HalfPlane(1.0, 1.0, gamma(snr1) + gamma(snr2 / (1.0 + inr2)), label="R1+R2 (a)"),
            HalfPlane(1.0, 1.0, gamma(snr2) + gamma(snr1 / (1.0 + inr1)), label="R1+R2 (b)"),
            HalfPlane(
                1.0,
                1.0,
                gamma(inr1 + snr1 / (1.0 + inr2)) + gamma(inr2 + snr2 / (1.0 + inr1)),
                label="R1+R2 (c)",
            ),
            HalfPlane(
                2.0,
                1.0,
                gamma(snr1 + inr1)
                + gamma(snr1 / (1.0 + inr2))
                + gamma(inr2 + snr2 / (1.0 + inr1)),
                label="2R1+R2",
            ),
            HalfPlane(
                1.0,
                2.0,
                gamma(snr2 + inr2)
                + gamma(snr2 / (1.0 + inr1))
                + gamma(inr1 + snr1 / (1.0 + inr2)),
                label="R1+2R2",
            ),
        ]
    raise DomainError(f"region kind must be 'achievable' or 'outer', got {kind!r}")


def _square_off(
    chain: Sequence[geometry.Point], kind: str, eps: float
) -> List[geometry.Point]:
    """Make the first face horizontal and the last one vertical.

    A slanted axis face appears when a sum or weighted-sum bound binds on an
    axis. Achievable regions are clipped inwards (the result stays
    achievable) and outer bounds are extended outwards (the result stays an
    outer bound).
    """
    points = [(float(p[0]), float(p[1])) for p in chain]
    if len(points) < 2:
        return points
    first_slanted = abs(points[0][1] - points[1][1]) > eps
    last_slanted = abs(points[-1][0] - points[-2][0]) > eps
    if not (first_slanted or last_slanted):
        return points

    if kind == "achievable":
        if len(points) == 2:
            (x0, y0), (x1, y1) = points
            middle = (0.5 * (x0 + x1), 0.5 * (y0 + y1))
            points = [(0.0, middle[1]), middle, (middle[0], 0.0)]
        else:
            if first_slanted:
                points[0] = (0.0, points[1][1])
            if last_slanted:
                points[-1] = (points[-2][0], 0.0)
    else:
        if first_slanted:
            top = points[0][1]
            if len(points) == 2:
                points.insert(1, (points[1][0], top))
            else:
                (x1, y1), (x2, y2) = points[1], points[2]
                t = (top - y1) / (y2 - y1)
                points[1] = (x1 + t * (x2 - x1), top)
        if abs(points[-1][0] - points[-2][0]) > eps:
            right = points[-1][0]
            (x1, y1), (x2, y2) = points[-3], points[-2]
            t = (right - x2) / (x2 - x1)
            points[-2] = (right, y2 + t * (y2 - y1))
    logger.info("squared off a slanted axis face of the %s polygon: %s", kind, points)
    return points


def etw_polygon(
    ch: GICChannel, kind: str = "achievable", *, policy: NumericPolicy | None = None
) -> PolygonalRateRegion:
    """Dominant face of the weak/mixed region as a validated polygon."""
    policy = _resolve(policy)
    constraints = etw_constraints(ch, kind)
    chain = geometry.dominant_face(constraints, policy.eps_member)
    chain = _square_off(chain, kind, policy.eps_member)
    region = validate_polygon(chain, tag=kind, policy=policy)
    if region.J > MAX_ETW_VERTICES:
        raise PolygonValidationError(
            f"{region.J} extreme points exceed the bound of {MAX_ETW_VERTICES}"
        )
    logger.debug("%s polygon for %s: %s", kind, ch, region.points)
    return region


# --- file I/O --------------------------------------------------------------


def _number(payload: Dict[str, Any], key: str) -> float:
    if key not in payload:
        raise ChannelFileError(f"missing field {key!r}")
    value = payload[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChannelFileError(f"field {key!r} must be a number, got {value!r}")
    return float(value)


def channel_from_dict(
    payload: Dict[str, Any], *, swap_users: bool = False
) -> GBCChannel | GICChannel:
    """Build a channel from its JSON mapping, optionally relabeling users."""
    if not isinstance(payload, dict):
        raise ChannelFileError("channel file must contain a JSON object")
    kind = payload.get("type")
    try:
        if kind == "gbc":
            h1, h2 = _number(payload, "h1"), _number(payload, "h2")
            if swap_users:
                h1, h2 = h2, h1
            return GBCChannel(h1=h1, h2=h2, P=_number(payload, "P"))
        if kind == "gic":
            channel = GICChannel(
                a=_number(payload, "a"),
                b=_number(payload, "b"),
                P1=_number(payload, "P1"),
                P2=_number(payload, "P2"),
            )
            return channel.swapped() if swap_users else channel
    except DomainError as exc:
        raise ChannelFileError(str(exc)) from exc
    raise ChannelFileError(f"channel type must be 'gbc' or 'gic', got {kind!r}")


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ChannelFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelFileError(f"{path} is not valid JSON: {exc}") from exc


def load_channel_file(path: str | Path, *, swap_users: bool = False) -> GBCChannel | GICChannel:
    """Read and validate a channel file."""
    return channel_from_dict(_read_json(path), swap_users=swap_users)


def load_polygon_file(
    path: str | Path,
    *,
    tag: str = "achievable",
    swap_users: bool = False,
    policy: NumericPolicy | None = None,
) -> PolygonalRateRegion:
    """Read ``{"points": [[r1, r2], ...]}`` and validate it."""
    payload = _read_json(path)
    points = payload.get("points") if isinstance(payload, dict) else None
    if not isinstance(points, list):
        raise ChannelFileError(f"{path} must contain a 'points' list")
    region = validate_polygon(points, tag=tag, policy=policy)
    return region.swapped() if swap_users else region


def save_polygon_file(path: str | Path, region: PolygonalRateRegion) -> None:
    """Write a polygon in the file layout read by ``load_polygon_file``."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"points": [list(point) for point in region.points]}, handle, indent=2)
        handle.write("\n")
