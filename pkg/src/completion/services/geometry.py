"""Two-dimensional half-plane helpers used by the polygon pipeline."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, List, Sequence, Tuple

import numpy as np

Point = Tuple[float, float]


@dataclass(frozen=True)
class HalfPlane:
    """The constraint ``c1*x + c2*y <= rhs`` (or ``>=`` when sense is ``">="``)."""

    c1: float
    c2: float
    rhs: float
    sense: str = "<="
    label: str = ""

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ValueError(f"Unknown half-plane sense {self.sense!r}")

    def slack(self, x: Any, y: Any) -> Any:
        """Signed distance-like slack; non-negative means satisfied."""
        value = self.c1 * np.asarray(x, dtype=float) + self.c2 * np.asarray(y, dtype=float)
        return self.rhs - value if self.sense == "<=" else value - self.rhs

    def contains(self, x: Any, y: Any, eps: float = 0.0) -> Any:
        """Vectorized membership with absolute slack ``eps``."""
        return self.slack(x, y) >= -eps

    def as_dict(self) -> dict:
        """Serialize the constraint."""
        return {
            "label": self.label,
            "c1": self.c1,
            "c2": self.c2,
            "sense": self.sense,
            "rhs": self.rhs,
        }


def cross(u: Sequence[float], v: Sequence[float]) -> float:
    """z-component of the planar cross product."""
    return float(u[0] * v[1] - u[1] * v[0])


def line_intersection(first: HalfPlane, second: HalfPlane) -> Point | None:
    """Intersection of the two boundary lines, or None when parallel."""
    matrix = np.array([[first.c1, first.c2], [second.c1, second.c2]], dtype=float)
    det = float(np.linalg.det(matrix))
    scale = max(float(np.abs(matrix).max()), 1.0)
    if abs(det) <= 1e-14 * scale * scale:
        return None
    solution = np.linalg.solve(matrix, np.array([first.rhs, second.rhs], dtype=float))
    return (float(solution[0]), float(solution[1]))


def satisfies_all(
    constraints: Iterable[HalfPlane], x: Any, y: Any, eps: float = 0.0
) -> Any:
    """Vectorized conjunction of every constraint."""
    result = np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
    for constraint in constraints:
        result &= constraint.contains(x, y, eps)
    return result if result.ndim else bool(result)


def _dedupe(points: Iterable[Point], tol: float) -> List[Point]:
    unique: List[Point] = []
    for point in points:
        if any(abs(point[0] - q[0]) <= tol and abs(point[1] - q[1]) <= tol for q in unique):
            continue
        unique.append(point)
    return unique


def feasible_vertices(constraints: Sequence[HalfPlane], eps: float) -> List[Point]:
    """Pairwise line intersections that satisfy every constraint."""
    vertices = []
    for first, second in itertools.combinations(constraints, 2):
        point = line_intersection(first, second)
        if point is None:
            continue
        if satisfies_all(constraints, point[0], point[1], eps):
            vertices.append(point)
    return _dedupe(vertices, tol=max(eps, 1e-12) * 10)


def drop_collinear(chain: Sequence[Point], tol: float) -> List[Point]:
    """Remove points that are not extreme along an ordered chain."""
    if len(chain) < 3:
        return list(chain)
    kept = [chain[0]]
    for index in range(1, len(chain) - 1):
        prev, here, nxt = kept[-1], chain[index], chain[index + 1]
        turn = cross(
            (here[0] - prev[0], here[1] - prev[1]),
            (nxt[0] - here[0], nxt[1] - here[1]),
        )
        if abs(turn) > tol:
            kept.append(here)
    kept.append(chain[-1])
    return kept


def dominant_face(constraints: Sequence[HalfPlane], eps: float) -> List[Point]:
    """Ordered extreme points of a down-closed region in the first quadrant.

    The chain runs from the r2-axis vertex to the r1-axis vertex. Redundant
    constraints never contribute a vertex because only intersection points
    satisfying every constraint survive.
    """
    axes = [
        HalfPlane(-1.0, 0.0, 0.0, label="r1>=0"),
        HalfPlane(0.0, -1.0, 0.0, label="r2>=0"),
    ]
    vertices = feasible_vertices([*constraints, *axes], eps)
    tol = max(eps, 1e-12) * 10
    chain = [p for p in vertices if not (abs(p[0]) <= tol and abs(p[1]) <= tol)]
    chain = [(max(p[0], 0.0), max(p[1], 0.0)) for p in chain]
    chain.sort(key=lambda p: (p[0], -p[1]))
    return drop_collinear(chain, tol)
