"""Tests for the half-plane helpers."""

import pytest

from completion.services.geometry import (
    HalfPlane,
    dominant_face,
    drop_collinear,
    feasible_vertices,
    line_intersection,
    satisfies_all,
)

BOX = [HalfPlane(1, 0, 1, label="r1"), HalfPlane(0, 1, 1, label="r2")]


class TestHalfPlane:
    """Single constraints."""

    def test_senses(self):
        """<= and >= flip the sign of the slack."""
        upper = HalfPlane(1, 1, 2)
        lower = HalfPlane(1, 1, 2, sense=">=")
        assert upper.contains(1, 1) and lower.contains(1, 1)
        assert upper.contains(0, 0) and not lower.contains(0, 0)
        assert lower.slack(3, 0) == pytest.approx(1.0)

    def test_unknown_sense(self):
        """Only <= and >= are accepted."""
        with pytest.raises(ValueError):
            HalfPlane(1, 0, 1, sense="<")

    def test_slack_tolerance(self):
        """eps admits points just outside."""
        assert not HalfPlane(1, 0, 1).contains(1 + 1e-10, 0)
        assert HalfPlane(1, 0, 1).contains(1 + 1e-10, 0, eps=1e-9)


class TestVertices:
    """Intersections and face extraction."""

    def test_parallel_lines(self):
        """Parallel boundaries have no intersection."""
        assert line_intersection(HalfPlane(1, 1, 1), HalfPlane(2, 2, 5)) is None
        assert line_intersection(*BOX) == pytest.approx((1.0, 1.0))

    def test_unit_square_face(self):
        """The unit square's dominant face is its top-right corner chain."""
        assert dominant_face(BOX, 1e-9) == [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]

    def test_redundant_constraint(self):
        """A sum bound that never binds contributes no vertex."""
        face = dominant_face([*BOX, HalfPlane(1, 1, 3, label="sum")], 1e-9)
        assert face == [(0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]

    def test_binding_sum(self):
        """A binding sum bound cuts the corner."""
        face = dominant_face([*BOX, HalfPlane(1, 1, 1.5)], 1e-9)
        assert face == pytest.approx([(0.0, 1.0), (0.5, 1.0), (1.0, 0.5), (1.0, 0.0)])

    def test_feasible_vertices_dedupes(self):
        """Three lines through one point give one vertex."""
        lines = [*BOX, HalfPlane(1, 1, 2)]
        assert feasible_vertices(lines, 1e-9) == [pytest.approx((1.0, 1.0))]

    def test_drop_collinear(self):
        """Midpoints of straight runs are removed."""
        chain = [(0, 1), (0.5, 1), (1, 1), (1, 0)]
        assert drop_collinear(chain, 1e-12) == [(0, 1), (1, 1), (1, 0)]

    def test_satisfies_all_vectorized(self):
        """Arrays in, boolean array out; scalars give a bool."""
        assert satisfies_all(BOX, 0.5, 0.5) is True
        assert satisfies_all(BOX, [0.5, 2.0], [0.5, 0.5]).tolist() == [True, False]
