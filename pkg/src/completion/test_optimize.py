"""Tests for the weighted-sum minimizers, partitions and the convexity certificate."""

import math

import numpy as np
import pytest
from django.test import SimpleTestCase

from completion.services.channels import (
    GBCChannel,
    GICChannel,
    etw_polygon,
    gbc_predicate,
    strong_ic_polygon,
)
from completion.services.core import DomainError, LoadSpec, gamma
from completion.services.optimize import (
    WeightInterval,
    gbc_min_weighted,
    gbc_tangent,
    nonconvexity_certificate,
    pick_best,
    polygon_min_weighted,
    polygon_min_weighted_best,
    polygon_partitions,
    polygon_solution_sets,
)
from completion.services.oracle import grid_ct_cloud, grid_min_weighted, resolution_bound
from completion.services.regions import gbc_ctr

R_SUM = gamma(6)
STRONG = GICChannel(1, 1, 3, 3)
PENTAGON = strong_ic_polygon(STRONG)
WEAK_EXAMPLE = GICChannel(a=0.8, b=0.6, P1=10, P2=15)
SYMMETRIC_GBC = GBCChannel(h1=1, h2=1, P=3)
DEGRADED_GBC = GBCChannel(h1=1, h2=math.sqrt(0.5), P=6)
EQUAL = LoadSpec(1, 1)


class WeightIntervalTests(SimpleTestCase):
    """Open and closed interval ends."""

    def test_membership(self):
        """Left-open intervals exclude their lower end."""
        interval = WeightInterval(0.2, 0.5, lo_closed=False)
        self.assertNotIn(0.2, interval)
        self.assertIn(0.5, interval)
        self.assertIn(0.0, WeightInterval(0.0, 0.3))


class PartitionTests(SimpleTestCase):
    """Segment weights and breakpoints."""

    def test_pentagon(self):
        """j*, k1* and k2* are all 2 at equal loads."""
        partitions = polygon_partitions(PENTAGON, STRONG.caps, EQUAL)
        self.assertEqual((partitions.j_star, partitions.k1_star, partitions.k2_star), (2, 2, 2))
        np.testing.assert_allclose(partitions.Pi1, [0, 1 - 1 / R_SUM, 1], atol=1e-9)
        np.testing.assert_allclose(partitions.Pi2, [0, 1 / R_SUM, 1], atol=1e-9)
        self.assertAlmostEqual(partitions.Pi1[1], 0.287585, places=6)

    def test_weak_example(self):
        """Breakpoints of the worked example."""
        partitions = polygon_partitions(etw_polygon(WEAK_EXAMPLE), WEAK_EXAMPLE.caps, EQUAL)
        self.assertEqual(partitions.j_star, 4)
        self.assertEqual(partitions.k1_star, 4)
        self.assertEqual(partitions.k2_star, 3)
        np.testing.assert_allclose(partitions.Pi1, [0, 0.356485, 1], atol=5e-3)
        np.testing.assert_allclose(partitions.Pi2, [0, 0.513651, 0.806025, 1], atol=5e-3)
        self.assertAlmostEqual(partitions.C.r1, 1.035977, places=5)

    def test_breakpoints_are_sorted(self):
        """Both partitions run from 0 to 1 without decreasing."""
        for region, caps in ((PENTAGON, STRONG.caps),
                             (etw_polygon(WEAK_EXAMPLE), WEAK_EXAMPLE.caps)):
            for tau2 in (0.1, 0.5, 1.0, 2.0, 10.0):
                partitions = polygon_partitions(region, caps, LoadSpec(1.0, tau2))
                for breakpoints in (partitions.Pi1, partitions.Pi2):
                    self.assertEqual(breakpoints[0], 0.0)
                    self.assertEqual(breakpoints[-1], 1.0)
                    self.assertTrue(np.all(np.diff(breakpoints) >= -1e-12))

    def test_solution_sets(self):
        """Minimizer labels per side for the worked example."""
        region = etw_polygon(WEAK_EXAMPLE)
        side1, side2 = polygon_solution_sets(region, WEAK_EXAMPLE.caps, EQUAL)
        self.assertEqual(side1, ["C", "A5"])
        self.assertEqual(side2, ["A2", "A3", "A4"])


class PolygonMinimizerTests(SimpleTestCase):
    """Vertex minimizers on polygonal regions."""

    def test_pentagon_half_weight_tie(self):
        """Both sides reach 1.298162 at w = 0.5; side 1 wins the tie."""
        best, (side1, side2) = polygon_min_weighted_best(PENTAGON, STRONG.caps, EQUAL, 0.5)
        self.assertEqual(side1.label, "A3")
        self.assertEqual(side2.label, "A2")
        self.assertAlmostEqual(side1.objective, 1.298162, places=6)
        self.assertAlmostEqual(side2.objective, side1.objective, places=9)
        self.assertEqual(best.side, 1)
        self.assertEqual(best.minimizer_ct.as_tuple(), pytest.approx((1.0, 3 - R_SUM)))

    def test_endpoint_weights(self):
        """w = 0 and w = 1 use the first intervals and the last ones."""
        side1 = polygon_min_weighted(PENTAGON, STRONG.caps, EQUAL, 0.0, 1)
        self.assertEqual(side1.label, "C")
        self.assertTrue(side1.weight_interval.lo_closed)
        side2 = polygon_min_weighted(PENTAGON, STRONG.caps, EQUAL, 1.0, 2)
        self.assertEqual(side2.label, "C")
        self.assertEqual(side2.weight_interval.hi, 1.0)

    def test_breakpoint_goes_to_lower_interval(self):
        """At a breakpoint the lower interval's vertex is reported."""
        partitions = polygon_partitions(PENTAGON, STRONG.caps, EQUAL)
        result = polygon_min_weighted(PENTAGON, STRONG.caps, EQUAL, partitions.Pi1[1], 1)
        self.assertEqual(result.label, "C")

    def test_invalid_arguments(self):
        """Bad weights and sides are rejected."""
        with self.assertRaisesMessage(DomainError, "weight out of [0,1]"):
            polygon_min_weighted(PENTAGON, STRONG.caps, EQUAL, 1.2, 1)
        with self.assertRaises(DomainError):
            polygon_min_weighted(PENTAGON, STRONG.caps, EQUAL, 0.5, 3)

    def test_pick_best_prefers_side_one(self):
        """Equal objectives resolve to side 1 regardless of argument order."""
        _, (side1, side2) = polygon_min_weighted_best(PENTAGON, STRONG.caps, EQUAL, 0.5)
        self.assertEqual(pick_best(side2, side1).side, 1)


class GBCMinimizerTests(SimpleTestCase):
    """Bisection minimizer on the broadcast channel."""

    def test_tangent_at_two(self):
        """Tangent line and weights at P1 = 2."""
        tangent = gbc_tangent(DEGRADED_GBC, 2.0)
        self.assertAlmostEqual(tangent.g, 0.75, places=12)
        self.assertAlmostEqual(tangent.b, 0.913775, places=6)
        self.assertAlmostEqual(tangent.a, 0.685331, places=6)
        self.assertAlmostEqual(tangent.w1, 0.086225, places=6)
        self.assertAlmostEqual(tangent.w2, 0.961984, places=6)

    def test_endpoint_weights(self):
        """w = 0 gives A on side 2, w = 1 gives B on side 1."""
        best, (side1, side2) = gbc_min_weighted(DEGRADED_GBC, EQUAL, 0.0)
        self.assertEqual((side1.label, side2.label), ("C", "A"))
        self.assertEqual(best.side, 2)
        self.assertAlmostEqual(best.objective, 1.0, places=9)
        best, (side1, side2) = gbc_min_weighted(DEGRADED_GBC, EQUAL, 1.0)
        self.assertEqual((side1.label, side2.label), ("B", "C"))
        self.assertEqual(best.side, 1)
        self.assertAlmostEqual(best.objective, 1 / R_SUM, places=9)

    def test_interior_weight_uses_bisection(self):
        """Side 2 at w = 0.9 sits strictly between A and C."""
        _, (_, side2) = gbc_min_weighted(DEGRADED_GBC, EQUAL, 0.9)
        self.assertEqual(side2.label, "boundary")
        self.assertGreater(side2.P1, 0.0)
        self.assertLess(side2.P1, 1.372281323)
        self.assertAlmostEqual(gbc_tangent(DEGRADED_GBC, side2.P1).w2, 0.9, places=9)

    def test_rejects_bad_weight(self):
        """Weights outside [0, 1] are rejected."""
        with self.assertRaisesMessage(DomainError, "weight out of [0,1]"):
            gbc_min_weighted(DEGRADED_GBC, EQUAL, -0.1)


class CertificateTests(SimpleTestCase):
    """Non-convexity certificate of GBC regions."""

    def test_degraded(self):
        """Tangent weights at C for the degraded instance."""
        certificate = nonconvexity_certificate(DEGRADED_GBC, EQUAL)
        self.assertAlmostEqual(certificate.w1C, 0.057931, places=5)
        self.assertAlmostEqual(certificate.w2C, 0.930235, places=5)
        self.assertTrue(certificate.nonconvex)
        self.assertAlmostEqual(certificate.P1_prime, 1.372281323, places=8)

    def test_symmetric_unbounded_slope(self):
        """With w2(C) = 1 the side-2 slope is reported as unbounded."""
        certificate = nonconvexity_certificate(SYMMETRIC_GBC, EQUAL)
        self.assertAlmostEqual(certificate.w1C, 0.0, places=9)
        self.assertAlmostEqual(certificate.w2C, 1.0, places=9)
        self.assertTrue(certificate.s2_unbounded)
        self.assertIsNone(certificate.s2)
        self.assertTrue(certificate.nonconvex)


@pytest.mark.parametrize("w", [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0])
def test_pentagon_minimizer_matches_grid(w):
    """The vertex minimizer agrees with the brute-force grid minimum."""
    n = 300
    cloud = grid_ct_cloud(PENTAGON.contains, STRONG.caps, EQUAL, n)
    best, _ = polygon_min_weighted_best(PENTAGON, STRONG.caps, EQUAL, w)
    grid = grid_min_weighted(PENTAGON.contains, STRONG.caps, EQUAL, w, n, cloud=cloud)
    bound = resolution_bound(STRONG.caps, EQUAL, n, best.minimizer_ct.as_tuple())
    assert best.objective <= grid.value + 1e-9
    assert grid.value - best.objective <= bound


@pytest.mark.parametrize("w", [0.0, 0.05, 0.4, 0.8, 0.95, 1.0])
def test_gbc_minimizer_matches_grid(w):
    """The bisection minimizer agrees with the brute-force grid minimum."""
    n = 300
    contains = gbc_predicate(DEGRADED_GBC)
    cloud = grid_ct_cloud(contains, DEGRADED_GBC.caps, EQUAL, n)
    best, _ = gbc_min_weighted(DEGRADED_GBC, EQUAL, w)
    grid = grid_min_weighted(contains, DEGRADED_GBC.caps, EQUAL, w, n, cloud=cloud)
    bound = resolution_bound(DEGRADED_GBC.caps, EQUAL, n, best.minimizer_ct.as_tuple())
    assert best.objective <= grid.value + 1e-7
    assert grid.value - best.objective <= bound


@pytest.mark.slow
def test_weak_example_minimizer_matches_grid():
    """Weak-regime vertex minimizers against a fine grid over many weights."""
    region = etw_polygon(WEAK_EXAMPLE)
    caps = WEAK_EXAMPLE.caps
    n = 1200
    cloud = grid_ct_cloud(region.contains, caps, EQUAL, n)
    for w in np.linspace(0.0, 1.0, 21):
        best, _ = polygon_min_weighted_best(region, caps, EQUAL, float(w))
        grid = grid_min_weighted(region.contains, caps, EQUAL, float(w), n, cloud=cloud)
        bound = resolution_bound(caps, EQUAL, n, best.minimizer_ct.as_tuple())
        assert best.objective <= grid.value + 1e-9
        assert grid.value - best.objective <= bound


def _random_gbc(rng):
    """A broadcast channel with a clearly weaker second user."""
    h1 = rng.uniform(0.5, 2.0)
    return GBCChannel(h1=h1, h2=h1 * rng.uniform(0.2, 0.8), P=rng.uniform(1.0, 20.0))


class TangentPropertyTests(SimpleTestCase):
    """Tangent-line weights along the GBC boundary."""

    def test_intercepts_are_monotone(self):
        """1/a decreases and 1/b increases with P1."""
        rng = np.random.default_rng(17)
        for _ in range(25):
            channel = _random_gbc(rng)
            tangents = [gbc_tangent(channel, p1) for p1 in np.linspace(0.0, channel.P, 50)]
            self.assertTrue(np.all(np.diff([1 / t.a for t in tangents]) < 0))
            self.assertTrue(np.all(np.diff([1 / t.b for t in tangents]) > 0))
            self.assertTrue(np.all(np.diff([t.w1 for t in tangents]) > 0))
            self.assertTrue(np.all(np.diff([t.w2 for t in tangents]) > 0))

    def test_equal_gains_give_constant_intercepts(self):
        """h1 = h2 makes the boundary a straight line."""
        tangents = [gbc_tangent(SYMMETRIC_GBC, p1) for p1 in np.linspace(0.0, 3.0, 20)]
        np.testing.assert_allclose([1 / t.a for t in tangents], 1.0, atol=1e-12)
        np.testing.assert_allclose([1 / t.b for t in tangents], 1.0, atol=1e-12)

    def test_tangent_supports_the_boundary(self):
        """Every boundary point lies on or under each tangent line."""
        rng = np.random.default_rng(23)
        for channel in [DEGRADED_GBC, *(_random_gbc(rng) for _ in range(10))]:
            powers = np.linspace(0.0, channel.P, 60)
            points = np.array([gbc_tangent(channel, p1).point.as_tuple() for p1 in powers])
            for p1 in powers:
                tangent = gbc_tangent(channel, p1)
                self.assertAlmostEqual(
                    tangent.a * tangent.point.r1 + tangent.b * tangent.point.r2, 1.0, places=12
                )
                values = tangent.a * points[:, 0] + tangent.b * points[:, 1]
                self.assertTrue(np.all(values <= 1.0 + 1e-9))


class RandomCertificateTests(SimpleTestCase):
    """Non-convexity of random degraded broadcast channels."""

    def test_chord_across_c_bar_leaves_the_region(self):
        """Side minimizers on either side of C-bar have an outside midpoint."""
        rng = np.random.default_rng(29)
        for _ in range(25):
            channel = _random_gbc(rng)
            load = LoadSpec(*rng.uniform(0.5, 2.0, size=2))
            certificate = nonconvexity_certificate(channel, load)
            self.assertTrue(certificate.nonconvex)
            self.assertLess(certificate.w1C, certificate.w2C)

            p1_prime = certificate.P1_prime
            w_side1 = gbc_tangent(channel, p1_prime + 0.01 * (channel.P - p1_prime)).w1
            w_side2 = gbc_tangent(channel, 0.99 * p1_prime).w2
            _, (side1, _) = gbc_min_weighted(channel, load, w_side1)
            _, (_, side2) = gbc_min_weighted(channel, load, w_side2)
            self.assertEqual((side1.label, side2.label), ("boundary", "boundary"))

            ctr = gbc_ctr(channel, load)
            first = np.array(side1.minimizer_ct.as_tuple())
            second = np.array(side2.minimizer_ct.as_tuple())
            self.assertTrue(ctr.contains(*first))
            self.assertTrue(ctr.contains(*second))
            self.assertFalse(ctr.contains(*((first + second) / 2)))


def test_random_gbc_minimizers_match_grid():
    """Bisection minimizers of random channels against the grid at eleven weights."""
    rng = np.random.default_rng(31)
    n = 300
    for _ in range(8):
        channel = _random_gbc(rng)
        load = LoadSpec(*rng.uniform(0.5, 2.0, size=2))
        contains = gbc_predicate(channel)
        cloud = grid_ct_cloud(contains, channel.caps, load, n)
        for w in np.linspace(0.0, 1.0, 11):
            best, _ = gbc_min_weighted(channel, load, float(w))
            grid = grid_min_weighted(contains, channel.caps, load, float(w), n, cloud=cloud)
            bound = resolution_bound(channel.caps, load, n, best.minimizer_ct.as_tuple())
            assert best.objective <= grid.value + 1e-7
            assert grid.value - best.objective <= bound


@pytest.mark.slow
def test_random_gbc_minimizers_match_fine_grid():
    """The same check over a hundred channels at the default grid resolution."""
    rng = np.random.default_rng(37)
    n = 2000
    for _ in range(100):
        channel = _random_gbc(rng)
        load = LoadSpec(*rng.uniform(0.5, 2.0, size=2))
        contains = gbc_predicate(channel)
        cloud = grid_ct_cloud(contains, channel.caps, load, n)
        for w in np.linspace(0.0, 1.0, 11):
            best, _ = gbc_min_weighted(channel, load, float(w))
            grid = grid_min_weighted(contains, channel.caps, load, float(w), n, cloud=cloud)
            bound = resolution_bound(channel.caps, load, n, best.minimizer_ct.as_tuple())
            assert best.objective <= grid.value + 1e-7
            assert grid.value - best.objective <= bound


def test_random_weak_polygon_minimizers_match_grid():
    """Vertex minimizers of random ETW polygons against the grid at eleven weights."""
    rng = np.random.default_rng(41)
    n = 300
    for _ in range(6):
        channel = GICChannel(*rng.uniform([0.1, 0.1, 1.0, 1.0], [0.95, 0.95, 30.0, 30.0]))
        load = LoadSpec(*rng.uniform(0.5, 2.0, size=2))
        region = etw_polygon(channel, str(rng.choice(["achievable", "outer"])))
        cloud = grid_ct_cloud(region.contains, channel.caps, load, n)
        for w in np.linspace(0.0, 1.0, 11):
            best, _ = polygon_min_weighted_best(region, channel.caps, load, float(w))
            grid = grid_min_weighted(region.contains, channel.caps, load, float(w), n,
                                     cloud=cloud)
            bound = resolution_bound(channel.caps, load, n, best.minimizer_ct.as_tuple())
            assert best.objective <= grid.value + 1e-9
            assert grid.value - best.objective <= bound
