"""Geometry observables against hand-computed polygon values."""

import numpy as np
import pytest

from idealrings import (
    OpenChain,
    Ring,
    Subsegment,
    center_of_mass,
    closure_defect,
    end_to_end_sq,
    mean_subsegment_rg_sq,
    radius_of_gyration_sq,
    squared_end_to_end,
    subsegment_rg_sq,
    vertices,
)
from helpers import paired_ring, random_rotation, regular_ring

TRIANGLE = Ring(
    [
        [1.0, 0.0, 0.0],
        [-0.5, np.sqrt(3.0) / 2.0, 0.0],
        [-0.5, -np.sqrt(3.0) / 2.0, 0.0],
    ]
)

SQUARE = Ring(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)

# Degenerate but valid: two edges traversed back and forth.
FLAT = Ring(
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
    ]
)


class TestValidation:
    def test_rejects_non_unit_edges(self):
        with pytest.raises(ValueError, match="unit length"):
            Ring([[2.0, 0, 0], [-1.0, 0, 0], [-1.0, 0, 0]])

    def test_rejects_open_polygon(self):
        with pytest.raises(ValueError, match="close"):
            Ring([[1.0, 0, 0], [0, 1.0, 0], [-1.0, 0, 0]])

    def test_rejects_too_few_edges(self):
        with pytest.raises(ValueError, match="at least 3"):
            Ring([[1.0, 0, 0], [-1.0, 0, 0]])

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError, match="shape"):
            Ring(np.ones((4, 2)))

    def test_rejects_nan(self):
        e = np.array(SQUARE.edges, copy=True)
        e[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            Ring(e)

    def test_open_chain_allows_any_direction_sum(self):
        c = OpenChain([[1.0, 0, 0], [1.0, 0, 0], [1.0, 0, 0]])
        assert c.n == 3
        assert end_to_end_sq(c) == pytest.approx(9.0)

    def test_random_open_chain_is_not_a_ring(self):
        # A typical open chain misses closure by O(sqrt(n)).
        rng = np.random.default_rng(7)
        e = rng.standard_normal((50, 3))
        e /= np.linalg.norm(e, axis=1, keepdims=True)
        chain = OpenChain(e)
        with pytest.raises(ValueError, match="close"):
            Ring(chain.edges)

    def test_edges_are_read_only(self):
        with pytest.raises(ValueError):
            SQUARE.edges[0, 0] = 2.0

    def test_subsegment_bounds(self):
        with pytest.raises(ValueError):
            Subsegment(SQUARE, 0, 0)
        with pytest.raises(ValueError):
            Subsegment(SQUARE, 0, 5)

    def test_subsegment_start_wraps(self):
        seg = Subsegment(SQUARE, 6, 2)
        assert seg.start == 2
        assert list(seg.edge_indices()) == [2, 3]


class TestVertices:
    def test_starts_at_origin(self):
        assert np.all(vertices(SQUARE)[0] == 0.0)

    def test_square_corners(self):
        v = vertices(SQUARE)
        expected = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 0]]
        np.testing.assert_allclose(v, expected, atol=1e-15)

    def test_ring_returns_to_origin(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            ring = paired_ring(30, rng)
            assert np.linalg.norm(vertices(ring)[-1]) <= 1e-12 * ring.n
            assert closure_defect(ring) <= 1e-12 * ring.n


class TestEndToEnd:
    def test_unit_steps(self):
        for start in range(4):
            assert squared_end_to_end(SQUARE, 1, start) == pytest.approx(1.0)

    def test_square_diagonals(self):
        for start in range(4):
            assert squared_end_to_end(SQUARE, 2, start) == pytest.approx(2.0)
        for start in range(4):
            assert squared_end_to_end(SQUARE, 3, start) == pytest.approx(1.0)

    def test_triangle_all_unit(self):
        for k in (1, 2):
            for start in range(3):
                assert squared_end_to_end(TRIANGLE, k, start) == pytest.approx(1.0)

    def test_flat_ring_cancels(self):
        assert squared_end_to_end(FLAT, 2, 0) == pytest.approx(0.0, abs=1e-15)

    def test_full_loop_is_closure_defect(self):
        rng = np.random.default_rng(3)
        ring = paired_ring(40, rng)
        for start in (0, 7, 39):
            assert squared_end_to_end(ring, ring.n, start) <= (1e-9 * ring.n) ** 2

    def test_complement_symmetry(self):
        # The two arcs between a vertex pair span the same chord.
        rng = np.random.default_rng(5)
        ring = paired_ring(24, rng)
        for k in (1, 5, 11, 23):
            for start in (0, 3, 20):
                a = squared_end_to_end(ring, k, start)
                b = squared_end_to_end(ring, ring.n - k, start + k)
                assert a == pytest.approx(b, abs=1e-10)

    def test_rejects_out_of_range_k(self):
        with pytest.raises(ValueError):
            squared_end_to_end(SQUARE, 0)
        with pytest.raises(ValueError):
            squared_end_to_end(SQUARE, 5)


class TestGyration:
    def test_triangle(self):
        # Circumradius of a unit equilateral triangle is 1/sqrt(3).
        assert radius_of_gyration_sq(TRIANGLE) == pytest.approx(1.0 / 3.0)

    def test_square(self):
        assert radius_of_gyration_sq(SQUARE) == pytest.approx(0.5)
        np.testing.assert_allclose(center_of_mass(SQUARE), [0.5, 0.5, 0.0], atol=1e-15)

    def test_flat_ring(self):
        assert radius_of_gyration_sq(FLAT) == pytest.approx(0.25)

    def test_pentagon_on_circumcircle(self):
        # All vertices sit at the circumradius, so rg^2 = (5 + sqrt(5)) / 10.
        ring = regular_ring(5)
        assert radius_of_gyration_sq(ring) == pytest.approx(0.7236067977499790)

    def test_open_chain_straight_line(self):
        # Vertices 1..n at x = 1..n; centroid (n+1)/2; variance (n^2-1)/12.
        chain = OpenChain(np.tile([1.0, 0.0, 0.0], (9, 1)))
        assert radius_of_gyration_sq(chain) == pytest.approx(80.0 / 12.0)

    def test_rotation_translation_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            ring = paired_ring(20, rng)
            rot = random_rotation(rng)
            rotated = Ring(ring.edges @ rot.T)
            assert radius_of_gyration_sq(rotated) == pytest.approx(
                radius_of_gyration_sq(ring), rel=1e-10
            )
            for k in (1, 7, 13):
                assert squared_end_to_end(rotated, k, 4) == pytest.approx(
                    squared_end_to_end(ring, k, 4), rel=1e-10, abs=1e-12
                )


class TestSubsegments:
    def test_single_edge_has_zero_rg(self):
        for start in range(4):
            assert subsegment_rg_sq(Subsegment(SQUARE, start, 1)) == 0.0
        assert mean_subsegment_rg_sq(SQUARE, 1) == 0.0

    def test_square_corner_pair(self):
        # Two unit edges at a right angle: vertices 1 apart, rg^2 = 1/4.
        for start in range(4):
            assert subsegment_rg_sq(Subsegment(SQUARE, start, 2)) == pytest.approx(0.25)
        assert mean_subsegment_rg_sq(SQUARE, 2) == pytest.approx(0.25)

    def test_collinear_pair(self):
        chainlike = Subsegment(FLAT, 1, 2)  # edges -x then +x, folded flat
        assert subsegment_rg_sq(chainlike) == pytest.approx(0.25)

    def test_full_length_matches_ring_rg(self):
        rng = np.random.default_rng(23)
        ring = paired_ring(16, rng)
        whole = radius_of_gyration_sq(ring)
        for start in (0, 5, 15):
            assert subsegment_rg_sq(Subsegment(ring, start, ring.n)) == pytest.approx(
                whole, abs=1e-10
            )
        assert mean_subsegment_rg_sq(ring, ring.n) == pytest.approx(whole, abs=1e-10)

    def test_mean_over_starts_matches_manual_loop(self):
        rng = np.random.default_rng(29)
        ring = paired_ring(12, rng)
        k = 5
        manual = np.mean(
            [subsegment_rg_sq(Subsegment(ring, s, k)) for s in range(ring.n)]
        )
        assert mean_subsegment_rg_sq(ring, k) == pytest.approx(manual)
