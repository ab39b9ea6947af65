"""Tests for tangent cones, spikiness and standard position.

Test Coverage:
    - tangent_cone at vertices, smooth points and polytope apexes
    - is_spiky and find_spiky_minimal_width_direction
    - minimal_width_chord
    - standardize and the Similarity round trip
    - interior_shift_direction
"""

import math
from typing import Optional

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from plankforge.errors import NotOnBoundaryError, PreconditionError
from plankforge.geometry import Body2, Plank, Polytope3, minimal_width
from plankforge.spiky import (
    Similarity,
    TangentCone,
    find_spiky_minimal_width_direction,
    interior_shift_direction,
    is_spiky,
    minimal_width_chord,
    standardize,
    tangent_cone,
)

SQRT_HALF = math.sqrt(0.5)

# Vertex 2 locates a few ulps below its junction by projection alone.
SKEWED_QUAD = [[-0.195, -0.8066], [0.9357, -0.5700], [0.3435, -0.3992], [-0.1194, -0.5209]]


def _rows(array: np.ndarray) -> set[tuple[float, ...]]:
    return {tuple(float(c) for c in np.round(row, 9) + 0.0) for row in array}


def _edge_heights(points: np.ndarray) -> list[np.ndarray]:
    """Distances of every vertex from the line of each edge."""
    heights = []
    for i in range(len(points)):
        edge = points[(i + 1) % len(points)] - points[i]
        rel = points - points[i]
        heights.append(np.abs(edge[0] * rel[:, 1] - edge[1] * rel[:, 0]) / np.linalg.norm(edge))
    return heights


def _spiky_by_vertex_chords(points: np.ndarray, gap: float = 1e-6) -> Optional[bool]:
    """Brute-force spikiness of a convex polygon in a minimal-width direction.

    The width is minimal across some edge; the polygon is spiky there when a
    single vertex is farthest from that edge. None when a near-tie makes the
    answer depend on rounding.
    """
    heights = _edge_heights(points)
    tops = np.array([float(h.max()) for h in heights])
    width = float(tops.min())
    spiky = False
    for top, h in zip(tops, heights):
        if 0.0 < top - width < gap:
            return None
        if top > width:
            continue
        separation = top - float(np.sort(h)[-2])
        if 0.0 < separation < gap:
            return None
        spiky |= separation > 0.0
    return spiky


# =============================================================================
# A. Tangent Cones
# =============================================================================


@pytest.mark.unit
class TestTangentCone:
    """Tests for tangent_cone."""

    def test_square_vertex_is_quadrant(self, unit_square: Body2) -> None:
        cone = tangent_cone(unit_square, [-0.5, -0.5])

        assert _rows(cone.rays) == {(1.0, 0.0), (0.0, 1.0)}

    def test_disc_boundary_is_half_plane(self) -> None:
        cone = tangent_cone(Body2.disc(), [1.0, 0.0])

        assert _rows(cone.rays) == {(0.0, 1.0), (0.0, -1.0)}

    def test_reuleaux_vertex_opening(self, reuleaux: Body2) -> None:
        top = reuleaux.pieces[0].start
        cone = tangent_cone(reuleaux, top)
        first, second = cone.rays

        opening = math.acos(float(np.clip(first @ second, -1.0, 1.0)))
        assert opening == pytest.approx(2.0 * math.pi / 3.0)

    def test_vertex_cones_follow_adjacent_edges(self) -> None:
        body = Body2.polygon(SKEWED_QUAD)
        vertices = body.vertices
        count = len(vertices)

        for i, vertex in enumerate(vertices):
            cone = tangent_cone(body, vertex)
            ahead = vertices[(i + 1) % count] - vertex
            behind = vertices[i - 1] - vertex
            assert cone.rays[0] == pytest.approx(ahead / np.linalg.norm(ahead), abs=1e-12)
            assert cone.rays[1] == pytest.approx(behind / np.linalg.norm(behind), abs=1e-12)

    def test_skewed_vertex_cone_is_pointed(self) -> None:
        body = Body2.polygon(SKEWED_QUAD)
        cone = tangent_cone(body, SKEWED_QUAD[2])

        assert cone.rays[0] == pytest.approx([-0.9671, -0.2543], abs=1e-4)
        assert cone.rays[1] == pytest.approx([0.9608, -0.2772], abs=1e-4)
        assert float(cone.rays[0] @ cone.rays[1]) > -1.0 + 1e-3

    def test_standardized_reuleaux_apex_keeps_its_corner(self, reuleaux: Body2) -> None:
        direction, _ = find_spiky_minimal_width_direction(reuleaux)  # type: ignore[misc]
        cone = standardize(reuleaux, direction).witness.cone
        first, second = cone.rays

        opening = math.acos(float(np.clip(first @ second, -1.0, 1.0)))
        assert opening == pytest.approx(2.0 * math.pi / 3.0, abs=1e-9)
        assert np.allclose(cone.apex, 0.0, atol=1e-12)

    def test_pyramid_apex_cone(self, pyramid: Polytope3) -> None:
        cone = tangent_cone(pyramid, [0.0, 0.0, 0.0])

        assert len(cone.rays) == 4
        assert np.allclose(np.abs(cone.rays), 1.0 / math.sqrt(3.0))
        assert len(cone.normals) == 4

    def test_point_off_boundary_rejected(self, unit_square: Body2) -> None:
        with pytest.raises(NotOnBoundaryError):
            tangent_cone(unit_square, [0.0, 0.0])


# =============================================================================
# B. Spikiness
# =============================================================================


@pytest.mark.unit
class TestIsSpiky:
    """Tests for is_spiky."""

    def test_square_edge_direction_is_not_spiky(self, unit_square: Body2) -> None:
        assert is_spiky(unit_square, [0.0, -1.0]) is None

    def test_square_diagonal_is_spiky(self, unit_square: Body2) -> None:
        witness = is_spiky(unit_square, [-SQRT_HALF, -SQRT_HALF])

        assert witness is not None
        assert np.allclose(witness.apex, [-0.5, -0.5])
        assert witness.aperture == pytest.approx(-SQRT_HALF)

    def test_triangle_apex_down(self) -> None:
        body = Body2.polygon([[0.0, 0.0], [0.5, math.sqrt(3.0) / 2.0], [-0.5, math.sqrt(3.0) / 2.0]])
        witness = is_spiky(body, [0.0, -1.0])

        assert witness is not None
        assert np.allclose(witness.apex, [0.0, 0.0])
        assert witness.aperture < -1e-9

    def test_semicircle_orientation_matters(self) -> None:
        body = Body2.semicircle()

        assert is_spiky(body, [0.0, -1.0]) is None
        assert is_spiky(body, [0.0, 1.0]) is None


@pytest.mark.unit
class TestFindSpikyDirection:
    """Tests for find_spiky_minimal_width_direction."""

    def test_square_has_none(self, unit_square: Body2) -> None:
        assert find_spiky_minimal_width_direction(unit_square) is None

    def test_disc_has_none(self) -> None:
        assert find_spiky_minimal_width_direction(Body2.disc()) is None

    def test_reuleaux_has_one(self, reuleaux: Body2) -> None:
        found = find_spiky_minimal_width_direction(reuleaux)

        assert found is not None
        direction, witness = found
        assert reuleaux.width(direction) == pytest.approx(1.0, abs=1e-9)
        assert any(np.allclose(witness.apex, p.start, atol=1e-9) for p in reuleaux.pieces)

    def test_pyramid_points_down(self, pyramid: Polytope3) -> None:
        found = find_spiky_minimal_width_direction(pyramid)

        assert found is not None
        direction, witness = found
        assert np.allclose(direction, [0.0, 0.0, -1.0])
        assert witness.aperture == pytest.approx(-1.0 / math.sqrt(3.0))

    @given(
        st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=6, max_size=6),
    )
    @settings(max_examples=50, deadline=None)
    def test_every_triangle_is_spiky(self, coords: list[float]) -> None:
        points = np.array(coords).reshape(3, 2)
        edge_a, edge_b = points[1] - points[0], points[2] - points[0]
        doubled_area = abs(edge_a[0] * edge_b[1] - edge_a[1] * edge_b[0])
        sides = [np.linalg.norm(points[i] - points[(i + 1) % 3]) for i in range(3)]
        assume(doubled_area > 0.05 and min(sides) > 0.05)

        # The altitude onto the longest side splits its vertex angle into two acute angles.
        assert find_spiky_minimal_width_direction(Body2.polygon(points)) is not None

    @given(
        st.lists(st.floats(0.0, 2.0 * math.pi, allow_nan=False), min_size=4, max_size=4),
        st.lists(st.floats(-2.0, 2.0, allow_nan=False), min_size=4, max_size=4),
    )
    @settings(max_examples=80, deadline=None)
    def test_quadrilaterals_match_vertex_chords(self, angles: list[float], entries: list[float]) -> None:
        ordered = np.sort(angles)
        gaps = np.diff(np.append(ordered, ordered[0] + 2.0 * math.pi))
        matrix = np.array(entries).reshape(2, 2)
        assume(gaps.min() > 0.3 and abs(float(np.linalg.det(matrix))) > 0.2)
        points = np.column_stack([np.cos(ordered), np.sin(ordered)]) @ matrix.T
        expected = _spiky_by_vertex_chords(points)
        assume(expected is not None)

        body = Body2.polygon(points)
        found = find_spiky_minimal_width_direction(body)

        assert (found is not None) is expected
        if found is not None:
            direction, witness = found
            assert body.width(direction) == pytest.approx(minimal_width(body)[0], abs=1e-9)
            assert min(np.linalg.norm(points - witness.apex, axis=1)) < 1e-9

    def test_trapezoid_across_parallel_bases_is_not_spiky(self) -> None:
        points = np.array([[0.0, 0.0], [2.0, 0.0], [1.5, 0.5], [0.5, 0.5]])

        assert _spiky_by_vertex_chords(points) is False
        assert find_spiky_minimal_width_direction(Body2.polygon(points)) is None

    @given(st.floats(0.2, 0.9))
    @settings(max_examples=20, deadline=None)
    def test_rectangles_are_not_spiky(self, aspect: float) -> None:
        body = Body2.polygon([[0.0, 0.0], [1.0, 0.0], [1.0, aspect], [0.0, aspect]])

        assert find_spiky_minimal_width_direction(body) is None

    @given(
        angle=st.floats(0.0, 2.0 * math.pi),
        scale=st.floats(0.1, 10.0),
        dx=st.floats(-5.0, 5.0),
        dy=st.floats(-5.0, 5.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_spikiness_is_similarity_invariant(self, angle: float, scale: float, dx: float, dy: float) -> None:
        body = Body2.polygon([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])
        c, s = math.cos(angle), math.sin(angle)
        rotation = np.array([[c, -s], [s, c]])
        moved = body.transformed(rotation, scale, [dx, dy])
        u = np.array([0.0, 1.0])

        assert (is_spiky(body, u) is None) == (is_spiky(moved, rotation @ u) is None)


# =============================================================================
# C. Minimal Width Chords
# =============================================================================


@pytest.mark.unit
class TestMinimalWidthChord:
    """Tests for minimal_width_chord."""

    def test_square_vertical_chord(self, unit_square: Body2) -> None:
        a, b = minimal_width_chord(unit_square, [0.0, 1.0])

        assert a[1] == pytest.approx(0.5)
        assert b - a == pytest.approx([0.0, -1.0])

    def test_triangle_altitude(self, triangle: Body2) -> None:
        a, b = minimal_width_chord(triangle, [0.0, 1.0])

        assert a == pytest.approx([0.5, math.sqrt(3.0) / 2.0])
        assert b == pytest.approx([0.5, 0.0], abs=1e-9)

    def test_reuleaux_vertex_axis(self, reuleaux: Body2) -> None:
        a, b = minimal_width_chord(reuleaux, [0.0, 1.0])

        assert np.linalg.norm(a - b) == pytest.approx(1.0)
        assert a == pytest.approx(reuleaux.pieces[0].start)

    def test_non_minimal_direction_rejected(self, triangle: Body2) -> None:
        with pytest.raises(PreconditionError):
            minimal_width_chord(triangle, [math.cos(0.17), math.sin(0.17)])


# =============================================================================
# D. Standard Position
# =============================================================================


@pytest.mark.unit
class TestStandardize:
    """Tests for standardize and Similarity."""

    def test_triangle(self, triangle: Body2) -> None:
        std = standardize(triangle, [0.0, 1.0])

        assert std.similarity.scale == pytest.approx(2.0 / math.sqrt(3.0))
        assert minimal_width(std.body)[0] == pytest.approx(1.0, abs=1e-12)
        assert std.body.support([0.0, -1.0]) == pytest.approx(0.0, abs=1e-12)
        assert std.body.support([0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(std.witness.apex, 0.0, atol=1e-12)

    def test_reuleaux_scale_is_one(self, reuleaux: Body2) -> None:
        direction, _ = find_spiky_minimal_width_direction(reuleaux)  # type: ignore[misc]
        std = standardize(reuleaux, direction)

        assert std.similarity.scale == pytest.approx(1.0, abs=1e-9)

    def test_pyramid(self, pyramid: Polytope3) -> None:
        std = standardize(pyramid, [0.0, 0.0, -1.0])

        assert std.similarity.scale == pytest.approx(2.0)
        assert std.body.support([0.0, 0.0, 1.0]) == pytest.approx(1.0)
        assert np.allclose(std.witness.direction, [0.0, 0.0, -1.0])

    def test_round_trip(self, triangle: Body2) -> None:
        std = standardize(triangle, [0.0, 1.0])
        vertices = triangle.vertices

        assert np.allclose(std.similarity.invert(std.similarity.apply(vertices)), vertices, atol=1e-12)

    def test_not_spiky_direction_rejected(self, unit_square: Body2) -> None:
        with pytest.raises(PreconditionError):
            standardize(unit_square, [0.0, -1.0])

    def test_non_minimal_direction_rejected(self, unit_square: Body2) -> None:
        with pytest.raises(PreconditionError):
            standardize(unit_square, [-SQRT_HALF, -SQRT_HALF])

    def test_pull_back_plank_preserves_membership(self, triangle: Body2) -> None:
        similarity = Similarity(np.array([[0.0, -1.0], [1.0, 0.0]]), 2.0, [1.0, -3.0])
        plank = Plank([0.6, 0.8], -0.1, 0.4)
        pulled = similarity.pull_back_plank(plank)
        points = np.array([[0.1, 0.2], [0.3, -0.4], [-0.2, 0.05]])

        for point in points:
            assert pulled.contains(point) == plank.contains(similarity.apply(point))
        assert pulled.width == pytest.approx(plank.width / 2.0)


@pytest.mark.unit
class TestInteriorShiftDirection:
    """Tests for interior_shift_direction."""

    def test_quadrant(self) -> None:
        cone = TangentCone([0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [-1.0, 0.0]])

        assert interior_shift_direction(cone) == pytest.approx([SQRT_HALF, SQRT_HALF])

    def test_pyramid_apex(self, pyramid: Polytope3) -> None:
        cone = tangent_cone(pyramid, [0.0, 0.0, 0.0])

        assert interior_shift_direction(cone) == pytest.approx([0.0, 0.0, 1.0])

    def test_half_plane_rejected(self) -> None:
        cone = tangent_cone(Body2.disc(), [1.0, 0.0])

        with pytest.raises(PreconditionError):
            interior_shift_direction(cone)
