"""Convex-body representations and metric primitives.

Planar bodies are arc-gons: closed counterclockwise chains of segments and
circular arcs, so polygons, discs, semicircles and Reuleaux polygons are all
represented exactly. Solid bodies are convex polytopes given by their vertices;
the hull structure is derived with Qhull.

Every other module consumes the operations defined here:
    - support_function / width_in_direction / minimal_width
    - perimeter / distance_to_complement / contains
    - hausdorff_distance between finite unions of simple sets
    - cross_section of a polytope, planar body or tangent cone at height t

All objects are immutable; every function is a pure function of its inputs.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from typing import Optional, Protocol, Union

import attr
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize_scalar
from scipy.spatial import ConvexHull, QhullError

from plankforge.errors import InvalidBodyError, NotOnBoundaryError, PreconditionError
from plankforge.settings import get_tolerances

logger = logging.getLogger(__name__)

Vector = NDArray[np.float64]

TWO_PI = 2.0 * math.pi

# Arcs are split so that every piece spans at most this angle; the chord
# polygon of the split body is then never degenerate.
MAX_ARC_SPAN = math.pi / 2.0


# =============================================================================
# Vector helpers
# =============================================================================


def as_vector(values: ArrayLike) -> Vector:
    """Return a float64 copy of a point or direction."""
    vector = np.array(values, dtype=np.float64)
    vector.setflags(write=False)
    return vector


def as_direction(values: ArrayLike) -> Vector:
    """Return the unit vector pointing along ``values``.

    Raises:
        PreconditionError: If the vector is (numerically) zero.
    """
    vector = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(vector))
    if norm < 1e-15 or not math.isfinite(norm):
        raise PreconditionError(f"Cannot normalize vector {vector.tolist()}")
    return as_vector(vector / norm)


def perp(v: Vector) -> Vector:
    """Rotate a planar vector by +90 degrees."""
    return np.array([-v[1], v[0]], dtype=np.float64)


def cross2(a: ArrayLike, b: ArrayLike) -> float:
    """Planar cross product (z-component)."""
    return float(a[0] * b[1] - a[1] * b[0])  # type: ignore[index]


def wrap_angle(angle: Union[float, NDArray[np.float64]]) -> NDArray[np.float64]:
    """Map angles into [0, 2*pi)."""
    return np.mod(angle, TWO_PI)


def unit_circle(angle: float) -> Vector:
    return np.array([math.cos(angle), math.sin(angle)], dtype=np.float64)


def lexicographic_key(v: ArrayLike, decimals: int = 9) -> tuple[float, ...]:
    """Sort key comparing directions coordinate by coordinate, ignoring noise."""
    rounded = np.round(np.asarray(v, dtype=np.float64), decimals) + 0.0
    return tuple(float(x) for x in rounded)


def fibonacci_sphere(count: int) -> Vector:
    """Quasi-uniform unit directions on the 2-sphere."""
    index = np.arange(count, dtype=np.float64) + 0.5
    z = 1.0 - 2.0 * index / count
    radius = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = index * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([radius * np.cos(phi), radius * np.sin(phi), z])


# =============================================================================
# Hyperplanes and planks
# =============================================================================


@attr.define(frozen=True, eq=False)
class Hyperplane:
    """The set {x : <x, normal> = offset}."""

    normal: Vector = attr.field(converter=as_direction)
    offset: float = attr.field(converter=float)

    def signed_distance(self, x: ArrayLike) -> float:
        return float(np.dot(self.normal, np.asarray(x, dtype=np.float64)) - self.offset)

    def shifted(self, distance: float) -> "Hyperplane":
        """Translate along the normal by ``distance``."""
        return Hyperplane(self.normal, self.offset + distance)


def _check_bounds(instance: "Plank", attribute: "attr.Attribute[float]", value: float) -> None:
    if value < instance.lo:
        raise PreconditionError(
            f"Plank bounds out of order: lo={instance.lo!r} > hi={value!r}"
        )


@attr.define(frozen=True, eq=False)
class Plank:
    """Closed slab {x : lo <= <x, normal> <= hi} in dimension 1, 2 or 3.

    Zero width is allowed; the covering pipeline produces such planks near a
    polyhedral apex and inflates them afterwards.
    """

    normal: Vector = attr.field(converter=as_direction)
    lo: float = attr.field(converter=float)
    hi: float = attr.field(converter=float, validator=_check_bounds)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def dim(self) -> int:
        return int(self.normal.shape[0])

    @property
    def outer(self) -> Hyperplane:
        return Hyperplane(self.normal, self.hi)

    @property
    def inner(self) -> Hyperplane:
        return Hyperplane(self.normal, self.lo)

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: ArrayLike, tol: float = 0.0) -> bool:
        value = float(np.dot(np.asarray(x, dtype=np.float64), self.normal))
        return self.lo - tol <= value <= self.hi + tol

    def contains_points(self, points: ArrayLike, tol: float = 0.0) -> NDArray[np.bool_]:
        values = np.asarray(points, dtype=np.float64) @ self.normal
        return (values >= self.lo - tol) & (values <= self.hi + tol)

    def inflated(self, kappa: float) -> "Plank":
        """Grow symmetrically about the central hyperplane; width grows by 2*kappa."""
        return Plank(self.normal, self.lo - kappa, self.hi + kappa)


# =============================================================================
# Boundary pieces of planar bodies
# =============================================================================


@attr.define(frozen=True, eq=False)
class Segment:
    """Straight boundary piece traversed from ``start`` to ``end``."""

    start: Vector = attr.field(converter=as_vector)
    end: Vector = attr.field(converter=as_vector)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    @property
    def direction(self) -> Vector:
        return as_direction(self.end - self.start)

    def point(self, s: float) -> Vector:
        return self.start + (s / self.length) * (self.end - self.start)

    def tangent(self, s: float) -> Vector:  # noqa: ARG002
        return self.direction

    @property
    def start_tangent(self) -> Vector:
        return self.direction

    @property
    def end_tangent(self) -> Vector:
        return self.direction

    @property
    def turn(self) -> float:
        return 0.0

    def support_many(self, directions: Vector) -> NDArray[np.float64]:
        return np.maximum(directions @ self.start, directions @ self.end)

    def extreme_points(self, u: Vector, level: float, tol: float) -> list[Vector]:
        return [p for p in (self.start, self.end) if float(p @ u) >= level - tol]

    def distance_many(self, points: Vector) -> NDArray[np.float64]:
        delta = self.end - self.start
        rel = points - self.start
        s = np.clip(rel @ delta / float(delta @ delta), 0.0, 1.0)
        return np.linalg.norm(rel - np.outer(s, delta), axis=1)

    def locate(self, x: Vector, tol: float) -> Optional[float]:
        """Arc-length parameter of ``x`` on the piece, or None if off it."""
        if float(self.distance_many(x[None, :])[0]) > tol:
            return None
        s = float((x - self.start) @ self.direction)
        return min(max(s, 0.0), self.length)

    def line_crossings(self, normal: Vector, level: float) -> list[float]:
        """Parameters where <x, normal> = level along the piece."""
        a = float(self.start @ normal) - level
        b = float(self.end @ normal) - level
        if a == b:
            return [0.0, self.length] if a == 0.0 else []
        lam = a / (a - b)
        if -1e-15 <= lam <= 1.0 + 1e-15:
            return [min(max(lam, 0.0), 1.0) * self.length]
        return []

    def samples(self, count: int) -> Vector:
        lam = np.linspace(0.0, 1.0, count)
        return self.start + np.outer(lam, self.end - self.start)

    def transformed(self, rotation: Vector, scale: float, translation: Vector) -> "Segment":
        return Segment(
            scale * rotation @ self.start + translation,
            scale * rotation @ self.end + translation,
        )


@attr.define(frozen=True, eq=False)
class Arc:
    """Circular boundary piece traversed counterclockwise.

    Attributes:
        center: Circle centre.
        radius: Circle radius (> 0).
        start_angle: Polar angle of the first point (radians).
        end_angle: Polar angle of the last point, ``start_angle < end_angle``.
    """

    center: Vector = attr.field(converter=as_vector)
    radius: float = attr.field(converter=float)
    start_angle: float = attr.field(converter=float)
    end_angle: float = attr.field(converter=float)

    def __attrs_post_init__(self) -> None:
        if not self.radius > 0.0:
            raise InvalidBodyError(f"Arc radius must be positive, got {self.radius!r}")
        span = self.end_angle - self.start_angle
        if not 0.0 < span <= TWO_PI + 1e-12:
            raise InvalidBodyError(
                f"Arc must run counterclockwise with span in (0, 2*pi], got {span!r}"
            )

    @property
    def span(self) -> float:
        return self.end_angle - self.start_angle

    @property
    def length(self) -> float:
        return self.radius * self.span

    @property
    def start(self) -> Vector:
        return self.center + self.radius * unit_circle(self.start_angle)

    @property
    def end(self) -> Vector:
        return self.center + self.radius * unit_circle(self.end_angle)

    def point(self, s: float) -> Vector:
        return self.center + self.radius * unit_circle(self.start_angle + s / self.radius)

    def tangent(self, s: float) -> Vector:
        return perp(unit_circle(self.start_angle + s / self.radius))

    @property
    def start_tangent(self) -> Vector:
        return perp(unit_circle(self.start_angle))

    @property
    def end_tangent(self) -> Vector:
        return perp(unit_circle(self.end_angle))

    @property
    def turn(self) -> float:
        return self.span

    def covers_angle(self, angle: Union[float, NDArray[np.float64]]) -> NDArray[np.bool_]:
        offset = wrap_angle(np.asarray(angle) - self.start_angle)
        return offset <= self.span + 1e-15

    def support_many(self, directions: Vector) -> NDArray[np.float64]:
        angles = np.arctan2(directions[:, 1], directions[:, 0])
        inside = self.covers_angle(angles)
        ends = np.maximum(directions @ self.start, directions @ self.end)
        return np.where(inside, directions @ self.center + self.radius, ends)

    def extreme_points(self, u: Vector, level: float, tol: float) -> list[Vector]:
        angle = math.atan2(float(u[1]), float(u[0]))
        candidates = [self.start, self.end]
        if bool(self.covers_angle(angle)):
            candidates.append(self.center + self.radius * unit_circle(angle))
        return [p for p in candidates if float(p @ u) >= level - tol]

    def distance_many(self, points: Vector) -> NDArray[np.float64]:
        rel = points - self.center
        angles = np.arctan2(rel[:, 1], rel[:, 0])
        radial = np.abs(np.linalg.norm(rel, axis=1) - self.radius)
        ends = np.minimum(
            np.linalg.norm(points - self.start, axis=1),
            np.linalg.norm(points - self.end, axis=1),
        )
        return np.where(self.covers_angle(angles), radial, ends)

    def locate(self, x: Vector, tol: float) -> Optional[float]:
        if float(self.distance_many(x[None, :])[0]) > tol:
            return None
        rel = x - self.center
        offset = float(wrap_angle(math.atan2(float(rel[1]), float(rel[0])) - self.start_angle))
        if offset > self.span:
            # Within tolerance of an endpoint but past it in angle.
            offset = self.span if offset - self.span < TWO_PI - offset else 0.0
        return offset * self.radius

    def line_crossings(self, normal: Vector, level: float) -> list[float]:
        # r * cos(theta - phi) = level - <center, normal>
        rhs = (level - float(self.center @ normal)) / self.radius
        if abs(rhs) > 1.0:
            return []
        phi = math.atan2(float(normal[1]), float(normal[0]))
        half = math.acos(min(1.0, max(-1.0, rhs)))
        found = []
        for theta in (phi - half, phi + half):
            offset = float(wrap_angle(theta - self.start_angle))
            if offset <= self.span + 1e-12:
                found.append(min(offset, self.span) * self.radius)
        return sorted(set(found))

    def samples(self, count: int) -> Vector:
        angles = np.linspace(self.start_angle, self.end_angle, count)
        return self.center + self.radius * np.column_stack([np.cos(angles), np.sin(angles)])

    def split(self, max_span: float = MAX_ARC_SPAN) -> list["Arc"]:
        parts = max(1, math.ceil(self.span / max_span - 1e-12))
        bounds = np.linspace(self.start_angle, self.end_angle, parts + 1)
        return [
            Arc(self.center, self.radius, float(a), float(b))
            for a, b in zip(bounds[:-1], bounds[1:])
        ]

    def transformed(self, rotation: Vector, scale: float, translation: Vector) -> "Arc":
        angle = math.atan2(float(rotation[1, 0]), float(rotation[0, 0]))
        return Arc(
            scale * rotation @ self.center + translation,
            scale * self.radius,
            self.start_angle + angle,
            self.end_angle + angle,
        )


Piece = Union[Segment, Arc]


# =============================================================================
# Planar bodies
# =============================================================================


def _normalize_pieces(pieces: Iterable[Piece]) -> tuple[Piece, ...]:
    normalized: list[Piece] = []
    for piece in pieces:
        if isinstance(piece, Arc):
            normalized.extend(piece.split())
        elif isinstance(piece, Segment):
            if piece.length > 1e-12:
                normalized.append(piece)
        else:
            raise InvalidBodyError(f"Unknown boundary piece {piece!r}")
    return tuple(normalized)


def _signed_turn(before: Vector, after: Vector) -> float:
    return math.atan2(cross2(before, after), float(before @ after))


def outward_normal(tangent: Vector) -> Vector:
    """Outward normal of a counterclockwise boundary with the given tangent."""
    return np.array([tangent[1], -tangent[0]], dtype=np.float64)


@attr.define(frozen=True, eq=False)
class Body2:
    """Planar convex body bounded by a counterclockwise chain of pieces.

    Arcs are split into sub-arcs spanning at most a quarter turn, so the polygon
    through the piece endpoints (the chord polygon) always has nonempty
    interior and the body is that polygon plus one circular cap per arc.
    """

    pieces: tuple[Piece, ...] = attr.field(converter=_normalize_pieces)
    _cumulative: Vector = attr.field(init=False, repr=False)
    _junction_turns: Vector = attr.field(init=False, repr=False)

    def __attrs_post_init__(self) -> None:
        tol = get_tolerances().geometric
        count = len(self.pieces)
        if count < 2:
            raise InvalidBodyError("A planar body needs at least two boundary pieces")

        turns = []
        for index, piece in enumerate(self.pieces):
            following = self.pieces[(index + 1) % count]
            gap = float(np.linalg.norm(piece.end - following.start))
            if gap > tol:
                raise InvalidBodyError(
                    f"Boundary chain is not closed: piece {index} ends {gap:.3e} "
                    f"away from the start of piece {(index + 1) % count}"
                )
            turns.append(_signed_turn(piece.end_tangent, following.start_tangent))

        junction_turns = np.roll(np.array(turns), 1)  # turn at the start of piece i
        if np.any(junction_turns < -tol):
            raise InvalidBodyError("Boundary is not convex: outward normal turns clockwise")
        if np.any(junction_turns > math.pi - 1e-12):
            raise InvalidBodyError("Boundary has a cusp (turn of pi at a vertex)")

        total = float(junction_turns.sum() + sum(p.turn for p in self.pieces))
        if abs(total - TWO_PI) > 1e-6:
            raise InvalidBodyError(
                f"Boundary must turn exactly once around (total turn {total:.9f})"
            )

        area = self.chord_area + sum(
            0.5 * p.radius**2 * (p.span - math.sin(p.span))
            for p in self.pieces
            if isinstance(p, Arc)
        )
        if area <= tol:
            raise InvalidBodyError("Body has empty interior")

        lengths = np.array([p.length for p in self.pieces])
        object.__setattr__(self, "_cumulative", np.concatenate([[0.0], np.cumsum(lengths)]))
        object.__setattr__(self, "_junction_turns", junction_turns)

    # -- constructors -------------------------------------------------------

    @classmethod
    def polygon(cls, vertices: ArrayLike) -> "Body2":
        """Polygon through ``vertices`` (counterclockwise; clockwise input is reversed)."""
        points = np.asarray(vertices, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 3:
            raise InvalidBodyError("A polygon needs at least three planar vertices")
        signed_area = 0.5 * float(
            np.sum(points[:, 0] * np.roll(points[:, 1], -1) - np.roll(points[:, 0], -1) * points[:, 1])
        )
        if signed_area < 0.0:
            logger.debug("Polygon given clockwise; reversing vertex order")
            points = points[::-1]
        count = len(points)
        return cls(tuple(Segment(points[i], points[(i + 1) % count]) for i in range(count)))

    @classmethod
    def from_pieces(cls, pieces: Iterable[Piece]) -> "Body2":
        return cls(tuple(pieces))

    @classmethod
    def regular_polygon(cls, sides: int, circumradius: float = 1.0, rotation: float = 0.0) -> "Body2":
        """Regular polygon centred at the origin, first vertex at angle ``rotation``."""
        if sides < 3:
            raise InvalidBodyError(f"A regular polygon needs at least 3 sides, got {sides}")
        return cls.polygon([circumradius * unit_circle(rotation + k * TWO_PI / sides) for k in range(sides)])

    @classmethod
    def disc(cls, center: ArrayLike = (0.0, 0.0), radius: float = 1.0) -> "Body2":
        return cls((Arc(center, radius, 0.0, TWO_PI),))

    @classmethod
    def reuleaux_triangle(
        cls, width: float = 1.0, center: ArrayLike = (0.0, 0.0), rotation: float = 0.0
    ) -> "Body2":
        """Reuleaux triangle of the given constant width, first vertex at the top."""
        origin = np.asarray(center, dtype=np.float64)
        circumradius = width / math.sqrt(3.0)
        corners = [
            origin + circumradius * unit_circle(rotation + math.pi / 2 + k * TWO_PI / 3)
            for k in range(3)
        ]
        arcs = []
        for k in range(3):
            start, end, pivot = corners[k], corners[(k + 1) % 3], corners[(k + 2) % 3]
            a0 = math.atan2(*(start - pivot)[::-1])
            a1 = math.atan2(*(end - pivot)[::-1])
            while a1 <= a0:
                a1 += TWO_PI
            arcs.append(Arc(pivot, width, a0, a1))
        return cls(tuple(arcs))

    @classmethod
    def semicircle(cls, radius: float = 1.0) -> "Body2":
        """Upper half disc with its diameter on the x-axis."""
        return cls(
            (
                Arc((0.0, 0.0), radius, 0.0, math.pi),
                Segment((-radius, 0.0), (radius, 0.0)),
            )
        )

    # -- structure ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return 2

    @property
    def vertices(self) -> Vector:
        """Chord polygon: the start point of every piece, counterclockwise."""
        return np.array([p.start for p in self.pieces])

    @property
    def has_arcs(self) -> bool:
        return any(isinstance(p, Arc) for p in self.pieces)

    @property
    def chord_area(self) -> float:
        v = self.vertices
        return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))

    @property
    def perimeter(self) -> float:
        return float(self._cumulative[-1])

    def kinks(self, tol: Optional[float] = None) -> list[int]:
        """Indices i such that the boundary has a corner at the start of piece i."""
        tol = get_tolerances().geometric if tol is None else tol
        return [i for i, turn in enumerate(self._junction_turns) if turn > tol]

    def junction_at(self, x: ArrayLike, tol: Optional[float] = None) -> Optional[int]:
        """Index of the piece whose start point is within ``tol`` of ``x``, if any."""
        tol = get_tolerances().geometric if tol is None else tol
        distances = np.linalg.norm(self.vertices - np.asarray(x, dtype=np.float64), axis=1)
        index = int(np.argmin(distances))
        return index if float(distances[index]) <= tol else None

    def normal_cone(self, index: int) -> tuple[Vector, Vector]:
        """Outward normals bounding the normal cone at the start of piece ``index``."""
        before = self.pieces[index - 1].end_tangent
        after = self.pieces[index].start_tangent
        return outward_normal(before), outward_normal(after)

    # -- support ------------------------------------------------------------

    def support_many(self, directions: ArrayLike) -> NDArray[np.float64]:
        dirs = np.atleast_2d(np.asarray(directions, dtype=np.float64))
        return np.max([p.support_many(dirs) for p in self.pieces], axis=0)

    def support(self, u: ArrayLike) -> float:
        return float(self.support_many(np.asarray(u, dtype=np.float64)[None, :])[0])

    def width(self, u: ArrayLike) -> float:
        direction = np.asarray(u, dtype=np.float64)
        return self.support(direction) + self.support(-direction)

    def support_points(self, u: ArrayLike, tol: Optional[float] = None) -> Vector:
        """Points of the support set in direction ``u`` (endpoints/extremes)."""
        tol = get_tolerances().geometric if tol is None else tol
        direction = np.asarray(u, dtype=np.float64)
        level = self.support(direction)
        found: list[Vector] = []
        for piece in self.pieces:
            for point in piece.extreme_points(direction, level, tol):
                if all(np.linalg.norm(point - q) > tol for q in found):
                    found.append(point)
        return np.array(found)

    # -- membership and distances -------------------------------------------

    def boundary_distance_many(self, points: ArrayLike) -> NDArray[np.float64]:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.min([p.distance_many(pts) for p in self.pieces], axis=0)

    def contains_points(
        self, points: ArrayLike, tol: float = 0.0, strict: bool = False
    ) -> NDArray[np.bool_]:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        inside_chords = np.ones(len(pts), dtype=bool)
        in_cap = np.zeros(len(pts), dtype=bool)
        for piece in self.pieces:
            edge = piece.end - piece.start
            side = (edge[0] * (pts[:, 1] - piece.start[1]) - edge[1] * (pts[:, 0] - piece.start[0])) / float(np.linalg.norm(edge))
            inside_chords &= side >= -tol
            if isinstance(piece, Arc):
                radial = np.linalg.norm(pts - piece.center, axis=1)
                in_cap |= (side <= tol) & (radial <= piece.radius + tol)
        inside = inside_chords | in_cap
        if strict:
            inside &= self.boundary_distance_many(pts) > tol
        return inside

    def contains(self, x: ArrayLike, tol: float = 0.0, strict: bool = False) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=np.float64)[None, :], tol, strict)[0])

    def distance_to_complement(self, x: ArrayLike) -> float:
        point = np.asarray(x, dtype=np.float64)
        if not self.contains(point, tol=get_tolerances().membership):
            return 0.0
        return float(self.boundary_distance_many(point[None, :])[0])

    # -- arc-length parametrization -----------------------------------------

    def piece_at(self, s: float, forward: bool = True) -> tuple[int, float]:
        s = float(np.mod(s, self.perimeter))
        side = "right" if forward else "left"
        index = int(np.searchsorted(self._cumulative, s, side=side)) - 1
        index = min(max(index, 0), len(self.pieces) - 1)
        if not forward and s == 0.0:
            index = len(self.pieces) - 1
            return index, self.pieces[index].length
        return index, s - float(self._cumulative[index])

    def piece_start(self, index: int) -> float:
        return float(self._cumulative[index])

    def point_at(self, s: float) -> Vector:
        index, local = self.piece_at(s)
        return self.pieces[index].point(local)

    def tangent_at(self, s: float, forward: bool = True) -> Vector:
        """Unit tangent at arc length ``s``; at a corner, the forward or backward one."""
        index, local = self.piece_at(s, forward)
        return self.pieces[index].tangent(local)

    def locate(self, x: ArrayLike, tol: Optional[float] = None) -> float:
        """Arc-length parameter of a boundary point.

        Raises:
            NotOnBoundaryError: If ``x`` is farther than ``tol`` from the boundary.
        """
        tol = get_tolerances().geometric if tol is None else tol
        point = np.asarray(x, dtype=np.float64)
        # A point at a junction maps to the exact piece start.
        junction = self.junction_at(point, tol)
        if junction is not None:
            return float(self._cumulative[junction])
        best: Optional[tuple[float, float]] = None
        for index, piece in enumerate(self.pieces):
            local = piece.locate(point, tol)
            if local is None:
                continue
            distance = float(np.linalg.norm(piece.point(local) - point))
            if best is None or distance < best[0] - 1e-15:
                best = (distance, float(self._cumulative[index]) + local)
        if best is None:
            raise NotOnBoundaryError(f"Point {point.tolist()} is not on the boundary")
        return float(np.mod(best[1], self.perimeter))

    def boundary_samples(self, count: int) -> Vector:
        """Boundary points evenly spaced in arc length, plus every piece start."""
        params = np.linspace(0.0, self.perimeter, count, endpoint=False)
        points = [self.point_at(float(s)) for s in params]
        return np.vstack([np.array(points), self.vertices])

    def inward_normals(self, points: Vector) -> Vector:
        """Inward unit normals at boundary points (forward tangent convention)."""
        return np.array([perp(self.tangent_at(self.locate(p))) for p in points])

    # -- sections and maps --------------------------------------------------

    def section(self, t: float) -> Optional[tuple[float, float]]:
        """The chord {x : (x, t) in K} as an interval of x, or None if empty."""
        normal = np.array([0.0, 1.0])
        xs = [
            float(piece.point(s)[0])
            for piece in self.pieces
            for s in piece.line_crossings(normal, t)
        ]
        if not xs:
            return None
        return min(xs), max(xs)

    def transformed(self, rotation: ArrayLike, scale: float, translation: ArrayLike) -> "Body2":
        """Image under x -> scale * rotation @ x + translation (proper rotation)."""
        matrix = np.asarray(rotation, dtype=np.float64)
        shift = np.asarray(translation, dtype=np.float64)
        if scale <= 0.0 or np.linalg.det(matrix) <= 0.0:
            raise PreconditionError("Similarities must have positive scale and preserve orientation")
        return Body2(tuple(p.transformed(matrix, scale, shift) for p in self.pieces))

    def scaled(self, factor: float) -> "Body2":
        return self.transformed(np.eye(2), factor, np.zeros(2))

    def translated(self, shift: ArrayLike) -> "Body2":
        return self.transformed(np.eye(2), 1.0, shift)

    def extreme_points(self, samples_per_arc: int = 64) -> Vector:
        """Chord polygon vertices plus dense points on every arc."""
        extra = [p.samples(samples_per_arc) for p in self.pieces if isinstance(p, Arc)]
        return np.vstack([self.vertices, *extra]) if extra else self.vertices


# =============================================================================
# Solid polytopes
# =============================================================================


def _hull_points(points: ArrayLike) -> Vector:
    """Deduplicate, reject degenerate input, keep only hull vertices."""
    raw = np.asarray(points, dtype=np.float64)
    if raw.ndim != 2 or raw.shape[1] != 3:
        raise InvalidBodyError("Polytope vertices must be a list of 3D points")
    tol = get_tolerances().geometric
    unique: list[Vector] = []
    for point in raw:
        if all(float(np.linalg.norm(point - q)) > tol for q in unique):
            unique.append(point)
    cloud = np.array(unique)
    if len(cloud) < 4 or np.linalg.matrix_rank(cloud - cloud.mean(axis=0), tol=tol) < 3:
        raise InvalidBodyError("Polytope vertices span fewer than three dimensions")
    try:
        hull = ConvexHull(cloud)
    except QhullError as e:
        raise InvalidBodyError(f"Convex hull construction failed: {e}") from e
    return as_vector(cloud[np.sort(hull.vertices)])


@attr.define(frozen=True, eq=False)
class Polytope3:
    """Convex polytope in R^3 given by its vertices.

    Attributes:
        vertices: Hull vertices after deduplication (k x 3).
        facet_normals: Outward unit normals of the (merged) facets.
        facet_offsets: Offsets h with facet = {x : <x, n> = h}.
        triangles: Triangulated hull as vertex index triples.
        edges: Vertex index pairs of true edges (not triangulation diagonals).
    """

    vertices: Vector = attr.field(converter=_hull_points)
    facet_normals: Vector = attr.field(init=False, repr=False)
    facet_offsets: Vector = attr.field(init=False, repr=False)
    triangles: NDArray[np.int64] = attr.field(init=False, repr=False)
    edges: NDArray[np.int64] = attr.field(init=False, repr=False)

    def __attrs_post_init__(self) -> None:
        hull = ConvexHull(self.vertices)
        normals: list[Vector] = []
        offsets: list[float] = []
        triangle_facet: list[int] = []
        for equation in hull.equations:
            normal, offset = equation[:3], -float(equation[3])
            for index, (known, level) in enumerate(zip(normals, offsets)):
                if np.allclose(known, normal, atol=1e-7) and abs(level - offset) <= 1e-7:
                    triangle_facet.append(index)
                    break
            else:
                normals.append(normal)
                offsets.append(offset)
                triangle_facet.append(len(normals) - 1)

        edge_facets: dict[tuple[int, int], set[int]] = {}
        for simplex, facet in zip(hull.simplices, triangle_facet):
            for a, b in ((0, 1), (1, 2), (0, 2)):
                key = (int(min(simplex[a], simplex[b])), int(max(simplex[a], simplex[b])))
                edge_facets.setdefault(key, set()).add(facet)
        edges = sorted(key for key, facets in edge_facets.items() if len(facets) >= 2)

        object.__setattr__(self, "facet_normals", np.array(normals))
        object.__setattr__(self, "facet_offsets", np.array(offsets))
        object.__setattr__(self, "triangles", np.array(hull.simplices, dtype=np.int64))
        object.__setattr__(self, "edges", np.array(edges, dtype=np.int64))

    @classmethod
    def pyramid(cls, half_side: float = 0.5, height: float = 0.5) -> "Polytope3":
        """Square pyramid with apex at the origin and base at z = height."""
        s = half_side
        return cls([(0, 0, 0), (s, s, height), (-s, s, height), (-s, -s, height), (s, -s, height)])

    @property
    def dim(self) -> int:
        return 3

    @property
    def centroid(self) -> Vector:
        return self.vertices.mean(axis=0)

    def support_many(self, directions: ArrayLike) -> NDArray[np.float64]:
        dirs = np.atleast_2d(np.asarray(directions, dtype=np.float64))
        return np.max(self.vertices @ dirs.T, axis=0)

    def support(self, u: ArrayLike) -> float:
        return float(np.max(self.vertices @ np.asarray(u, dtype=np.float64)))

    def width(self, u: ArrayLike) -> float:
        values = self.vertices @ np.asarray(u, dtype=np.float64)
        return float(values.max() - values.min())

    def support_points(self, u: ArrayLike, tol: Optional[float] = None) -> Vector:
        tol = get_tolerances().geometric if tol is None else tol
        values = self.vertices @ np.asarray(u, dtype=np.float64)
        return self.vertices[values >= values.max() - tol]

    def contains_points(
        self, points: ArrayLike, tol: float = 0.0, strict: bool = False
    ) -> NDArray[np.bool_]:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        slack = pts @ self.facet_normals.T - self.facet_offsets
        if strict:
            return np.all(slack < -tol, axis=1)
        return np.all(slack <= tol, axis=1)

    def contains(self, x: ArrayLike, tol: float = 0.0, strict: bool = False) -> bool:
        return bool(self.contains_points(np.asarray(x, dtype=np.float64)[None, :], tol, strict)[0])

    def boundary_distance_many(self, points: ArrayLike) -> NDArray[np.float64]:
        """Distance to the boundary for points inside the polytope."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.min(self.facet_offsets - pts @ self.facet_normals.T, axis=1)

    def distance_to_complement(self, x: ArrayLike) -> float:
        point = np.asarray(x, dtype=np.float64)
        if not self.contains(point, tol=get_tolerances().membership):
            return 0.0
        return max(0.0, float(self.boundary_distance_many(point[None, :])[0]))

    def vertex_index(self, x: ArrayLike, tol: Optional[float] = None) -> Optional[int]:
        tol = get_tolerances().geometric if tol is None else tol
        distances = np.linalg.norm(self.vertices - np.asarray(x, dtype=np.float64), axis=1)
        index = int(np.argmin(distances))
        return index if distances[index] <= tol else None

    def neighbors(self, index: int) -> list[int]:
        return sorted(
            int(b) if int(a) == index else int(a)
            for a, b in self.edges
            if index in (int(a), int(b))
        )

    def incident_facets(self, x: ArrayLike, tol: Optional[float] = None) -> list[int]:
        tol = get_tolerances().geometric if tol is None else tol
        slack = self.facet_normals @ np.asarray(x, dtype=np.float64) - self.facet_offsets
        return [int(i) for i in np.flatnonzero(np.abs(slack) <= tol)]

    def edge_directions(self) -> Vector:
        starts, ends = self.vertices[self.edges[:, 0]], self.vertices[self.edges[:, 1]]
        delta = ends - starts
        return delta / np.linalg.norm(delta, axis=1)[:, None]

    def section(self, t: float) -> Optional["SectionPolygon"]:
        """Slice {x in K : x_3 = t}, or None when empty or lower-dimensional."""
        tol = get_tolerances().geometric
        heights = self.vertices[:, 2]
        points = [v[:2] for v in self.vertices if abs(v[2] - t) <= tol]
        for a, b in self.edges:
            za, zb = heights[a] - t, heights[b] - t
            if za * zb < 0.0 and abs(za) > tol and abs(zb) > tol:
                lam = za / (za - zb)
                points.append(((1.0 - lam) * self.vertices[a] + lam * self.vertices[b])[:2])
        return SectionPolygon.from_points(t, points)

    def transformed(self, rotation: ArrayLike, scale: float, translation: ArrayLike) -> "Polytope3":
        matrix = np.asarray(rotation, dtype=np.float64)
        if scale <= 0.0 or np.linalg.det(matrix) <= 0.0:
            raise PreconditionError("Similarities must have positive scale and preserve orientation")
        moved = scale * self.vertices @ matrix.T + np.asarray(translation, dtype=np.float64)
        return Polytope3(moved)

    def scaled(self, factor: float) -> "Polytope3":
        return self.transformed(np.eye(3), factor, np.zeros(3))

    def translated(self, shift: ArrayLike) -> "Polytope3":
        return self.transformed(np.eye(3), 1.0, shift)

    def extreme_points(self) -> Vector:
        return self.vertices

    def face_triangles(self) -> Vector:
        """Triangulated boundary as an (m, 3, 3) array."""
        return self.vertices[self.triangles]


ConvexBody = Union[Body2, Polytope3]


# =============================================================================
# Sections
# =============================================================================


@attr.define(frozen=True, eq=False)
class SectionPolygon:
    """Slice of a body or cone by the hyperplane H_t = {x_d = t}.

    ``vertices`` hold the first d-1 coordinates: a sorted pair of abscissae for
    planar slices, a counterclockwise convex polygon for solid slices.
    """

    height: float = attr.field(converter=float)
    vertices: Vector = attr.field(converter=as_vector)

    @classmethod
    def from_points(cls, height: float, points: Sequence[ArrayLike]) -> Optional["SectionPolygon"]:
        if len(points) == 0:
            return None
        cloud = np.array(points, dtype=np.float64)
        if cloud.shape[1] == 1:
            low, high = float(cloud.min()), float(cloud.max())
            return cls(height, [[low], [high]])
        if len(cloud) < 3 or np.linalg.matrix_rank(cloud - cloud.mean(axis=0), tol=1e-12) < 2:
            return None
        try:
            hull = ConvexHull(cloud)
        except QhullError:
            return None
        # 2D hulls from Qhull list vertices counterclockwise.
        return cls(height, cloud[hull.vertices])

    @property
    def dim(self) -> int:
        """Dimension of the ambient space the slice lives in."""
        return int(self.vertices.shape[1]) + 1

    @property
    def perimeter(self) -> float:
        if self.vertices.shape[1] == 1:
            return float(self.vertices[1, 0] - self.vertices[0, 0])
        return float(np.sum(np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)))

    def lifted(self) -> Vector:
        """Vertices as points of R^d."""
        return np.column_stack([self.vertices, np.full(len(self.vertices), self.height)])

    def as_body(self) -> Body2:
        if self.vertices.shape[1] != 2:
            raise PreconditionError("Only solid slices are planar bodies")
        return Body2.polygon(self.vertices)

    def edge_planes(self) -> list[tuple[Vector, float]]:
        """Outward normal and offset of every edge line (in-plane coordinates)."""
        if self.vertices.shape[1] == 1:
            low, high = float(self.vertices[0, 0]), float(self.vertices[1, 0])
            return [(np.array([-1.0]), -low), (np.array([1.0]), high)]
        planes = []
        count = len(self.vertices)
        for i in range(count):
            a, b = self.vertices[i], self.vertices[(i + 1) % count]
            normal = outward_normal(as_direction(b - a))
            planes.append((normal, float(normal @ a)))
        return planes

    @property
    def width(self) -> float:
        """Minimal width of the slice within its hyperplane."""
        if self.vertices.shape[1] == 1:
            return self.perimeter
        return float(np.min(_caliper_widths(self.vertices)))

    def contains_points(self, points: ArrayLike, tol: float = 0.0, strict: bool = False) -> NDArray[np.bool_]:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        inside = np.ones(len(pts), dtype=bool)
        for normal, offset in self.edge_planes():
            slack = pts @ normal - offset
            inside &= (slack < -tol) if strict else (slack <= tol)
        return inside


class RaySet(Protocol):
    """Anything with an apex and generator rays, such as a tangent cone."""

    apex: Vector
    rays: Vector


def cone_section(apex: Vector, rays: Vector, t: float) -> SectionPolygon:
    """Slice {apex + s*g : s >= 0} of a pointed cone at height x_d = t.

    Raises:
        PreconditionError: If a ray does not climb (the slice would be unbounded).
    """
    tol = get_tolerances().geometric
    climb = rays[:, -1]
    if np.any(climb <= tol):
        raise PreconditionError("Cone rays must all point upward to give a bounded slice")
    scale = (t - float(apex[-1])) / climb
    if np.any(scale < 0.0):
        raise PreconditionError(f"Height {t!r} lies below the cone apex")
    points = apex[None, :-1] + scale[:, None] * rays[:, :-1]
    section = SectionPolygon.from_points(t, list(points))
    if section is None:
        raise PreconditionError(f"Cone slice at height {t!r} is degenerate")
    return section


def cross_section(obj: Union[ConvexBody, RaySet], t: float) -> SectionPolygon:
    """Slice of a polytope, planar body or cone by H_t = {x_d = t}.

    Raises:
        PreconditionError: If t <= 0 or the slice is empty or degenerate.
    """
    if t <= 0.0:
        raise PreconditionError(f"Section height must be positive, got {t!r}")
    if isinstance(obj, Polytope3):
        section = obj.section(t)
    elif isinstance(obj, Body2):
        chord = obj.section(t)
        section = None if chord is None else SectionPolygon(t, [[chord[0]], [chord[1]]])
    else:
        return cone_section(np.asarray(obj.apex, dtype=np.float64), np.asarray(obj.rays, dtype=np.float64), t)
    if section is None:
        raise PreconditionError(f"Slice at height {t!r} is empty")
    return section


# =============================================================================
# Width
# =============================================================================


def _caliper_widths(vertices: Vector) -> NDArray[np.float64]:
    """Width of a convex CCW polygon across each edge, by rotating calipers."""
    count = len(vertices)
    widths = np.empty(count)
    antipode = 1

    def height(edge: int, vertex: int) -> float:
        a, b = vertices[edge], vertices[(edge + 1) % count]
        return cross2(b - a, vertices[vertex % count] - a) / float(np.linalg.norm(b - a))

    for edge in range(count):
        steps = 0
        while steps < count and height(edge, antipode + 1) > height(edge, antipode):
            antipode += 1
            steps += 1
        widths[edge] = height(edge, antipode)
    return widths


@attr.define(frozen=True, eq=False)
class WidthMinimizers:
    """Minimal width and every direction attaining it (both orientations).

    ``preferred`` directions are tried first by the spiky search: normal-cone
    bisectors at boundary corners of arc-gons.
    """

    width: float
    preferred: tuple[Vector, ...]
    directions: tuple[Vector, ...]

    @property
    def all_directions(self) -> tuple[Vector, ...]:
        return self.preferred + self.directions


def _dedup_sorted(directions: Iterable[Vector]) -> tuple[Vector, ...]:
    unique: dict[tuple[float, ...], Vector] = {}
    for direction in directions:
        unique.setdefault(lexicographic_key(direction), direction)
    return tuple(unique[key] for key in sorted(unique))


def _with_opposites(directions: Iterable[Vector]) -> list[Vector]:
    out = []
    for direction in directions:
        out.extend([direction, -direction])
    return out


def _planar_minimizers(body: Body2) -> WidthMinimizers:
    settings = get_tolerances()
    tol = settings.geometric

    if not body.has_arcs:
        vertices = body.vertices
        widths = _caliper_widths(vertices)
        best = float(widths.min())
        normals = [
            outward_normal(as_direction(vertices[(i + 1) % len(vertices)] - vertices[i]))
            for i in np.flatnonzero(widths <= best + tol)
        ]
        return WidthMinimizers(best, (), _dedup_sorted(_with_opposites(normals)))

    thetas = np.linspace(0.0, math.pi, settings.width_grid, endpoint=False)
    grid = np.column_stack([np.cos(thetas), np.sin(thetas)])
    values = body.support_many(grid) + body.support_many(-grid)

    bisectors = []
    for index in body.kinks():
        before, after = body.normal_cone(index)
        bisectors.append(as_direction(before + after))
    edge_normals = [
        outward_normal(p.direction) for p in body.pieces if isinstance(p, Segment)
    ]

    candidates: list[Vector] = list(bisectors) + edge_normals
    if float(np.ptp(values)) <= tol:
        logger.debug("Width function is constant on the grid; treating body as constant width")
        candidates.extend(grid)
    else:
        left, right = np.roll(values, 1), np.roll(values, -1)
        minima = np.flatnonzero((values <= left) & (values <= right))
        minima = minima[np.argsort(values[minima], kind="stable")][:64]
        step = thetas[1] - thetas[0]
        for index in minima:
            result = minimize_scalar(
                lambda th: body.width(unit_circle(th)),
                bounds=(thetas[index] - step, thetas[index] + step),
                method="bounded",
                options={"xatol": settings.refinement},
            )
            candidates.append(unit_circle(float(result.x)))

    widths = np.array([body.width(c) for c in candidates])
    best = float(min(widths.min(), values.min()))
    keep = [c for c, w in zip(candidates, widths) if w <= best + tol]
    preferred = _dedup_sorted(
        _with_opposites(b for b in bisectors if body.width(b) <= best + tol)
    )
    preferred_keys = {lexicographic_key(p) for p in preferred}
    rest = tuple(
        d for d in _dedup_sorted(_with_opposites(keep)) if lexicographic_key(d) not in preferred_keys
    )
    return WidthMinimizers(best, preferred, rest)


def _solid_minimizers(body: Polytope3) -> WidthMinimizers:
    settings = get_tolerances()
    tol = settings.geometric
    edge_dirs = body.edge_directions()
    crosses = [
        np.cross(edge_dirs[i], edge_dirs[j])
        for i in range(len(edge_dirs))
        for j in range(i + 1, len(edge_dirs))
    ]
    crosses = [c / np.linalg.norm(c) for c in crosses if np.linalg.norm(c) > 1e-9]
    candidates = np.vstack([body.facet_normals, *([np.array(crosses)] if crosses else [])])
    projections = body.vertices @ candidates.T
    widths = projections.max(axis=0) - projections.min(axis=0)
    best = float(widths.min())

    sweep = fibonacci_sphere(settings.sphere_sweep)
    swept = body.vertices @ sweep.T
    sweep_best = float((swept.max(axis=0) - swept.min(axis=0)).min())
    if sweep_best < best - tol:
        logger.warning(
            f"Sphere sweep found width {sweep_best!r} below candidate minimum {best!r}"
        )

    keep = [candidates[i] for i in np.flatnonzero(widths <= best + tol)]
    return WidthMinimizers(best, (), _dedup_sorted(_with_opposites(keep)))


def width_minimizers(body: ConvexBody) -> WidthMinimizers:
    """Minimal width of ``body`` together with all minimizing directions."""
    if isinstance(body, Body2):
        return _planar_minimizers(body)
    return _solid_minimizers(body)


# =============================================================================
# Public operations
# =============================================================================


def support_function(body: ConvexBody, u: ArrayLike) -> float:
    """h_K(u) = max over x in K of <x, u>."""
    return body.support(as_direction(u))


def width_in_direction(body: ConvexBody, u: ArrayLike) -> float:
    """h_K(u) + h_K(-u)."""
    return body.width(as_direction(u))


def minimal_width(body: ConvexBody) -> tuple[float, Vector]:
    """Minimal width and the lexicographically smallest direction attaining it."""
    minimizers = width_minimizers(body)
    direction = min(minimizers.all_directions, key=lexicographic_key)
    return minimizers.width, direction


def perimeter(body: Body2) -> float:
    return body.perimeter


def distance_to_complement(body: ConvexBody, x: ArrayLike) -> float:
    """dist(x, K^c): distance to the boundary for points of K, 0 outside."""
    return body.distance_to_complement(x)


def contains(body: ConvexBody, x: ArrayLike, strict: bool = False) -> bool:
    """Membership (interior membership when ``strict``)."""
    return body.contains(x, tol=get_tolerances().membership, strict=strict)


# =============================================================================
# Hausdorff distance
# =============================================================================

SetElement = Union[Vector, Sequence[float], Segment, Arc, Body2]


def _normalize_elements(items: Iterable[SetElement]) -> list[Union[Vector, Segment, Arc, Body2]]:
    elements: list[Union[Vector, Segment, Arc, Body2]] = []
    for item in items:
        if isinstance(item, (Segment, Arc, Body2)):
            elements.append(item)
        else:
            elements.append(np.asarray(item, dtype=np.float64))
    return elements


def _element_distance(points: Vector, element: Union[Vector, Segment, Arc, Body2]) -> NDArray[np.float64]:
    if isinstance(element, (Segment, Arc)):
        return element.distance_many(points)
    if isinstance(element, Body2):
        outside = element.boundary_distance_many(points)
        return np.where(element.contains_points(points), 0.0, outside)
    return np.linalg.norm(points - element, axis=1)


def _set_distance(points: Vector, elements: Sequence[Union[Vector, Segment, Arc, Body2]]) -> NDArray[np.float64]:
    pts = np.atleast_2d(points)
    return np.min([_element_distance(pts, e) for e in elements], axis=0)


def _roots_in_unit(coefficients: Sequence[float]) -> list[float]:
    coeffs = np.array(coefficients, dtype=np.float64)
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if scale == 0.0:
        return []
    coeffs = coeffs / scale
    while coeffs.size and abs(coeffs[0]) < 1e-14:
        coeffs = coeffs[1:]
    if coeffs.size < 2:
        return []
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return [float(r) for r in real if -1e-12 <= r <= 1.0 + 1e-12]


def _segment_breakpoints(segment: Segment, elements: Sequence[Union[Vector, Segment, Arc, Body2]]) -> list[float]:
    """Parameters along ``segment`` where two features of the target are equidistant.

    The distance to a union of points and segments is the lower envelope of
    convex functions, so its maximum along a segment is at an endpoint or at one
    of these crossings.
    """
    a0, v = segment.start, segment.end - segment.start
    points: list[Vector] = []
    lines: list[tuple[Vector, float]] = []
    for element in elements:
        if isinstance(element, Segment):
            points.extend([element.start, element.end])
            normal = outward_normal(element.direction)
            lines.append((normal, float(normal @ element.start)))
        else:
            points.append(np.asarray(element))

    params = [0.0, 1.0]
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            params += _roots_in_unit([2.0 * float(v @ (q - p)), float((a0 - p) @ (a0 - p) - (a0 - q) @ (a0 - q))])
        for normal, offset in lines:
            rel, nv, na = a0 - p, float(normal @ v), float(normal @ a0) - offset
            params += _roots_in_unit(
                [float(v @ v) - nv * nv, 2.0 * float(v @ rel) - 2.0 * na * nv, float(rel @ rel) - na * na]
            )
    for i, (n1, c1) in enumerate(lines):
        for n2, c2 in lines[i + 1:]:
            d1, e1 = float(n1 @ a0) - c1, float(n1 @ v)
            d2, e2 = float(n2 @ a0) - c2, float(n2 @ v)
            params += _roots_in_unit([e1 - e2, d1 - d2])
            params += _roots_in_unit([e1 + e2, d1 + d2])
    return params


def _curve_sup(piece: Union[Segment, Arc], elements: Sequence[Union[Vector, Segment, Arc, Body2]], tol: float) -> float:
    params = np.linspace(0.0, piece.length, 2049)
    values = _set_distance(np.array([piece.point(s) for s in params]), elements)
    best = int(np.argmax(values))
    step = params[1] - params[0]
    result = minimize_scalar(
        lambda s: -float(_set_distance(piece.point(min(max(s, 0.0), piece.length))[None, :], elements)[0]),
        bounds=(max(0.0, params[best] - step), min(piece.length, params[best] + step)),
        method="bounded",
        options={"xatol": tol},
    )
    return max(float(values[best]), -float(result.fun))


def _region_sup(region: Body2, elements: Sequence[Union[Vector, Segment, Arc, Body2]], tol: float) -> float:
    low, high = region.vertices.min(axis=0), region.vertices.max(axis=0)
    if region.has_arcs:
        extreme = region.extreme_points()
        low, high = extreme.min(axis=0), extreme.max(axis=0)
    center, half = 0.5 * (low + high), 0.5 * (high - low)
    best_value, best_point = 0.0, center
    for _ in range(40):
        axis = np.linspace(-1.0, 1.0, 65)
        grid = np.array(np.meshgrid(axis, axis)).reshape(2, -1).T * half + center
        grid = grid[region.contains_points(grid, tol=tol)]
        if len(grid):
            values = _set_distance(grid, elements)
            index = int(np.argmax(values))
            if values[index] >= best_value:
                best_value, best_point = float(values[index]), grid[index]
        if float(np.max(half)) < tol:
            break
        center, half = best_point, half / 8.0
    return best_value


def _directed_hausdorff(
    source: Sequence[Union[Vector, Segment, Arc, Body2]],
    target: Sequence[Union[Vector, Segment, Arc, Body2]],
    tol: float,
) -> float:
    exact_target = all(isinstance(e, Segment) or not isinstance(e, (Arc, Body2)) for e in target)
    best = 0.0
    for element in source:
        if isinstance(element, Segment):
            if exact_target and element.start.shape[0] == 2:
                params = _segment_breakpoints(element, target)
                points = element.start + np.outer(params, element.end - element.start)
                value = float(np.max(_set_distance(points, target)))
            else:
                value = _curve_sup(element, target, tol)
        elif isinstance(element, Arc):
            value = _curve_sup(element, target, tol)
        elif isinstance(element, Body2):
            value = _region_sup(element, target, tol)
        else:
            value = float(_set_distance(np.asarray(element)[None, :], target)[0])
        best = max(best, value)
    return best


def hausdorff_distance(a: Iterable[SetElement], b: Iterable[SetElement]) -> float:
    """Hausdorff distance between finite unions of points, segments, arcs and bodies.

    Exact for unions of points and segments (candidate enumeration over
    endpoints and equidistance breakpoints); arcs and filled bodies are sampled
    and locally refined to the geometric tolerance.

    Raises:
        PreconditionError: If either set is empty.
    """
    first, second = _normalize_elements(a), _normalize_elements(b)
    if not first or not second:
        raise PreconditionError("Hausdorff distance needs two nonempty sets")
    tol = get_tolerances().geometric
    return max(_directed_hausdorff(first, second, tol), _directed_hausdorff(second, first, tol))
