"""Tangent cones, spikiness and the similarity into standard position.

A body K is spiky in direction u when the supporting hyperplane H_K(u) meets K
in a single point x and even the tangent cone T_K(x) meets H_K(u) only at x.
For polytopes and arc-gons this reduces to a strict test on the generator
rays of T_K(x): every ray g must satisfy <g, u> < 0.

Standard position: spiky direction -e_d, apex at the origin, minimal width 1,
so the body lies in the slab 0 <= x_d <= 1.
"""

import logging
import math
from typing import Optional

import attr
import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import linprog
from scipy.spatial.transform import Rotation

from plankforge.errors import NotOnBoundaryError, PreconditionError
from plankforge.geometry import (
    Body2,
    ConvexBody,
    Plank,
    Polytope3,
    SectionPolygon,
    Segment,
    Vector,
    as_direction,
    as_vector,
    cone_section,
    outward_normal,
    width_minimizers,
)
from plankforge.settings import get_tolerances

logger = logging.getLogger(__name__)


# =============================================================================
# Types
# =============================================================================


@attr.define(frozen=True, eq=False)
class TangentCone:
    """Cone {apex + d : <d, n> <= 0 for every outward normal n}.

    Attributes:
        apex: Boundary point the cone is attached to.
        rays: Unit generator directions; in the plane the two boundary rays in
            counterclockwise order.
        normals: Outward unit normals of the bounding half-spaces (all pass
            through the apex).
    """

    apex: Vector = attr.field(converter=as_vector)
    rays: Vector = attr.field(converter=as_vector)
    normals: Vector = attr.field(converter=as_vector)

    @property
    def dim(self) -> int:
        return int(self.apex.shape[0])

    def section(self, t: float) -> SectionPolygon:
        return cone_section(self.apex, self.rays, t)

    def contains_points(self, points: ArrayLike, tol: float = 0.0) -> np.ndarray:
        rel = np.atleast_2d(np.asarray(points, dtype=np.float64)) - self.apex
        return np.all(rel @ self.normals.T <= tol, axis=1)


@attr.define(frozen=True, eq=False)
class SpikeWitness:
    """Certificate that a body is spiky in ``direction`` at ``apex``.

    ``aperture`` is max over the cone generators g of <g, direction>; it is
    strictly negative.
    """

    direction: Vector = attr.field(converter=as_direction)
    apex: Vector = attr.field(converter=as_vector)
    cone: TangentCone
    aperture: float


@attr.define(frozen=True, eq=False)
class Similarity:
    """x -> scale * rotation @ x + translation, with a proper rotation."""

    rotation: Vector = attr.field(converter=as_vector)
    scale: float = attr.field(converter=float)
    translation: Vector = attr.field(converter=as_vector)

    def apply(self, points: ArrayLike) -> Vector:
        pts = np.asarray(points, dtype=np.float64)
        return self.scale * pts @ self.rotation.T + self.translation

    def invert(self, points: ArrayLike) -> Vector:
        pts = np.asarray(points, dtype=np.float64)
        return (pts - self.translation) @ self.rotation / self.scale

    def apply_direction(self, u: ArrayLike) -> Vector:
        return as_direction(self.rotation @ np.asarray(u, dtype=np.float64))

    def invert_direction(self, u: ArrayLike) -> Vector:
        return as_direction(self.rotation.T @ np.asarray(u, dtype=np.float64))

    def map_body(self, body: ConvexBody) -> ConvexBody:
        return body.transformed(self.rotation, self.scale, self.translation)

    def pull_back_plank(self, plank: Plank) -> Plank:
        """Preimage of a plank: {x : lo <= <m, T(x)> <= hi}."""
        normal = self.rotation.T @ plank.normal
        shift = float(plank.normal @ self.translation)
        return Plank(normal, (plank.lo - shift) / self.scale, (plank.hi - shift) / self.scale)


@attr.define(frozen=True, eq=False)
class Standardization:
    """A spiky body moved into standard position.

    Attributes:
        similarity: Map from the original frame to the standard frame.
        body: Image of the body (apex at 0, spiky in -e_d, minimal width 1).
        witness: Spike witness of the image in direction -e_d.
        width: Minimal width of the original body.
        direction: Spiky minimal-width direction in the original frame.
    """

    similarity: Similarity
    body: ConvexBody
    witness: SpikeWitness
    width: float
    direction: Vector


# =============================================================================
# Tangent cones
# =============================================================================


def _planar_cone(body: Body2, x: Vector) -> TangentCone:
    junction = body.junction_at(x)
    if junction is not None:
        forward = body.pieces[junction].start_tangent
        backward = body.pieces[junction - 1].end_tangent
    else:
        s = body.locate(x)
        forward = body.tangent_at(s, forward=True)
        backward = body.tangent_at(s, forward=False)
    rays = np.array([forward, -backward])
    normals = np.array([outward_normal(forward), outward_normal(backward)])
    return TangentCone(x, rays, normals)


def _solid_cone(body: Polytope3, x: Vector) -> TangentCone:
    facets = body.incident_facets(x)
    if not facets:
        raise NotOnBoundaryError(f"Point {x.tolist()} is not on the boundary")
    normals = body.facet_normals[facets]

    vertex = body.vertex_index(x)
    if vertex is not None:
        rays = [as_direction(body.vertices[n] - body.vertices[vertex]) for n in body.neighbors(vertex)]
        return TangentCone(body.vertices[vertex], np.array(rays), normals)

    # Relative interior of an edge or facet: the cone contains a line.
    if len(facets) == 1:
        normal = normals[0]
        basis = np.linalg.svd(normal[None, :])[2][1:]
        rays = np.vstack([basis, -basis, -normal[None, :]])
    else:
        edge = as_direction(np.cross(normals[0], normals[1]))
        inward = [as_direction(np.cross(n, edge)) for n in normals]
        inward = [d if float(d @ n) <= 0 else -d for d, n in zip(inward, normals)]
        rays = np.vstack([edge, -edge, *inward])
    return TangentCone(x, rays, normals)


def tangent_cone(body: ConvexBody, x: ArrayLike) -> TangentCone:
    """Tangent cone T_K(x) at a boundary point.

    Raises:
        NotOnBoundaryError: If ``x`` is not on the boundary (within tolerance).
    """
    point = np.asarray(x, dtype=np.float64)
    if isinstance(body, Body2):
        return _planar_cone(body, point)
    return _solid_cone(body, point)


# =============================================================================
# Spikiness
# =============================================================================


def _unique_support_point(body: ConvexBody, u: Vector, tol: float) -> Optional[Vector]:
    points = body.support_points(u, tol)
    if isinstance(body, Polytope3):
        return points[0] if len(points) == 1 else None

    level = body.support(u)
    for piece in body.pieces:
        if isinstance(piece, Segment) and min(float(piece.start @ u), float(piece.end @ u)) >= level - tol:
            return None
    return points[int(np.argmax(points @ u))]


def is_spiky(body: ConvexBody, u: ArrayLike) -> Optional[SpikeWitness]:
    """Spike witness for direction ``u``, or None when K is not spiky there."""
    tol = get_tolerances().geometric
    direction = as_direction(u)
    apex = _unique_support_point(body, direction, tol)
    if apex is None:
        return None
    cone = tangent_cone(body, apex)
    aperture = float(np.max(cone.rays @ direction))
    if aperture > -tol:
        return None
    return SpikeWitness(direction, cone.apex, cone, aperture)


def find_spiky_minimal_width_direction(body: ConvexBody) -> Optional[tuple[Vector, SpikeWitness]]:
    """First minimal-width direction (either orientation) in which K is spiky."""
    minimizers = width_minimizers(body)
    for direction in minimizers.all_directions:
        witness = is_spiky(body, direction)
        if witness is not None:
            logger.debug(
                f"Spiky minimal width direction {direction.tolist()} "
                f"(aperture {witness.aperture:.6g})"
            )
            return witness.direction, witness
    return None


def minimal_width_chord(body: ConvexBody, u_star: ArrayLike) -> tuple[Vector, Vector]:
    """Chord [a, b] with b - a = -w * u_star joining the two support sets.

    Raises:
        PreconditionError: If the support set at u_star and the projection of
            the support set at -u_star do not meet (u_star is not minimal).
    """
    tol = get_tolerances().geometric
    u = as_direction(u_star)
    w = body.width(u)
    upper = body.support_points(u, tol)
    lower = body.support_points(-u, tol) + w * u
    k1, k2, d = len(upper), len(lower), len(u)

    # Variables: lambda (k1), mu (k2), slack+ (d), slack- (d).
    size = k1 + k2 + 2 * d
    a_eq = np.zeros((d + 2, size))
    a_eq[:d, :k1] = upper.T
    a_eq[:d, k1:k1 + k2] = -lower.T
    a_eq[:d, k1 + k2:k1 + k2 + d] = np.eye(d)
    a_eq[:d, k1 + k2 + d:] = -np.eye(d)
    a_eq[d, :k1] = 1.0
    a_eq[d + 1, k1:k1 + k2] = 1.0
    b_eq = np.concatenate([np.zeros(d), [1.0, 1.0]])
    bounds = [(0.0, None)] * (k1 + k2) + [(0.0, tol)] * (2 * d)

    a_ub = np.zeros((0, size))
    b_ub = np.zeros(0)
    solution = None
    for axis in range(d):
        objective = np.zeros(size)
        objective[:k1] = upper[:, axis]
        result = linprog(objective, A_ub=a_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                         A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if not result.success:
            raise PreconditionError(
                f"Direction {u.tolist()} is not a minimal width direction: support sets do not overlap"
            )
        solution = result.x
        a_ub = np.vstack([a_ub, objective])
        b_ub = np.append(b_ub, result.fun + tol)

    assert solution is not None
    a = upper.T @ solution[:k1]
    return a, a - w * u


def _rotation_to_down(u: Vector) -> Vector:
    """Proper rotation taking u to -e_d."""
    if len(u) == 2:
        angle = -math.pi / 2.0 - math.atan2(float(u[1]), float(u[0]))
        c, s = math.cos(angle), math.sin(angle)
        return np.array([[c, -s], [s, c]])
    down = np.array([0.0, 0.0, -1.0])
    cosine = float(np.clip(u @ down, -1.0, 1.0))
    axis = np.cross(u, down)
    if np.linalg.norm(axis) < 1e-12:
        return np.eye(3) if cosine > 0 else np.diag([1.0, -1.0, -1.0])
    return Rotation.from_rotvec(as_direction(axis) * math.acos(cosine)).as_matrix()


def standardize(body: ConvexBody, u: ArrayLike) -> Standardization:
    """Move a body spiky in minimal-width direction ``u`` into standard position.

    Raises:
        PreconditionError: If K is not spiky in ``u`` or ``u`` is not minimal.
    """
    tol = get_tolerances().geometric
    direction = as_direction(u)
    witness = is_spiky(body, direction)
    if witness is None:
        raise PreconditionError(f"Body is not spiky in direction {direction.tolist()}")
    minimizers = width_minimizers(body)
    width = body.width(direction)
    if width > minimizers.width + tol * max(1.0, minimizers.width):
        raise PreconditionError(
            f"Direction {direction.tolist()} has width {width!r}, minimum is {minimizers.width!r}"
        )

    rotation = _rotation_to_down(direction)
    scale = 1.0 / width
    similarity = Similarity(rotation, scale, -scale * rotation @ witness.apex)
    image = similarity.map_body(body)
    down = np.zeros(body.dim)
    down[-1] = -1.0
    image_witness = is_spiky(image, down)
    if image_witness is None:
        raise PreconditionError("Standardized body lost spikiness (numerically degenerate input)")
    logger.info(f"Standardized body: scale {scale!r}, apex {witness.apex.tolist()}")
    return Standardization(similarity, image, image_witness, width, direction)


def interior_shift_direction(cone: TangentCone) -> Vector:
    """Unit vector strictly inside a pointed cone.

    Raises:
        PreconditionError: If the candidate is not strictly interior.
    """
    tol = get_tolerances().geometric
    if cone.dim == 2:
        candidate = cone.rays.sum(axis=0)
    else:
        candidate = -cone.normals.sum(axis=0)
    direction = as_direction(candidate)
    slack = cone.normals @ direction
    if np.any(slack >= -tol):
        raise PreconditionError("Cone is not pointed; no strictly interior direction")
    return direction


