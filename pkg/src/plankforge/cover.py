"""Plank coverings of spiky annuli.

Pipeline (standard frame: apex 0, spiky direction -e_d, minimal width 1):
    standardize -> choose_t -> top plank [t, 1] -> cross_section_planks in H_t
    -> lift_plank through the apex -> inflate_and_shift -> map back.

The cross-section of T_K at height t is covered economically:
    - planar bodies: two planks of width delta_t at the ends of the chord;
    - solid bodies, boundary walk: planks of width 2*delta along the boundary
      of the slice, fewer than sqrt(2*pi*rho/delta) of them;
    - polyhedral cones: one plank of width delta_t per facet of the slice.

Every step leaves a trace so verify.audit_trace can re-check the
inequalities from raw numbers.
"""

import enum
import logging
import math
from typing import Optional

import attr
import numpy as np
from scipy.optimize import linprog
from scipy.stats import qmc

from plankforge.errors import ConvergenceError, NotSpikyError, PreconditionError
from plankforge.geometry import (
    TWO_PI,
    Body2,
    ConvexBody,
    Hyperplane,
    Plank,
    Polytope3,
    SectionPolygon,
    Segment,
    Vector,
    as_vector,
    hausdorff_distance,
    lexicographic_key,
    outward_normal,
    width_minimizers,
)
from plankforge.settings import get_tolerances
from plankforge.spiky import (
    Standardization,
    TangentCone,
    find_spiky_minimal_width_direction,
    interior_shift_direction,
    standardize,
)

logger = logging.getLogger(__name__)


class Strategy(str, enum.Enum):
    """How the cross-section of the tangent cone is covered."""

    TWO_PLANK_2D = "two-plank-2D"
    LEMMA2_3D = "lemma2-3D"
    POLYHEDRAL = "polyhedral"


# =============================================================================
# Types
# =============================================================================


@attr.define(frozen=True, eq=False)
class WalkStep:
    """One plank of the boundary walk.

    Attributes:
        point: p_i on the boundary.
        param: Unwrapped arc-length parameter of p_i.
        line: Supporting line l_i at p_i (outward normal).
        shifted_line: l_i', the boundary of P_i on the side of K.
        angle: alpha_i, angle between l_i and l_{i+1}.
        arc_length: Length of the boundary arc from p_i to p_{i+1}.
    """

    point: Vector = attr.field(converter=as_vector)
    param: float
    line: Hyperplane
    shifted_line: Hyperplane
    angle: float
    arc_length: float


@attr.define(frozen=True, eq=False)
class WalkRecord:
    """Trace of the boundary walk covering a planar metric annulus.

    ``case`` is 1 when p_1 is outside the last plank and 2 when the last plank
    was redefined to end at the line through p_1.
    """

    steps: tuple[WalkStep, ...]
    case: int
    delta: float
    perimeter: float

    @property
    def count(self) -> int:
        return len(self.steps)

    @property
    def count_bound(self) -> float:
        return math.sqrt(TWO_PI * self.perimeter / self.delta)


@attr.define(frozen=True, eq=False)
class CoverParams:
    """Parameters fixed by t-selection.

    Attributes:
        epsilon: Homothety ratio in (0, 1).
        t: Height of the cross-section in the standard frame.
        delta_t: Hausdorff distance between the cone slice boundary and the
            annulus slice at height t.
        kappa: Inflation radius (0 until inflate_and_shift has run).
        strategy: Cross-section covering strategy.
        rho: Perimeter of T_K at height 1 (solid bodies, else 0).
        facets: Number of facets of the cone slice.
        walk_delta: Walk parameter used by the boundary-walk strategy.
    """

    epsilon: float
    t: float
    delta_t: float
    strategy: Strategy
    kappa: float = 0.0
    rho: float = 0.0
    facets: int = 0
    walk_delta: float = 0.0


@attr.define(frozen=True, eq=False)
class CoverTrace:
    """Construction data kept for audits and rendering (standard frame)."""

    section: SectionPolygon
    slice_planks: tuple[Plank, ...]
    lifted_planks: tuple[Plank, ...]
    support_gaps: tuple[float, ...]
    walk: Optional[WalkRecord] = None


@attr.define(frozen=True, eq=False)
class WidthBudget:
    total_width: float
    width: float
    margin: float


@attr.define(frozen=True, eq=False)
class CoverResult:
    """Plank covering of K minus (epsilon*K + shift), in the original frame."""

    shift: Vector = attr.field(converter=as_vector)
    planks: tuple[Plank, ...]
    params: CoverParams
    trace: CoverTrace
    budget: WidthBudget
    direction: Vector = attr.field(converter=as_vector)
    apex: Vector = attr.field(converter=as_vector)


# =============================================================================
# Boundary walk
# =============================================================================


def _on_line(piece: Segment, normal: Vector, level: float, tol: float) -> bool:
    return abs(float(piece.start @ normal) - level) <= tol and abs(float(piece.end @ normal) - level) <= tol


def _advance(body: Body2, s: float, normal: Vector, level: float, tol: float) -> float:
    """First parameter after ``s`` where the boundary reaches <x, normal> = level.

    When the boundary runs along the line, the farthest point is returned.
    """
    count = len(body.pieces)
    index, local = body.piece_at(s)
    base = s - local
    for _ in range(count + 1):
        piece = body.pieces[index % count]
        crossings = [c for c in piece.line_crossings(normal, level) if c > local + 1e-12]
        if crossings:
            if not (isinstance(piece, Segment) and _on_line(piece, normal, level, tol)):
                return base + crossings[0]
            # Follow collinear pieces to the far end of the contact segment.
            base += piece.length
            index += 1
            while True:
                following = body.pieces[index % count]
                if not (isinstance(following, Segment) and _on_line(following, normal, level, tol)):
                    return base
                base += following.length
                index += 1
        base += piece.length
        index += 1
        local = -2e-12
    raise ConvergenceError("Boundary walk did not meet the shifted supporting line")


def _retreat(body: Body2, s: float, normal: Vector, level: float) -> float:
    """Distance backward from ``s`` until the boundary reaches the line."""
    count = len(body.pieces)
    index, local = body.piece_at(s, forward=False)
    travelled = 0.0
    for _ in range(count + 1):
        piece = body.pieces[index % count]
        crossings = [c for c in piece.line_crossings(normal, level) if c < local - 1e-12]
        if crossings:
            return travelled + local - crossings[-1]
        travelled += local
        index -= 1
        local = body.pieces[index % count].length + 1e-12
    return body.perimeter


def _start_parameter(body: Body2) -> float:
    """Lowest boundary point, lexicographic tie-break."""
    lowest = min(body.support_points(np.array([0.0, -1.0])), key=lexicographic_key)
    return body.locate(lowest)


def _supporting_line(body: Body2, s: float) -> Hyperplane:
    point = body.point_at(s)
    normal = outward_normal(body.tangent_at(s, forward=True))
    return Hyperplane(normal, float(normal @ point))


def _turn(first: Vector, second: Vector) -> float:
    return float(np.mod(math.atan2(second[1], second[0]) - math.atan2(first[1], first[0]), TWO_PI))


def lemma2_cover(body: Body2, delta: float) -> tuple[list[Plank], WalkRecord]:
    """Cover the metric annulus K^delta by planks of width 2*delta.

    Walks counterclockwise from the lowest boundary point: at p_i take the
    supporting line l_i (the forward edge at a corner), shift it by delta into
    K, and let p_{i+1} be where the shifted line meets the boundary. Stops at
    the first n for which the planks cover the boundary.

    Raises:
        PreconditionError: If delta is not in (0, w(K)).
    """
    tol = get_tolerances().geometric
    width = width_minimizers(body).width
    if not 0.0 < delta < width:
        raise PreconditionError(f"Walk width {delta!r} must lie in (0, {width!r})")

    rho = body.perimeter
    start = _start_parameter(body)
    params = [start]
    lines: list[Hyperplane] = []
    reach_back: list[float] = []
    limit = math.ceil(rho / delta) + 4

    while True:
        s = params[-1]
        line = _supporting_line(body, s)
        level = line.offset - delta
        following = _advance(body, s, line.normal, level, tol)
        lines.append(line)
        reach_back.append(s - _retreat(body, s, line.normal, level))
        params.append(following)
        earliest = min(reach_back) + rho
        if following >= start + rho - tol or earliest <= following + tol:
            break
        if len(lines) > limit:
            raise ConvergenceError(f"Boundary walk exceeded {limit} planks")

    count = len(lines)
    first_point = body.point_at(start)
    last = lines[-1]
    case = 2 if -tol <= last.signed_distance(first_point) + delta <= delta + tol else 1

    if case == 2:
        params[-1] = start + rho
        closing_line = lines[0]
        shifted = [line.shifted(-delta) for line in lines[:-1]]
        shifted.append(Hyperplane(last.normal, float(last.normal @ first_point)))
    else:
        closing_line = _supporting_line(body, params[-1])
        shifted = [line.shifted(-delta) for line in lines]

    normals = [line.normal for line in lines] + [closing_line.normal]
    steps = tuple(
        WalkStep(
            point=body.point_at(params[i]),
            param=params[i],
            line=lines[i],
            shifted_line=shifted[i],
            angle=_turn(normals[i], normals[i + 1]),
            arc_length=params[i + 1] - params[i],
        )
        for i in range(count)
    )
    record = WalkRecord(steps, case, delta, rho)
    logger.debug(
        f"Boundary walk: {count} planks (bound {record.count_bound:.4f}), case {case}"
    )
    planks = [Plank(line.normal, line.offset - 2.0 * delta, line.offset) for line in lines]
    return planks, record


# =============================================================================
# delta_t and t-selection
# =============================================================================


def _inner_chord(inner: Body2, t: float, tol: float) -> Optional[tuple[float, float]]:
    """Interior chord of a planar body at height t, or None when it is empty."""
    low, high = -inner.support(np.array([0.0, -1.0])), inner.support(np.array([0.0, 1.0]))
    if not low + tol < t < high - tol:
        return None
    chord = inner.section(t)
    if chord is None or chord[1] - chord[0] <= tol:
        return None
    return chord


def _inner_slice(inner: Polytope3, t: float, tol: float) -> Optional[SectionPolygon]:
    heights = inner.vertices[:, 2]
    if not float(heights.min()) + tol < t < float(heights.max()) - tol:
        return None
    return inner.section(t)


def _point_or_segment(start: Vector, end: Vector, tol: float) -> object:
    if float(np.linalg.norm(end - start)) <= tol:
        return start
    return Segment(start, end)


def _planar_delta(cone: TangentCone, inner: Body2, t: float, tol: float) -> float:
    section = cone.section(t)
    a, b = float(section.vertices[0, 0]), float(section.vertices[1, 0])
    ends = [np.array([a, t]), np.array([b, t])]
    hole = _inner_chord(inner, t, tol)
    if hole is None:
        annulus = [Segment(ends[0], ends[1])]
    else:
        c, d = min(max(hole[0], a), b), max(min(hole[1], b), a)
        annulus = [
            _point_or_segment(ends[0], np.array([c, t]), tol),
            _point_or_segment(np.array([d, t]), ends[1], tol),
        ]
    return hausdorff_distance(ends, annulus)  # type: ignore[arg-type]


def _chebyshev_center(normals: Vector, offsets: Vector) -> tuple[Vector, float]:
    """Centre and radius of the largest disc inside {x : normals @ x <= offsets}."""
    count, dim = normals.shape
    a_ub = np.hstack([normals, np.ones((count, 1))])
    objective = np.zeros(dim + 1)
    objective[-1] = -1.0
    bounds = [(None, None)] * dim + [(0.0, None)]
    result = linprog(objective, A_ub=a_ub, b_ub=offsets, bounds=bounds, method="highs")
    if not result.success:
        raise ConvergenceError(f"Chebyshev centre computation failed: {result.message}")
    return result.x[:dim], float(result.x[-1])


def _sampled_solid_delta(
    section: SectionPolygon, hole: SectionPolygon, depth: object, count: int, seed: int
) -> float:
    low, high = section.vertices.min(axis=0), section.vertices.max(axis=0)
    points = qmc.scale(qmc.Halton(d=2, seed=seed).random(count), low, high)
    keep = section.contains_points(points) & ~hole.contains_points(points, strict=True)
    if not np.any(keep):
        return 0.0
    return float(np.max(depth(points[keep])))  # type: ignore[operator]


def _solid_delta(cone: TangentCone, inner: Polytope3, t: float, tol: float, seed: int) -> float:
    section = cone.section(t)
    planes = section.edge_planes()
    normals = np.array([n for n, _ in planes])
    offsets = np.array([h for _, h in planes])

    def depth(points: Vector) -> np.ndarray:
        return np.min(offsets - np.atleast_2d(points) @ normals.T, axis=1)

    center, radius = _chebyshev_center(normals, offsets)
    hole = _inner_slice(inner, t, tol)
    if hole is None:
        return radius

    candidates = []
    if not bool(hole.contains_points(center[None, :], tol=tol, strict=True)[0]):
        candidates.append(radius)
    vertices = hole.vertices
    for i in range(len(vertices)):
        p, q = vertices[i], vertices[(i + 1) % len(vertices)]
        v = q - p
        params = [0.0, 1.0]
        base = offsets - normals @ p
        rate = normals @ v
        for a in range(len(planes)):
            for b in range(a + 1, len(planes)):
                if abs(rate[a] - rate[b]) > 1e-15:
                    s = (base[a] - base[b]) / (rate[a] - rate[b])
                    if 0.0 <= s <= 1.0:
                        params.append(float(s))
        candidates.append(float(np.max(depth(p + np.outer(params, v)))))
    exact = max(0.0, max(candidates))

    sampled = _sampled_solid_delta(section, hole, depth, 1000, seed)
    if sampled > exact + 10.0 * tol:
        logger.warning(f"delta_t cross-check: sampled {sampled!r} exceeds exact {exact!r} at t={t!r}")
    return exact


def delta_t(cone: TangentCone, inner: ConvexBody, t: float, seed: int = 0) -> float:
    """Hausdorff distance between the slice of the cone boundary and the annulus slice.

    Args:
        cone: Tangent cone at the apex (standard frame).
        inner: The homothet epsilon*K (standard frame, apex at 0).
        t: Positive height.
        seed: Seed of the quasi-random cross-check for solid bodies.

    Returns:
        delta_t >= 0; zero when the two slices coincide.
    """
    if t <= 0.0:
        raise PreconditionError(f"Height must be positive, got {t!r}")
    tol = get_tolerances().geometric
    if isinstance(inner, Body2):
        return _planar_delta(cone, inner, t, tol)
    return _solid_delta(cone, inner, t, tol, seed)


def delta_t_series(std: Standardization, epsilon: float, heights: list[float]) -> list[tuple[float, float]]:
    """delta_t along a sequence of heights, for monitoring its decay."""
    inner = std.body.scaled(epsilon)
    return [(t, delta_t(std.witness.cone, inner, t)) for t in heights]


def _bound(strategy: Strategy, t: float, rho: float, facets: int) -> float:
    if strategy is Strategy.LEMMA2_3D:
        return t / (8.0 * math.pi * rho)
    if strategy is Strategy.POLYHEDRAL:
        return t / facets
    return t / 2.0


def choose_t(std: Standardization, epsilon: float, strategy: Strategy, seed: int = 0) -> CoverParams:
    """Halve t from 1/2 until the strategy's strict inequality on delta_t holds.

    Raises:
        ConvergenceError: If the halving cap is exhausted.
    """
    settings = get_tolerances()
    cone = std.witness.cone
    inner = std.body.scaled(epsilon)
    unit_section = cone.section(1.0)
    rho = unit_section.perimeter if cone.dim == 3 else 0.0
    facets = len(unit_section.edge_planes())

    t = 0.5
    for _ in range(settings.max_halvings):
        delta = delta_t(cone, inner, t, seed)
        slice_width = cone.section(t).width
        bound = settings.safety_factor * _bound(strategy, t, rho, facets)
        logger.debug(f"t={t!r}: delta_t={delta!r}, bound={bound!r}")
        if delta < bound and delta < slice_width:
            walk_delta = 0.0
            if strategy is Strategy.LEMMA2_3D:
                walk_delta = max(delta, min(0.5 * bound, 0.5 * slice_width))
            logger.info(f"Chose t={t!r} with delta_t={delta!r} ({strategy.value})")
            return CoverParams(epsilon, t, delta, strategy, rho=rho, facets=facets, walk_delta=walk_delta)
        t *= 0.5
    raise ConvergenceError(
        f"No admissible t after {settings.max_halvings} halvings; body is not spiky enough"
    )


# =============================================================================
# Cross-section planks, lifting, inflation
# =============================================================================


def _embed(normal: Vector) -> Vector:
    return np.append(normal, 0.0)


def cross_section_planks(
    params: CoverParams, cone: TangentCone
) -> tuple[SectionPolygon, list[Plank], Optional[WalkRecord]]:
    """Planks in H_t covering the metric annulus of the cone slice.

    Planks are returned with d-dimensional normals orthogonal to e_d.
    """
    section = cone.section(params.t)
    if params.strategy is Strategy.LEMMA2_3D:
        planar, walk = lemma2_cover(section.as_body(), params.walk_delta)
        planks = [Plank(_embed(p.normal), p.lo, p.hi) for p in planar]
        return section, planks, walk

    planks = [
        Plank(_embed(normal), offset - params.delta_t, offset)
        for normal, offset in section.edge_planes()
    ]
    return section, planks, None


def lift_plank(plank: Plank, section: SectionPolygon) -> tuple[Plank, float]:
    """Lift a plank of H_t to a plank bounded by the hyperplane through its outer flat and 0.

    Returns:
        The lifted plank and the support gap: min over the slice vertices of
        the distance below the lifted outer hyperplane (>= 0 when it supports T_K).

    Raises:
        PreconditionError: If the outer flat does not support the slice.
    """
    tol = get_tolerances().geometric
    t = section.height
    normal = plank.normal
    if abs(float(normal[-1])) > tol:
        raise PreconditionError("Only planks orthogonal to H_t can be lifted")
    reach = float(np.max(section.vertices @ normal[:-1]))
    if abs(reach - plank.hi) > tol * max(1.0, abs(plank.hi)):
        raise PreconditionError(
            f"Outer flat at {plank.hi!r} does not support the slice (reaches {reach!r})"
        )

    raw = normal.copy()
    raw[-1] = -plank.hi / t
    norm = float(np.linalg.norm(raw))
    lifted = Plank(raw / norm, (plank.lo - plank.hi) / norm, 0.0)
    gap = float(np.min(-(section.lifted() @ lifted.normal)))
    return lifted, gap


def _strictly_inside(body: ConvexBody, inner: ConvexBody, shift: Vector) -> bool:
    tol = get_tolerances().membership
    points = inner.extreme_points() + shift
    if not bool(np.all(body.contains_points(points, tol=tol, strict=True))):
        return False
    if isinstance(body, Body2) and isinstance(inner, Body2) and inner.has_arcs:
        angles = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        directions = np.column_stack([np.cos(angles), np.sin(angles)])
        inner_reach = inner.support_many(directions) + directions @ shift
        return bool(np.all(inner_reach < body.support_many(directions) - tol))
    return True


def inflate_and_shift(
    planks: list[Plank],
    top_plank: Plank,
    inner: ConvexBody,
    body: ConvexBody,
    cone: TangentCone,
    slack: float,
) -> tuple[Vector, list[Plank], float]:
    """Shift the homothet into the interior and inflate every plank by 2*kappa.

    Returns:
        (shift y, inflated planks with the top plank first, kappa).

    Raises:
        ConvergenceError: If no admissible shift is found within the halving cap.
    """
    if slack <= 0.0:
        raise PreconditionError(f"Width budget slack must be positive, got {slack!r}")
    settings = get_tolerances()
    everything = [top_plank, *planks]
    direction = interior_shift_direction(cone)

    reach = slack
    for _ in range(settings.max_halvings):
        if _strictly_inside(body, inner, reach * direction):
            break
        reach *= 0.5
    else:
        raise ConvergenceError("Could not move the homothet into the interior")

    kappa = min(slack / (4.0 * len(everything)), reach)
    shift = kappa * direction
    if not _strictly_inside(body, inner, shift):
        raise ConvergenceError(f"Homothet not interior at kappa={kappa!r}")
    logger.info(f"Inflating {len(everything)} planks by kappa={kappa!r}")
    return shift, [p.inflated(kappa) for p in everything], kappa


# =============================================================================
# Full construction
# =============================================================================


def resolve_strategy(dim: int, strategy: Optional[object]) -> Strategy:
    """Default and validate the cross-section strategy for a dimension."""
    if strategy is None:
        return Strategy.TWO_PLANK_2D if dim == 2 else Strategy.POLYHEDRAL
    chosen = Strategy(strategy)
    allowed = {2: {Strategy.TWO_PLANK_2D, Strategy.POLYHEDRAL}, 3: {Strategy.LEMMA2_3D, Strategy.POLYHEDRAL}}
    if chosen not in allowed[dim]:
        raise PreconditionError(f"Strategy {chosen.value!r} does not apply in dimension {dim}")
    return chosen


def spiky_annulus_cover(
    body: ConvexBody, epsilon: float, strategy: Optional[object] = None, seed: int = 0
) -> CoverResult:
    """Cover K minus (epsilon*K + y) by planks of total width below w(K).

    The construction is deterministic; ``seed`` only drives the quasi-random
    cross-check of delta_t on solid bodies.

    Raises:
        PreconditionError: If epsilon is outside (0, 1) or the strategy is invalid.
        NotSpikyError: If K has no spiky minimal width direction.
        ConvergenceError: On numerical failure.
    """
    if not 0.0 < epsilon < 1.0:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    chosen = resolve_strategy(body.dim, strategy)
    found = find_spiky_minimal_width_direction(body)
    if found is None:
        raise NotSpikyError("Body is not spiky in any minimal width direction")

    std = standardize(body, found[0])
    cone = std.witness.cone
    inner = std.body.scaled(epsilon)
    params = choose_t(std, epsilon, chosen, seed)

    section, slice_planks, walk = cross_section_planks(params, cone)
    lifted_pairs = [lift_plank(p, section) for p in slice_planks]
    lifted = [p for p, _ in lifted_pairs]
    gaps = tuple(g for _, g in lifted_pairs)

    up = np.zeros(body.dim)
    up[-1] = 1.0
    top = Plank(up, params.t, max(1.0, std.body.support(up)))
    slack = 1.0 - top.width - sum(p.width for p in lifted)
    if slack <= 0.0:
        raise ConvergenceError(f"Construction exceeded the width budget (slack {slack!r})")

    y_std, inflated, kappa = inflate_and_shift(lifted, top, inner, std.body, cone, slack)

    similarity = std.similarity
    planks = tuple(similarity.pull_back_plank(p) for p in inflated)
    shift = similarity.rotation.T @ ((epsilon - 1.0) * similarity.translation + y_std) / similarity.scale
    total = sum(p.width for p in planks)
    budget = WidthBudget(total, std.width, std.width - total)
    if budget.margin <= 0.0:
        raise ConvergenceError(f"Covering saves no width (margin {budget.margin!r})")

    logger.info(
        f"Covering with {len(planks)} planks: total width {total!r}, "
        f"w(K) {std.width!r}, margin {budget.margin!r}"
    )
    return CoverResult(
        shift=shift,
        planks=planks,
        params=attr.evolve(params, kappa=kappa),
        trace=CoverTrace(section, tuple(slice_planks), tuple(lifted), gaps, walk),
        budget=budget,
        direction=std.direction,
        apex=std.similarity.invert(np.zeros(body.dim)),
    )
