"""Independent adjudication of plank coverings.

Two questions are answered separately:
    - does the plank set cover K minus int(epsilon*K + y)? (sampling)
    - do the inequalities recorded by the construction hold? (audit_trace)

Neither reuses flags computed by the cover module; audits start from raw
trace numbers.
"""

import enum
import logging
import math
from typing import Optional, Sequence

import attr
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import qmc

from plankforge.cover import CoverResult, Strategy
from plankforge.geometry import TWO_PI, Body2, ConvexBody, Plank, Polytope3, Vector, lexicographic_key, minimal_width

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-12
AUDIT_TOL = 1e-9
MAX_UNCOVERED = 100


class Verdict(str, enum.Enum):
    CERTIFIED = "certified-by-sampling"
    REFUTED = "refuted"
    AUDIT_FAILED = "audit-failed"


def _positive(instance: object, attribute: "attr.Attribute[int]", value: int) -> None:
    if value <= 0:
        raise ValueError(f"{attribute.name} must be positive, got {value!r}")


@attr.define(frozen=True)
class SamplePlan:
    """How the annulus is sampled.

    Attributes:
        interior: Quasi-random points drawn in the bounding box of K.
        boundary: Points per boundary and per offset.
        offsets: Distances (as fractions of w(K)) moved into the annulus from
            each boundary.
        seed: Seed for every random draw.
    """

    interior: int = attr.field(default=40_000, validator=_positive)
    boundary: int = attr.field(default=10_000, validator=_positive)
    offsets: tuple[float, ...] = (0.0, 1e-6, 1e-3)
    seed: int = 0

    @classmethod
    def from_total(cls, samples: int, seed: int = 0) -> "SamplePlan":
        """Split a sample budget 40/60 between interior and boundary points."""
        if samples < 10:
            raise ValueError(f"Need at least 10 samples, got {samples}")
        interior = max(1, (2 * samples) // 5)
        boundary = max(1, (samples - interior) // 6)
        return cls(interior=interior, boundary=boundary, seed=seed)


@attr.define(frozen=True)
class Audit:
    """One re-evaluated inequality: ``value <= bound`` (or ``<`` when strict)."""

    name: str
    value: float
    bound: float
    passed: bool


@attr.define(frozen=True, eq=False)
class VerifyReport:
    samples: int
    uncovered: tuple[tuple[float, ...], ...]
    total_width: float
    margin: float
    audits: tuple[Audit, ...]
    verdict: Verdict

    @property
    def exit_code(self) -> int:
        return {Verdict.CERTIFIED: 0, Verdict.REFUTED: 1, Verdict.AUDIT_FAILED: 2}[self.verdict]


# =============================================================================
# Membership
# =============================================================================


def annulus_mask(body: ConvexBody, inner: ConvexBody, shift: ArrayLike, points: ArrayLike) -> NDArray[np.bool_]:
    """x in K and x not in int(inner + shift), for many points at once."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    offset = np.asarray(shift, dtype=np.float64)
    in_body = body.contains_points(pts, tol=MEMBERSHIP_TOL)
    in_hole = inner.contains_points(pts - offset, tol=MEMBERSHIP_TOL, strict=True)
    return in_body & ~in_hole


def annulus_membership(body: ConvexBody, inner: ConvexBody, shift: ArrayLike, x: ArrayLike) -> bool:
    """Whether x lies in K minus int(inner + shift)."""
    return bool(annulus_mask(body, inner, shift, np.asarray(x, dtype=np.float64)[None, :])[0])


def covered_mask(planks: Sequence[Plank], points: ArrayLike) -> NDArray[np.bool_]:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    covered = np.zeros(len(pts), dtype=bool)
    for plank in planks:
        covered |= plank.contains_points(pts, tol=MEMBERSHIP_TOL)
    return covered


# =============================================================================
# Sampling
# =============================================================================


def _bounding_box(body: ConvexBody) -> tuple[Vector, Vector]:
    axes = np.eye(body.dim)
    return -body.support_many(-axes), body.support_many(axes)


def _planar_boundary(body: Body2, count: int) -> tuple[Vector, Vector]:
    """Evenly spaced boundary points and inward normals."""
    params = np.linspace(0.0, body.perimeter, count, endpoint=False)
    points = np.array([body.point_at(float(s)) for s in params])
    tangents = np.array([body.tangent_at(float(s)) for s in params])
    return points, np.column_stack([-tangents[:, 1], tangents[:, 0]])


def _solid_boundary(body: Polytope3, count: int, rng: np.random.Generator) -> tuple[Vector, Vector]:
    """Area-weighted random points on the facets and inward normals."""
    triangles = body.face_triangles()
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    cross = np.cross(b - a, c - a)
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    normals = cross / np.linalg.norm(cross, axis=1)[:, None]
    outward = np.einsum("ij,ij->i", normals, a - body.centroid) > 0.0
    normals[~outward] *= -1.0

    chosen = rng.choice(len(triangles), size=count, p=areas / areas.sum())
    r1, r2 = rng.random(count), rng.random(count)
    flip = r1 + r2 > 1.0
    r1[flip], r2[flip] = 1.0 - r1[flip], 1.0 - r2[flip]
    points = a[chosen] + r1[:, None] * (b - a)[chosen] + r2[:, None] * (c - a)[chosen]
    return points, -normals[chosen]


def _boundary(body: ConvexBody, count: int, rng: np.random.Generator) -> tuple[Vector, Vector]:
    if isinstance(body, Body2):
        return _planar_boundary(body, count)
    return _solid_boundary(body, count, rng)


def sample_annulus(body: ConvexBody, inner: ConvexBody, shift: ArrayLike, plan: SamplePlan) -> Vector:
    """Annulus points: quasi-random interior points plus a boundary offset ladder.

    Points move inward from the boundary of K and outward from the boundary of
    the shifted homothet, so both rims of the annulus are probed.
    """
    rng = np.random.default_rng(plan.seed)
    offset = np.asarray(shift, dtype=np.float64)
    width, _ = minimal_width(body)

    low, high = _bounding_box(body)
    interior = qmc.scale(qmc.Halton(d=body.dim, scramble=True, seed=plan.seed).random(plan.interior), low, high)

    outer_points, outer_normals = _boundary(body, plan.boundary, rng)
    inner_points, inner_normals = _boundary(inner, plan.boundary, rng)
    inner_points = inner_points + offset

    ladder = [interior]
    for fraction in plan.offsets:
        step = fraction * width
        ladder.append(outer_points + step * outer_normals)
        ladder.append(inner_points - step * inner_normals)
    points = np.vstack(ladder)
    return points[annulus_mask(body, inner, offset, points)]


def verify_covering(
    body: ConvexBody,
    inner: ConvexBody,
    shift: ArrayLike,
    planks: Sequence[Plank],
    plan: Optional[SamplePlan] = None,
    audits: Sequence[Audit] = (),
) -> VerifyReport:
    """Test plank membership of annulus samples and assemble a report.

    Failures are verdicts, never exceptions: uncovered samples refute the
    covering, a non-positive margin or a failed audit marks it audit-failed.
    """
    plan = plan or SamplePlan()
    points = sample_annulus(body, inner, shift, plan)
    missed = points[~covered_mask(planks, points)]
    uncovered = tuple(sorted((tuple(float(c) for c in p) for p in missed), key=lexicographic_key))

    width, _ = minimal_width(body)
    total = float(sum(p.hi - p.lo for p in planks))
    margin = width - total
    budget = Audit("margin", total, width, margin > 0.0)
    all_audits = (budget, *audits)

    if uncovered:
        verdict = Verdict.REFUTED
    elif not all(a.passed for a in all_audits):
        verdict = Verdict.AUDIT_FAILED
    else:
        verdict = Verdict.CERTIFIED
    logger.info(
        f"Verified {len(points)} annulus samples: {len(uncovered)} uncovered, "
        f"margin {margin!r}, verdict {verdict.value}"
    )
    return VerifyReport(
        samples=len(points),
        uncovered=uncovered[:MAX_UNCOVERED],
        total_width=total,
        margin=margin,
        audits=all_audits,
        verdict=verdict,
    )


# =============================================================================
# Trace audits
# =============================================================================


def _at_most(name: str, value: float, bound: float) -> Audit:
    return Audit(name, value, bound, bool(value <= bound + AUDIT_TOL))


def _below(name: str, value: float, bound: float) -> Audit:
    return Audit(name, value, bound, bool(value < bound))


def _strategy_bound(result: CoverResult) -> float:
    params = result.params
    if params.strategy is Strategy.LEMMA2_3D:
        return params.t / (8.0 * math.pi * params.rho)
    if params.strategy is Strategy.POLYHEDRAL:
        return params.t / params.facets
    return params.t / 2.0


def audit_trace(result: CoverResult) -> list[Audit]:
    """Re-evaluate every recorded inequality of a construction from its trace."""
    params, trace = result.params, result.trace
    audits = [
        _below("delta_t", params.delta_t, _strategy_bound(result)),
        _below("section_width", float(sum(p.width for p in trace.slice_planks)), params.t),
    ]
    audits.extend(_at_most(f"support_gap[{i}]", -gap, 0.0) for i, gap in enumerate(trace.support_gaps))

    total = float(sum(p.width for p in result.planks))
    audits.append(_below("total_width", total, result.budget.width))

    walk = trace.walk
    if walk is not None:
        delta = walk.delta
        angles = [step.angle for step in walk.steps]
        audits.append(_below("walk_count", float(walk.count), math.sqrt(TWO_PI * walk.perimeter / delta)))
        audits.append(_at_most("turn_total", float(sum(angles)), TWO_PI))
        audits.extend(
            Audit(f"turn[{i}]", angle, math.pi, bool(0.0 < angle < math.pi)) for i, angle in enumerate(angles)
        )
        # Every step, the closing one included; an angle outside (0, pi) already fails turn[i].
        estimates = [
            (i, delta / math.sin(step.angle), step.arc_length)
            for i, step in enumerate(walk.steps)
            if 0.0 < step.angle < math.pi
        ]
        audits.extend(_at_most(f"arc_estimate[{i}]", estimate, arc) for i, estimate, arc in estimates)
        audits.append(_at_most("arc_total", float(sum(e for _, e, _ in estimates)), walk.perimeter))
    failed = [a.name for a in audits if not a.passed]
    if failed:
        logger.warning(f"Audit failures: {', '.join(failed)}")
    return audits
