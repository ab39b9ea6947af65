"""SVG pictures of planar bodies, their annuli and plank coverings."""

import logging
import math
from typing import Optional

import attr
import numpy as np
import svgwrite  # type: ignore[import-untyped]

from plankforge.cover import CoverResult
from plankforge.errors import PreconditionError
from plankforge.geometry import Arc, Body2, ConvexBody, Plank

logger = logging.getLogger(__name__)


def _check_positive(instance: object, attribute: "attr.Attribute[float]", value: float) -> None:
    if value <= 0:
        raise ValueError(f"{attribute.name} must be positive, got {value!r}")


def _check_opacity(instance: object, attribute: "attr.Attribute[float]", value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{attribute.name} must lie in [0, 1], got {value!r}")


@attr.define(frozen=True)
class RenderSpec:
    """Canvas and styling for rendered coverings.

    Attributes:
        size: Canvas edge length in pixels.
        stroke_width: Outline stroke as a fraction of the body's diameter.
        plank_opacity: Fill opacity of plank strips.
        colors: Cycle of plank fill colors.
        padding: View box margin as a fraction of the body's diameter.
    """

    size: int = attr.field(default=800, validator=_check_positive)
    stroke_width: float = attr.field(default=0.004, validator=_check_positive)
    plank_opacity: float = attr.field(default=0.3, validator=_check_opacity)
    colors: tuple[str, ...] = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
    padding: float = attr.field(default=0.08, validator=_check_positive)


def body_path_data(body: Body2) -> str:
    """SVG path data tracing the boundary counterclockwise in body coordinates."""
    x, y = (float(c) for c in body.pieces[0].start)
    commands = [f"M {x!r} {y!r}"]
    for piece in body.pieces:
        x, y = (float(c) for c in piece.end)
        if isinstance(piece, Arc):
            # Arcs span at most a quarter turn, so the small-arc flag is fixed.
            commands.append(f"A {piece.radius!r} {piece.radius!r} 0 0 1 {x!r} {y!r}")
        else:
            commands.append(f"L {x!r} {y!r}")
    commands.append("Z")
    return " ".join(commands)


def _plank_strip(drawing: svgwrite.Drawing, plank: Plank, reach: float, color: str, opacity: float) -> object:
    angle = math.degrees(math.atan2(plank.normal[1], plank.normal[0]))
    strip = drawing.rect(
        insert=(plank.lo, -reach),
        size=(plank.width, 2.0 * reach),
        fill=color,
        fill_opacity=opacity,
        stroke="none",
        class_="plank",
    )
    strip.rotate(angle)
    return strip


def render_svg(body: ConvexBody, cover: Optional[CoverResult] = None, spec: Optional[RenderSpec] = None) -> str:
    """Draw a planar body, and optionally its covering, as SVG 1.1 text.

    Raises:
        PreconditionError: For solid bodies.
    """
    if not isinstance(body, Body2):
        raise PreconditionError("Only planar bodies can be rendered")
    spec = spec or RenderSpec()

    axes = np.eye(2)
    low, high = -body.support_many(-axes), body.support_many(axes)
    diameter = float(np.linalg.norm(high - low))
    pad = spec.padding * diameter
    low, high = low - pad, high + pad
    stroke = spec.stroke_width * diameter
    reach = 2.0 * (diameter + float(np.max(np.abs(np.concatenate([low, high])))))

    drawing = svgwrite.Drawing(profile="full", size=(spec.size, spec.size))
    # Flip y so body coordinates are drawn with the usual orientation.
    drawing.viewbox(float(low[0]), float(-high[1]), float(high[0] - low[0]), float(high[1] - low[1]))
    scene = drawing.g(id="scene", transform="scale(1,-1)")

    if cover is not None:
        planks = drawing.g(id="planks")
        for index, plank in enumerate(cover.planks):
            color = spec.colors[index % len(spec.colors)]
            planks.add(_plank_strip(drawing, plank, reach, color, spec.plank_opacity))
        scene.add(planks)

    scene.add(drawing.path(d=body_path_data(body), id="body", fill="none", stroke="black", stroke_width=stroke))

    if cover is not None:
        inner = body.scaled(cover.params.epsilon).translated(cover.shift)
        scene.add(
            drawing.path(
                d=body_path_data(inner),
                id="inner",
                fill="white",
                fill_opacity=0.6,
                stroke="black",
                stroke_width=stroke,
                stroke_dasharray=f"{3 * stroke!r},{2 * stroke!r}",
            )
        )
        scene.add(drawing.circle(center=tuple(float(c) for c in cover.apex), r=2.5 * stroke, id="apex", fill="black"))

    drawing.add(scene)
    logger.debug(f"Rendered body with {0 if cover is None else len(cover.planks)} planks")
    return str(drawing.tostring())
