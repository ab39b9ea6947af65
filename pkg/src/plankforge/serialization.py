"""JSON documents read and written by plankforge.

Four document kinds share ``schema_version`` 1 and are described by the JSON
Schemas shipped in ``plankforge/schemas``:

    body     - polygon, arc-gon or polytope input
    cover    - a CoverResult with its construction trace
    report   - a VerifyReport
    width / spiky - small query results printed by the CLI

Floats are written with ``repr`` precision, which round-trips exactly.
"""

import enum
import json
import logging
from pathlib import Path
from typing import Any, Union

import attr
import numpy as np

from plankforge.cover import (
    CoverParams,
    CoverResult,
    CoverTrace,
    Strategy,
    WalkRecord,
    WalkStep,
    WidthBudget,
)
from plankforge.errors import InvalidBodyError, InvalidDocumentError
from plankforge.geometry import Arc, Body2, ConvexBody, Hyperplane, Plank, Polytope3, SectionPolygon, Segment
from plankforge.spiky import SpikeWitness
from plankforge.verify import VerifyReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_DIR = Path(__file__).parent / "schemas"

Document = dict[str, Any]


def _serialize_attr_value(
    inst: type,  # noqa: ARG001
    field: "attr.Attribute[Any]",  # noqa: ARG001
    value: Any,
) -> Any:
    """Value serializer for attr.asdict(): numpy data to lists and floats, enums to values."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, enum.Enum):
        return value.value
    return value


def _asdict(instance: Any) -> Document:
    return attr.asdict(instance, value_serializer=_serialize_attr_value)


def schema_path(kind: str) -> Path:
    """Location of the JSON Schema for a document kind."""
    return SCHEMA_DIR / f"{kind}.schema.json"


# =============================================================================
# Bodies
# =============================================================================


def _piece_from_dict(data: Document) -> Union[Segment, Arc]:
    kind = data["kind"]
    if kind == "seg":
        return Segment(data["from"], data["to"])
    if kind == "arc":
        return Arc(data["center"], data["radius"], data["from_angle"], data["to_angle"])
    raise InvalidDocumentError(f"Unknown piece kind {kind!r}")


def body_from_dict(data: Document) -> ConvexBody:
    """Build a body from its JSON form.

    Raises:
        InvalidDocumentError: If the document is structurally wrong.
        InvalidBodyError: If the described body is not a valid convex body.
    """
    try:
        dim, kind = int(data["dim"]), data["type"]
        if dim == 2 and kind == "polygon":
            return Body2.polygon(data["vertices"])
        if dim == 2 and kind == "arcgon":
            return Body2(tuple(_piece_from_dict(p) for p in data["pieces"]))
        if dim == 3 and kind == "polytope":
            return Polytope3(data["vertices"])
    except (KeyError, TypeError, IndexError) as e:
        raise InvalidDocumentError(f"Malformed body document: {e!r}") from e
    except (InvalidBodyError, InvalidDocumentError):
        raise
    except ValueError as e:
        raise InvalidBodyError(str(e)) from e
    raise InvalidDocumentError(f"Unsupported body type {kind!r} in dimension {dim}")


def body_to_dict(body: ConvexBody) -> Document:
    if isinstance(body, Polytope3):
        return {"dim": 3, "type": "polytope", "vertices": body.vertices.tolist()}
    if not body.has_arcs:
        return {"dim": 2, "type": "polygon", "vertices": body.vertices.tolist()}
    pieces = []
    for piece in body.pieces:
        if isinstance(piece, Segment):
            pieces.append({"kind": "seg", "from": piece.start.tolist(), "to": piece.end.tolist()})
        else:
            pieces.append(
                {
                    "kind": "arc",
                    "center": piece.center.tolist(),
                    "radius": piece.radius,
                    "from_angle": piece.start_angle,
                    "to_angle": piece.end_angle,
                }
            )
    return {"dim": 2, "type": "arcgon", "pieces": pieces}


# =============================================================================
# Coverings
# =============================================================================


def cover_to_dict(result: CoverResult) -> Document:
    raw = _asdict(result)
    return {
        "schema_version": SCHEMA_VERSION,
        "w": raw["budget"]["width"],
        "total_width": raw["budget"]["total_width"],
        "margin": raw["budget"]["margin"],
        "y": raw["shift"],
        "direction": raw["direction"],
        "apex": raw["apex"],
        "planks": raw["planks"],
        "params": raw["params"],
        "trace": raw["trace"],
    }


def _plank(data: Document) -> Plank:
    return Plank(data["normal"], data["lo"], data["hi"])


def _hyperplane(data: Document) -> Hyperplane:
    return Hyperplane(data["normal"], data["offset"])


def _walk(data: Document) -> WalkRecord:
    steps = tuple(
        WalkStep(
            point=s["point"],
            param=float(s["param"]),
            line=_hyperplane(s["line"]),
            shifted_line=_hyperplane(s["shifted_line"]),
            angle=float(s["angle"]),
            arc_length=float(s["arc_length"]),
        )
        for s in data["steps"]
    )
    return WalkRecord(steps, int(data["case"]), float(data["delta"]), float(data["perimeter"]))


def cover_from_dict(data: Document) -> CoverResult:
    """Rebuild a CoverResult from its JSON form.

    Raises:
        InvalidDocumentError: On a wrong schema version or malformed content.
    """
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InvalidDocumentError(f"Unsupported cover schema_version {version!r}")
    try:
        params = data["params"]
        trace = data["trace"]
        section = trace["section"]
        return CoverResult(
            shift=data["y"],
            planks=tuple(_plank(p) for p in data["planks"]),
            params=CoverParams(
                epsilon=float(params["epsilon"]),
                t=float(params["t"]),
                delta_t=float(params["delta_t"]),
                strategy=Strategy(params["strategy"]),
                kappa=float(params["kappa"]),
                rho=float(params["rho"]),
                facets=int(params["facets"]),
                walk_delta=float(params["walk_delta"]),
            ),
            trace=CoverTrace(
                section=SectionPolygon(section["height"], section["vertices"]),
                slice_planks=tuple(_plank(p) for p in trace["slice_planks"]),
                lifted_planks=tuple(_plank(p) for p in trace["lifted_planks"]),
                support_gaps=tuple(float(g) for g in trace["support_gaps"]),
                walk=None if trace.get("walk") is None else _walk(trace["walk"]),
            ),
            budget=WidthBudget(float(data["total_width"]), float(data["w"]), float(data["margin"])),
            direction=data["direction"],
            apex=data["apex"],
        )
    except (KeyError, TypeError, IndexError, ValueError) as e:
        raise InvalidDocumentError(f"Malformed cover document: {e!r}") from e


# =============================================================================
# Reports and queries
# =============================================================================


def report_to_dict(report: VerifyReport) -> Document:
    raw = _asdict(report)
    raw["uncovered"] = [list(point) for point in raw["uncovered"]]
    return {"schema_version": SCHEMA_VERSION, **raw}


def width_to_dict(width: float, direction: np.ndarray) -> Document:
    return {"schema_version": SCHEMA_VERSION, "w": float(width), "u_star": direction.tolist()}


def spiky_to_dict(witness: Union[SpikeWitness, None]) -> Document:
    if witness is None:
        return {"schema_version": SCHEMA_VERSION, "spiky": False, "witness": None}
    return {
        "schema_version": SCHEMA_VERSION,
        "spiky": True,
        "witness": {
            "direction": witness.direction.tolist(),
            "apex": witness.apex.tolist(),
            "aperture": float(witness.aperture),
            "rays": witness.cone.rays.tolist(),
        },
    }


# =============================================================================
# Files
# =============================================================================


def read_json(path: Union[str, Path]) -> Document:
    """Load a JSON object from disk.

    Raises:
        InvalidDocumentError: If the file cannot be read or is not a JSON object.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InvalidDocumentError(f"Cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InvalidDocumentError(f"{path} is not valid JSON: {e.msg} (line {e.lineno})") from e
    if not isinstance(data, dict):
        raise InvalidDocumentError(f"{path} must hold a JSON object")
    return data


def read_body(path: Union[str, Path]) -> ConvexBody:
    body = body_from_dict(read_json(path))
    logger.debug(f"Loaded {type(body).__name__} from {path}")
    return body


def dumps(document: Document) -> str:
    return json.dumps(document, indent=2)


def write_json(document: Document, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(document) + "\n", encoding="utf-8")
