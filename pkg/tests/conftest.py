"""Shared test fixtures for plankforge.

Fixtures:
    Body Fixtures:
        - unit_square: Square [-1/2, 1/2]^2 (not spiky)
        - triangle: Equilateral triangle with side 1
        - reuleaux: Reuleaux triangle of width 1
        - pyramid: Square pyramid with apex 0 and base at height 1/2

    File Fixtures:
        - body_file: Factory writing a body JSON document to tmp_path

    CLI Fixtures:
        - runner: Click CliRunner for CLI testing

Helpers:
    - random_convex_polygon: Seeded hull of random points
"""

import json
import math
from collections.abc import Iterator
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.spatial import ConvexHull

from plankforge.geometry import Body2, Polytope3
from plankforge.settings import reset_tolerances

# =============================================================================
# Constants
# =============================================================================

SQUARE_VERTICES = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]
TRIANGLE_VERTICES = [[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]]
PYRAMID_VERTICES = [
    [0.0, 0.0, 0.0],
    [0.5, 0.5, 0.5],
    [-0.5, 0.5, 0.5],
    [-0.5, -0.5, 0.5],
    [0.5, -0.5, 0.5],
]


def random_convex_polygon(seed: int) -> Body2:
    """Hull of 5 to 12 uniform points in [-1, 1]^2, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(int(rng.integers(5, 13)), 2))
    hull = ConvexHull(points)
    return Body2.polygon(points[hull.vertices])


# =============================================================================
# Settings Isolation
# =============================================================================


@pytest.fixture(autouse=True)
def _fresh_tolerances() -> Iterator[None]:
    """Drop tolerance overrides and cached environment reads around each test."""
    reset_tolerances()
    yield
    reset_tolerances()


# =============================================================================
# Body Fixtures
# =============================================================================


@pytest.fixture
def unit_square() -> Body2:
    return Body2.polygon(SQUARE_VERTICES)


@pytest.fixture
def triangle() -> Body2:
    return Body2.polygon(TRIANGLE_VERTICES)


@pytest.fixture
def reuleaux() -> Body2:
    return Body2.reuleaux_triangle(1.0)


@pytest.fixture
def pyramid() -> Polytope3:
    return Polytope3(PYRAMID_VERTICES)


# =============================================================================
# File Fixtures
# =============================================================================


@pytest.fixture
def body_file(tmp_path: Path) -> Callable[[dict[str, Any], str], Path]:
    """Factory writing a body document and returning its path.

    Example:
        def test_width(body_file):
            path = body_file({"dim": 2, "type": "polygon", "vertices": [...]}, "square.json")
    """

    def write(document: dict[str, Any], name: str = "body.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write


# =============================================================================
# CLI Fixtures
# =============================================================================


@pytest.fixture
def runner() -> CliRunner:
    """Create Click test runner for CLI testing.

    Returns:
        CliRunner instance for CLI testing.
    """
    return CliRunner()
