"""plankforge: plank coverings of spiky annuli.

A plank is the closed region between two parallel hyperplanes; its width is
their distance. For a convex body K that is spiky in a minimal width
direction (its tangent cone at the lowest point lies strictly above the
supporting hyperplane) and any 0 < epsilon < 1, plankforge builds finitely
many planks of total width strictly less than w(K) that cover
K minus (epsilon*K + y) for a suitable translate y, and it checks such
coverings independently.

Key Features:
    - Planar arc-gons (segments and circular arcs) and 3D convex polytopes
    - Minimal width, support functions, tangent cones and spikiness tests
    - Boundary-walk coverings of planar metric annuli
    - Sampling verification with re-audited construction inequalities
    - JSON documents with published schemas and SVG rendering

Pipeline:
    body -> find_spiky_minimal_width_direction -> standardize -> choose_t
         -> cross-section planks -> lift -> inflate_and_shift -> CoverResult

Configuration:
    PLANKFORGE_TOL=1e-9   (geometric tolerance; see docs/CONFIGURATION.md)
"""

from importlib.metadata import PackageNotFoundError, version

__version__: str
try:
    __version__ = version("plankforge")
except PackageNotFoundError:
    # Package not installed (development mode without editable install)
    __version__ = "0.0.0+dev"

__license__ = "Apache-2.0"

# Public API exports
__all__ = [
    "Body2",
    "CoverResult",
    "Plank",
    "Polytope3",
    "SamplePlan",
    "VerifyReport",
    "__version__",
    "audit_trace",
    "find_spiky_minimal_width_direction",
    "minimal_width",
    "spiky_annulus_cover",
    "verify_covering",
]

from plankforge.cover import CoverResult, spiky_annulus_cover
from plankforge.geometry import Body2, Plank, Polytope3, minimal_width
from plankforge.spiky import find_spiky_minimal_width_direction
from plankforge.verify import SamplePlan, VerifyReport, audit_trace, verify_covering
