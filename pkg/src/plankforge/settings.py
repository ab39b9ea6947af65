"""Central tolerance record for plankforge.

Every numeric threshold used by the geometry, covering and verification code
lives on one frozen record so a run can be reproduced from its settings alone.

Configuration:
    Environment variable:
        PLANKFORGE_TOL=1e-9   (overrides the geometric tolerance)

    Programmatic:
        Tolerances.from_dict({"geometric": 1e-10, "max_halvings": 80})

See docs/CONFIGURATION.md for details.
"""

import logging
import os
from collections.abc import Mapping
from functools import lru_cache
from typing import Any, Optional

import attr

logger = logging.getLogger(__name__)

ENV_TOLERANCE = "PLANKFORGE_TOL"


@attr.define(frozen=True)
class Tolerances:
    """Numeric thresholds shared by every module.

    Attributes:
        geometric: Absolute tolerance for incidence, support-set and cone tests.
        refinement: Target accuracy of 1D width refinement and round trips.
        membership: Slack on plank and body membership during verification.
        width_grid: Grid size for minimizing the width function of arc-gons.
        sphere_sweep: Number of directions in the 3D minimal-width sanity sweep.
        max_halvings: Iteration cap for t-selection and shift halving.
        safety_factor: Multiplier applied to the strict t-selection inequalities.
    """

    geometric: float = 1e-9
    refinement: float = 1e-12
    membership: float = 1e-12
    width_grid: int = 2048
    sphere_sweep: int = 10_000
    max_halvings: int = 64
    safety_factor: float = 0.99

    @classmethod
    def from_dict(cls, params: Mapping[str, Any]) -> "Tolerances":
        """Create a record from a dictionary, using defaults for missing keys.

        Args:
            params: Mapping of field names to values.

        Returns:
            Tolerances instance.
        """
        defaults = cls()
        return cls(
            geometric=float(params.get("geometric", defaults.geometric)),
            refinement=float(params.get("refinement", defaults.refinement)),
            membership=float(params.get("membership", defaults.membership)),
            width_grid=int(params.get("width_grid", defaults.width_grid)),
            sphere_sweep=int(params.get("sphere_sweep", defaults.sphere_sweep)),
            max_halvings=int(params.get("max_halvings", defaults.max_halvings)),
            safety_factor=float(params.get("safety_factor", defaults.safety_factor)),
        )

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Tolerances":
        """Create a record honouring the PLANKFORGE_TOL override.

        Args:
            environ: Environment mapping (defaults to os.environ).

        Returns:
            Tolerances instance.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_TOLERANCE)
        if raw is None or not raw.strip():
            return cls()

        try:
            value = float(raw)
        except ValueError:
            logger.warning(
                f"Ignoring {ENV_TOLERANCE}={raw!r}: not a number, using default"
            )
            return cls()

        if not 0.0 < value < 1e-2:
            logger.warning(
                f"Ignoring {ENV_TOLERANCE}={raw!r}: must lie in (0, 1e-2), using default"
            )
            return cls()

        return cls(geometric=value)


_override: Optional[Tolerances] = None


@lru_cache(maxsize=1)
def _environment_tolerances() -> Tolerances:
    return Tolerances.from_env()


def get_tolerances() -> Tolerances:
    """Return the process-wide tolerance record.

    An explicit override (the CLI --tol flag) wins over PLANKFORGE_TOL, which
    is read once per process.
    """
    return _environment_tolerances() if _override is None else _override


def override_tolerances(tolerances: Optional[Tolerances]) -> None:
    """Install (or with None, remove) a process-wide override."""
    global _override
    _override = tolerances


def reset_tolerances() -> None:
    """Forget the override and re-read the environment on next access."""
    override_tolerances(None)
    _environment_tolerances.cache_clear()
